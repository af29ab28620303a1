// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/hadamard.hpp"

#include <string>

namespace hdwv {

bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

HadamardMatrix::HadamardMatrix(int order) {
  if (order < 1 || !is_power_of_two(order))
    throw Error(ErrorCode::NonPowerOfTwo, "Hadamard order " + std::to_string(order));
  if (order < 2 || order > 1024)
    throw Error(ErrorCode::OrderOutOfRange, "Hadamard order " + std::to_string(order) +
                                                " outside [2, 1024]");
  h_.resize(1, 1);
  h_(0, 0) = 1;
  while (h_.rows() < order) {
    const Eigen::Index n = h_.rows();
    Eigen::MatrixXi next(2 * n, 2 * n);
    next << h_, h_, h_, -h_;
    h_ = std::move(next);
  }
}

ReadBasis ReadBasis::one_hot(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidDimensions, "one-hot basis of size " + std::to_string(n));
  return {BasisKind::OneHot, Eigen::MatrixXi::Identity(n, n)};
}

ReadBasis ReadBasis::hadamard(const HadamardMatrix& h) {
  return {BasisKind::Hadamard, h.entries()};
}

Eigen::VectorXi decode_ternary(const HadamardMatrix& h, const Eigen::Ref<const Eigen::VectorXi>& s) {
  detail::check_length(h, s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] < -1 || s[i] > 1)
      throw Error(ErrorCode::InvalidTernaryEntry,
                  "entry " + std::to_string(i) + " = " + std::to_string(s[i]));
  return h.entries().transpose() * s;
}

Eigen::VectorXd estimator_variance(const Eigen::Ref<const Eigen::MatrixXd>& a, double sigma) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "measurement matrix must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "measurement matrix is singular");
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::MatrixXd inv = gram.ldlt().solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  return sigma * sigma * inv.diagonal();
}

}  // namespace hdwv
