// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "hdwv/error.hpp"

namespace hdwv {

/// N x N Sylvester Hadamard matrix with entries in {-1, +1}.
class HadamardMatrix {
 public:
  /// Sylvester construction. order must be a power of two in [2, 1024].
  explicit HadamardMatrix(int order);

  int order() const noexcept { return static_cast<int>(h_.rows()); }
  const Eigen::MatrixXi& entries() const noexcept { return h_; }
  int operator()(int i, int j) const { return h_(i, j); }
  auto row(int i) const { return h_.row(i); }

 private:
  Eigen::MatrixXi h_;
};

inline HadamardMatrix build_hadamard(int order) { return HadamardMatrix(order); }

bool is_power_of_two(int n) noexcept;

enum class BasisKind { OneHot, Hadamard };

/*!
 * The N read patterns issued in one verify sweep.
 *
 * OneHot rows are selection vectors (entries 0/1); Hadamard rows are the
 * +-1 bitline drive patterns.
 */
struct ReadBasis {
  BasisKind kind;
  Eigen::MatrixXi patterns;

  int size() const noexcept { return static_cast<int>(patterns.rows()); }
  auto pattern(int i) const { return patterns.row(i); }

  static ReadBasis one_hot(int n);
  static ReadBasis hadamard(const HadamardMatrix& h);
};

namespace detail {
inline void check_length(const HadamardMatrix& h, Eigen::Index n) {
  if (n != h.order())
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(n) + " vs Hadamard order " +
                    std::to_string(h.order()));
}
}  // namespace detail

/// Noiseless Hadamard-domain image y = H w, in the scalar type of w.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> encode(
    const HadamardMatrix& h, const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  detail::check_length(h, w.size());
  return h.entries().template cast<Scalar>() * w.derived();
}

/// Inverse transform (1/N) H^T y, always evaluated in double precision.
template <typename Derived>
Eigen::VectorXd decode(const HadamardMatrix& h, const Eigen::MatrixBase<Derived>& y) {
  detail::check_length(h, y.size());
  Eigen::VectorXd acc = h.entries().transpose().cast<double>() * y.derived().template cast<double>();
  return acc / static_cast<double>(h.order());
}

/*!
 * Unnormalized inverse transform of a ternary sign vector: H^T s, exact
 * integers in [-N, N]. Thresholds for compare-only verification are applied on
 * this scale.
 */
Eigen::VectorXi decode_ternary(const HadamardMatrix& h, const Eigen::Ref<const Eigen::VectorXi>& s);

/*!
 * Per-cell variance of the least-squares estimate under i.i.d. read noise:
 * diag(sigma^2 (A^T A)^{-1}). Throws SingularMatrix if A is not invertible.
 */
Eigen::VectorXd estimator_variance(const Eigen::Ref<const Eigen::MatrixXd>& a, double sigma);

}  // namespace hdwv
