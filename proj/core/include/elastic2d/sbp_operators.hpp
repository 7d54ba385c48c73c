#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace elastic2d {

/// Diagonal-norm summation-by-parts operators on n nodes with unit spacing.
///
/// D1 satisfies H D1 + (H D1)^T = diag(-1, 0, ..., 0, 1). The second
/// derivative D2(b) = H^-1 (-M(b) + B b S) is built in energy form,
/// M(b) = D1^T H b D1 + alpha Dk^T (H b) Dk, where Dk is the undivided k-th
/// difference. The Dk term damps the odd-even mode that the wide D1^T D1
/// product leaves undamped; it annihilates polynomials below degree k.
class SbpOperators {
 public:
  /// interior_order in {4, 6, 8}; boundary order is half of it.
  /// Throws InvalidArgument for other orders or when n is too small for
  /// the two boundary closures.
  static std::shared_ptr<const SbpOperators> build(int interior_order, int n);

  int order() const noexcept { return order_; }
  int boundary_order() const noexcept { return order_ / 2; }
  int size() const noexcept { return n_; }
  /// Number of rows with boundary-modified coefficients at each end.
  int closure_rows() const noexcept { return r_; }
  /// Half width of the interior stencil.
  int half_width() const noexcept { return static_cast<int>(a_.size()); }
  /// Smallest n accepted by build() for this order.
  static int min_size(int interior_order);

  const std::vector<double>& norm() const noexcept { return h_; }
  double norm(int i) const noexcept { return h_[static_cast<std::size_t>(i)]; }
  /// Interior coefficients a_1..a_w: (D1 u)_i = sum a_m (u_{i+m} - u_{i-m}).
  const std::vector<double>& interior() const noexcept { return a_; }
  /// Dense closure rows of D1 (r rows, r + w columns).
  const std::vector<std::vector<double>>& closure() const noexcept { return left_; }

  /// Nonzeros (row, value) of D1 column j, for j < closure_rows() +
  /// half_width(); the right end follows from D1[n-1-i][n-1-j] = -D1[i][j].
  const std::vector<std::pair<int, double>>& transpose_column(int j) const { return tcol_[static_cast<std::size_t>(j)]; }

  double d1(int i, int j) const;
  std::vector<double> d1_matrix() const;

  /// out[k*os] (+)= (D1 u)_k with u read at in[k*is].
  void apply_d1(const double* in, long is, double* out, long os, bool add = false) const;
  void apply_d1_transpose(const double* in, long is, double* out, long os, bool add = false) const;

  int correction_order() const noexcept { return k_; }
  double correction_alpha() const noexcept { return alpha_; }
  /// Binomial coefficients of the k-th undivided difference.
  const std::vector<double>& correction_stencil() const noexcept { return dk_; }
  /// Nodes (one or two) whose average defines the weight of correction row m.
  std::pair<int, int> correction_centre(int m) const noexcept {
    return {m + (k_ - 1) / 2, m + k_ / 2};
  }

  /// Applies D2(b) u (unit spacing).
  void apply_d2(const double* b, const double* u, double* out) const;
  /// Dense M(b), the symmetric positive semidefinite part of -H D2(b).
  std::vector<double> energy_matrix(const std::vector<double>& b) const;

 private:
  SbpOperators() = default;

  int order_ = 0;
  int n_ = 0;
  int r_ = 0;
  int k_ = 0;
  double alpha_ = 0.0;
  std::vector<double> h_;
  std::vector<double> a_;
  std::vector<std::vector<double>> left_;
  // Nonzeros of D1 column j near the left end: (row, value).
  std::vector<std::vector<std::pair<int, double>>> tcol_;
  std::vector<double> dk_;
};

/// Spectral radius of H^-1/2 D1^T H D1 H^-1/2 for the given operator.
double sbp_spectral_radius(const SbpOperators& ops);

}  // namespace elastic2d
