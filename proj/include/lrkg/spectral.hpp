#pragma once

// Sine-basis spectral representation on the unit cube [0,1]^d with
// homogeneous Dirichlet boundary conditions.
//
// Basis functions are e_k(x) = prod_i sqrt(2) sin(k_i pi x_i), k_i = 1..N,
// which are orthonormal in L^2. Collocation nodes are the interior DST-I
// points x_j = j / (N + 1), j = 1..N. Arrays of length N^d are stored
// row-major with the last dimension fastest.

#include <cstddef>
#include <span>
#include <vector>

namespace lrkg {

class Grid {
 public:
  /// Throws std::invalid_argument unless 1 <= dim <= 3 and n_modes >= 2.
  Grid(int dim, int n_modes);

  int dim() const { return dim_; }
  int n_modes() const { return n_modes_; }
  /// Number of coefficients (and of nodes): N^d.
  std::size_t size() const { return size_; }

  /// Collocation coordinate of 0-based node index j along any axis.
  double node(int j) const { return static_cast<double>(j + 1) / (n_modes_ + 1); }

  /// Multi-index (1-based wavenumbers) of the flat index.
  std::vector<int> wavenumbers(std::size_t flat) const;

  /// Dirichlet Laplacian eigenvalues pi^2 |k|^2 for every flat index.
  std::vector<double> laplacian_eigenvalues() const;

  /// sqrt of laplacian_eigenvalues(), i.e. the symbol of sqrt(-Laplacian).
  std::vector<double> frequencies() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  int n_modes_;
  std::size_t size_;
};

class SpectralField {
 public:
  /// Zero field.
  explicit SpectralField(Grid grid);
  /// Throws std::invalid_argument on length mismatch.
  SpectralField(Grid grid, std::vector<double> coeffs);

  const Grid& grid() const { return grid_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// Releases the coefficient storage.
  std::vector<double> take() && { return std::move(coeffs_); }

 private:
  Grid grid_;
  std::vector<double> coeffs_;
};

enum class Representation { nodal, spectral };

/// U = (u, v) with v standing for the time derivative of u. Both components
/// live on the same grid and share one representation.
struct PairState {
  Grid grid;
  Representation representation;
  std::vector<double> u;
  std::vector<double> v;

  static PairState zeros(const Grid& grid, Representation rep);
  /// Throws std::invalid_argument if the component lengths disagree with grid.
  static PairState from(const Grid& grid, Representation rep,
                        std::vector<double> u, std::vector<double> v);

  SpectralField u_field() const { return SpectralField(grid, u); }
  SpectralField v_field() const { return SpectralField(grid, v); }
};

/// Coefficients of the sine interpolant of nodal values (DST-I per dimension).
SpectralField forward_transform(std::span<const double> nodal, const Grid& grid);

/// Nodal values of the sine series at the collocation points.
std::vector<double> inverse_transform(const SpectralField& field);

/// Nodal values of the derivative d/dx_axis of the sine series. Along `axis`
/// this is a cosine synthesis; along the other axes a sine synthesis.
std::vector<double> derivative_nodal(const SpectralField& field, int axis);

PairState to_spectral(const PairState& state);
PairState to_nodal(const PairState& state);

/// Truncates (m < N) or zero-pads (m > N) the sine series to m modes per axis.
SpectralField project(const SpectralField& field, int m);
PairState project(const PairState& state, int m);

/// (sum_k (1 + lambda_k)^s |c_k|^2)^(1/2) for s in [-2, 3].
double sobolev_norm(const SpectralField& field, double s);

/// (sum_k lambda_k^s |c_k|^2)^(1/2), the homogeneous variant (any finite s).
double homogeneous_norm(const SpectralField& field, double s);

/// Norm of a pair state in spectral representation.
///   level 0, 1, 2: (||u||_{H^s}^2 + ||v||_{H^{s-1}}^2)^(1/2) with s = level.
///   energy:        (sum lambda_k |u_k|^2 + sum |v_k|^2)^(1/2).
enum class PairNorm { level0, level1, level2, energy };
double pair_norm(const PairState& state, PairNorm level);

/// Scaled quadrature l2 norm of nodal values: ((N+1)^-d sum |g_j|^2)^(1/2).
/// For a sine interpolant this equals the coefficient 2-norm.
double nodal_l2(std::span<const double> nodal, const Grid& grid);

}  // namespace lrkg
