#include "lrkg/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace lrkg {

namespace {

struct FftwFree {
  void operator()(double* p) const { fftw_free(p); }
};
using AlignedBuffer = std::unique_ptr<double[], FftwFree>;

AlignedBuffer make_buffer(std::size_t n) {
  auto* p = fftw_alloc_real(std::max<std::size_t>(n, 1));
  if (p == nullptr) throw std::bad_alloc();
  return AlignedBuffer(p);
}

// Out-of-place r2r plans keyed by shape and per-axis kind. Plans are created
// once under a lock with FFTW_ESTIMATE (deterministic) and executed through
// the new-array interface, which is thread-safe.
class PlanCache {
 public:
  using Key = std::pair<std::vector<int>, std::vector<int>>;

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const std::vector<int>& shape, const std::vector<fftw_r2r_kind>& kinds) {
    Key key{shape, std::vector<int>(kinds.begin(), kinds.end())};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int n : shape) total *= static_cast<std::size_t>(n);
    auto in = make_buffer(total);
    auto out = make_buffer(total);
    fftw_plan plan = fftw_plan_r2r(static_cast<int>(shape.size()), shape.data(), in.get(),
                                   out.get(), kinds.data(), FFTW_ESTIMATE);
    if (plan == nullptr) throw std::runtime_error("fftw_plan_r2r failed");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

// Applies the multi-dimensional r2r transform and scales the result.
std::vector<double> run_r2r(std::span<const double> input, const std::vector<int>& shape,
                            const std::vector<fftw_r2r_kind>& kinds, double scale) {
  fftw_plan plan = PlanCache::instance().get(shape, kinds);
  auto in = make_buffer(input.size());
  auto out = make_buffer(input.size());
  std::copy(input.begin(), input.end(), in.get());
  fftw_execute_r2r(plan, in.get(), out.get());
  std::vector<double> result(out.get(), out.get() + input.size());
  for (double& x : result) x *= scale;
  return result;
}

std::vector<int> cube_shape(const Grid& grid) {
  return std::vector<int>(static_cast<std::size_t>(grid.dim()), grid.n_modes());
}

void require_same_grid(const PairState& state) {
  if (state.u.size() != state.grid.size() || state.v.size() != state.grid.size()) {
    throw std::invalid_argument("pair state component length does not match its grid");
  }
}

// Row-major strides for a shape.
std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] * static_cast<std::size_t>(shape[i + 1]);
  }
  return strides;
}

}  // namespace

Grid::Grid(int dim, int n_modes) : dim_(dim), n_modes_(n_modes), size_(1) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (n_modes < 2) {
    throw std::invalid_argument("grid needs at least 2 modes per axis, got " +
                                std::to_string(n_modes));
  }
  for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(n_modes);
}

std::vector<int> Grid::wavenumbers(std::size_t flat) const {
  std::vector<int> k(static_cast<std::size_t>(dim_));
  for (int i = dim_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(flat % static_cast<std::size_t>(n_modes_)) + 1;
    flat /= static_cast<std::size_t>(n_modes_);
  }
  return k;
}

std::vector<double> Grid::laplacian_eigenvalues() const {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  std::vector<double> lambda(size_);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    double k2 = 0.0;
    for (int k : wavenumbers(idx)) k2 += static_cast<double>(k) * k;
    lambda[idx] = pi2 * k2;
  }
  return lambda;
}

std::vector<double> Grid::frequencies() const {
  auto sigma = laplacian_eigenvalues();
  for (double& s : sigma) s = std::sqrt(s);
  return sigma;
}

SpectralField::SpectralField(Grid grid) : grid_(grid), coeffs_(grid.size(), 0.0) {}

SpectralField::SpectralField(Grid grid, std::vector<double> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw std::invalid_argument("coefficient array has length " + std::to_string(coeffs_.size()) +
                                ", grid expects " + std::to_string(grid_.size()));
  }
}

PairState PairState::zeros(const Grid& grid, Representation rep) {
  return PairState{grid, rep, std::vector<double>(grid.size(), 0.0),
                   std::vector<double>(grid.size(), 0.0)};
}

PairState PairState::from(const Grid& grid, Representation rep, std::vector<double> u,
                          std::vector<double> v) {
  PairState state{grid, rep, std::move(u), std::move(v)};
  require_same_grid(state);
  return state;
}

SpectralField forward_transform(std::span<const double> nodal, const Grid& grid) {
  if (nodal.size() != grid.size()) {
    throw std::invalid_argument("nodal array has length " + std::to_string(nodal.size()) +
                                ", grid expects " + std::to_string(grid.size()));
  }
  const double axis_scale = 1.0 / (std::numbers::sqrt2 * (grid.n_modes() + 1));
  const double scale = std::pow(axis_scale, grid.dim());
  std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(grid.dim()), FFTW_RODFT00);
  return SpectralField(grid, run_r2r(nodal, cube_shape(grid), kinds, scale));
}

std::vector<double> inverse_transform(const SpectralField& field) {
  const Grid& grid = field.grid();
  const double scale = std::pow(1.0 / std::numbers::sqrt2, grid.dim());
  std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(grid.dim()), FFTW_RODFT00);
  return run_r2r(field.coeffs(), cube_shape(grid), kinds, scale);
}

std::vector<double> derivative_nodal(const SpectralField& field, int axis) {
  const Grid& grid = field.grid();
  if (axis < 0 || axis >= grid.dim()) {
    throw std::invalid_argument("derivative axis out of range");
  }
  const int n = grid.n_modes();
  auto shape = cube_shape(grid);
  shape[axis] = n + 2;
  std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(grid.dim()), FFTW_RODFT00);
  kinds[axis] = FFTW_REDFT00;

  // Padded coefficient array: slot m along `axis` holds m*pi*c_m, slots 0 and
  // N+1 are zero.
  const auto pad_strides = strides_of(shape);
  std::size_t padded_size = 1;
  for (int s : shape) padded_size *= static_cast<std::size_t>(s);
  std::vector<double> padded(padded_size, 0.0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    auto k = grid.wavenumbers(idx);
    std::size_t pos = 0;
    for (int i = 0; i < grid.dim(); ++i) {
      pos += pad_strides[i] * static_cast<std::size_t>(i == axis ? k[i] : k[i] - 1);
    }
    padded[pos] = field[idx] * std::numbers::pi * k[axis];
  }

  const double scale = std::pow(1.0 / std::numbers::sqrt2, grid.dim());
  auto full = run_r2r(padded, shape, kinds, scale);

  std::vector<double> result(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    auto k = grid.wavenumbers(idx);  // node j_i = k_i (1-based), slot j_i along axis
    std::size_t pos = 0;
    for (int i = 0; i < grid.dim(); ++i) {
      pos += pad_strides[i] * static_cast<std::size_t>(i == axis ? k[i] : k[i] - 1);
    }
    result[idx] = full[pos];
  }
  return result;
}

PairState to_spectral(const PairState& state) {
  require_same_grid(state);
  if (state.representation == Representation::spectral) return state;
  return PairState{state.grid, Representation::spectral,
                   std::move(forward_transform(state.u, state.grid)).take(),
                   std::move(forward_transform(state.v, state.grid)).take()};
}

PairState to_nodal(const PairState& state) {
  require_same_grid(state);
  if (state.representation == Representation::nodal) return state;
  return PairState{state.grid, Representation::nodal, inverse_transform(state.u_field()),
                   inverse_transform(state.v_field())};
}

SpectralField project(const SpectralField& field, int m) {
  if (m < 1) throw std::invalid_argument("projection target must have at least 1 mode");
  const Grid& src = field.grid();
  // Grid requires >= 2 modes; a 1-mode target is represented on a 2-mode grid
  // with the second mode zero.
  Grid dst(src.dim(), std::max(m, 2));
  SpectralField out(dst);
  const auto dst_shape = cube_shape(dst);
  const auto dst_strides = strides_of(dst_shape);
  for (std::size_t idx = 0; idx < src.size(); ++idx) {
    auto k = src.wavenumbers(idx);
    if (std::any_of(k.begin(), k.end(), [m](int ki) { return ki > m; })) continue;
    std::size_t pos = 0;
    for (int i = 0; i < src.dim(); ++i) pos += dst_strides[i] * static_cast<std::size_t>(k[i] - 1);
    out[pos] = field[idx];
  }
  return out;
}

PairState project(const PairState& state, int m) {
  if (state.representation != Representation::spectral) {
    throw std::invalid_argument("project requires a spectral pair state");
  }
  auto u = project(state.u_field(), m);
  auto v = project(state.v_field(), m);
  Grid grid = u.grid();
  return PairState{grid, Representation::spectral, std::move(u).take(), std::move(v).take()};
}

double sobolev_norm(const SpectralField& field, double s) {
  if (!(s >= -2.0 && s <= 3.0)) {
    throw std::invalid_argument("sobolev order must lie in [-2, 3], got " + std::to_string(s));
  }
  const auto lambda = field.grid().laplacian_eigenvalues();
  double sum = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    sum += std::pow(1.0 + lambda[i], s) * field[i] * field[i];
  }
  return std::sqrt(sum);
}

double homogeneous_norm(const SpectralField& field, double s) {
  const auto lambda = field.grid().laplacian_eigenvalues();
  double sum = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    sum += std::pow(lambda[i], s) * field[i] * field[i];
  }
  return std::sqrt(sum);
}

double pair_norm(const PairState& state, PairNorm level) {
  if (state.representation != Representation::spectral) {
    throw std::invalid_argument("pair_norm requires a spectral pair state");
  }
  require_same_grid(state);
  auto u = state.u_field();
  auto v = state.v_field();
  auto combine = [](double a, double b) { return std::sqrt(a * a + b * b); };
  switch (level) {
    case PairNorm::level0: return combine(sobolev_norm(u, 0.0), sobolev_norm(v, -1.0));
    case PairNorm::level1: return combine(sobolev_norm(u, 1.0), sobolev_norm(v, 0.0));
    case PairNorm::level2: return combine(sobolev_norm(u, 2.0), sobolev_norm(v, 1.0));
    case PairNorm::energy: return combine(homogeneous_norm(u, 1.0), homogeneous_norm(v, 0.0));
  }
  throw std::invalid_argument("unsupported pair norm level");
}

double nodal_l2(std::span<const double> nodal, const Grid& grid) {
  if (nodal.size() != grid.size()) throw std::invalid_argument("nodal array length mismatch");
  double sum = 0.0;
  for (double g : nodal) sum += g * g;
  return std::sqrt(sum / std::pow(grid.n_modes() + 1.0, grid.dim()));
}

}  // namespace lrkg
