#pragma once

// Library-driven measurements shared by the unit tests and the acceptance
// binary. The independent reference values live in oracles.hpp.

#include <cmath>
#include <vector>

#include "lrkg/experiments.hpp"
#include "lrkg/integrators.hpp"
#include "lrkg/nonlinearity.hpp"
#include "lrkg/operators.hpp"
#include "lrkg/spectral.hpp"
#include "oracles.hpp"

namespace fixture {

inline lrkg::PairState add(const lrkg::PairState& a, const lrkg::PairState& b, double scale_b = 1.0) {
  lrkg::PairState out = a;
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    out.u[i] += scale_b * b.u[i];
    out.v[i] += scale_b * b.v[i];
  }
  return out;
}

inline lrkg::PairState scaled(const lrkg::PairState& a, double s) {
  lrkg::PairState out = a;
  for (double& x : out.u) x *= s;
  for (double& x : out.v) x *= s;
  return out;
}

/// G(s) = e^{-sL} I_N F(e^{sL} W).
inline lrkg::PairState conjugated_field(double s, const lrkg::PairState& w,
                                        const lrkg::NonlinearModel& model) {
  using namespace lrkg;
  auto inner = to_nodal(apply_semigroup(s, w));
  return apply_semigroup(-s, to_spectral(eval_F(model, inner)));
}

/// H^1 x L^2 size of the defect between the central difference of G at s
/// and conjugated_derivative, for each h.
inline std::vector<double> conjugated_derivative_defects(const lrkg::PairState& w,
                                                         const lrkg::NonlinearModel& model,
                                                         double s, const std::vector<double>& hs) {
  using namespace lrkg;
  const auto exact = conjugated_derivative(s, w, model);
  std::vector<double> out;
  for (double h : hs) {
    auto fd = scaled(add(conjugated_field(s + h, w, model), conjugated_field(s - h, w, model), -1.0),
                     1.0 / (2.0 * h));
    out.push_back(pair_norm(add(fd, exact, -1.0), PairNorm::level1));
  }
  return out;
}

/// e^{sL} (0, f''(u~)(v~^2 - |grad u~|^2)) with (u~, v~) = e^{sL} W.
inline lrkg::PairState cancellation_rhs(double s, const lrkg::PairState& w,
                                        const lrkg::NonlinearModel& model) {
  using namespace lrkg;
  const auto moved = apply_semigroup(s, w);
  const auto nodal = to_nodal(moved);
  std::vector<double> grad2(nodal.u.size(), 0.0);
  for (int axis = 0; axis < w.grid.dim(); ++axis) {
    const auto d = derivative_nodal(moved.u_field(), axis);
    for (std::size_t i = 0; i < d.size(); ++i) grad2[i] += d[i] * d[i];
  }
  PairState rhs = PairState::zeros(w.grid, Representation::nodal);
  for (std::size_t i = 0; i < rhs.v.size(); ++i) {
    rhs.v[i] = model.d2f(nodal.u[i]) * (nodal.v[i] * nodal.v[i] - grad2[i]);
  }
  return apply_semigroup(s, to_spectral(rhs));
}

/// Relative H^1 x L^2 defect of the central difference of s -> e^{2sL} G'(s)
/// against cancellation_rhs, for each h.
inline std::vector<double> cancellation_defects(const lrkg::PairState& w,
                                                const lrkg::NonlinearModel& model, double s,
                                                const std::vector<double>& hs) {
  using namespace lrkg;
  auto k = [&](double t) { return apply_semigroup(2.0 * t, conjugated_derivative(t, w, model)); };
  const auto rhs = cancellation_rhs(s, w, model);
  const double scale = pair_norm(rhs, PairNorm::level1);
  std::vector<double> out;
  for (double h : hs) {
    auto fd = scaled(add(k(s + h), k(s - h), -1.0), 1.0 / (2.0 * h));
    out.push_back(pair_norm(add(fd, rhs, -1.0), PairNorm::level1) / scale);
  }
  return out;
}

/// One step of `scheme` on the two-mode grid with u = a e_1, v = b e_1 and
/// f == c, compared with the quadrature solution of the forced mode-1 ODE.
/// Returns max(|du|, |dv|) over both modes.
inline double single_mode_defect(lrkg::SchemeId scheme, double tau, double a, double b, double c) {
  using namespace lrkg;
  const Grid grid(1, 2);
  const auto model = NonlinearModel::constant(c);
  const auto state = PairState::from(grid, Representation::spectral, {a, 0.0}, {b, 0.0});
  const StepContext ctx(scheme, grid, tau, model);
  const auto next = step(ctx, state);

  const auto forcing = forward_transform(std::vector<double>(2, c), grid);
  const double sigma = std::numbers::pi;
  const auto exact = oracle::variation_of_constants(tau, sigma, {a, b}, forcing[0]);
  return std::max({std::abs(next.u[0] - exact.u), std::abs(next.v[0] - exact.v),
                   std::abs(next.u[1]), std::abs(next.v[1])});
}

inline lrkg::PairState smooth_state(int n, std::uint64_t seed) {
  return lrkg::make_initial_data(lrkg::Grid(1, n), lrkg::Regularity::smooth(), seed);
}

/// Deterministic spectral pair with independent uniform coefficients.
inline lrkg::PairState random_state(const lrkg::Grid& grid, std::uint64_t seed) {
  return lrkg::PairState::from(grid, lrkg::Representation::spectral,
                               oracle::random_vector(grid.size(), seed),
                               oracle::random_vector(grid.size(), seed ^ 0x9e3779b97f4a7c15ULL));
}

inline double max_abs_diff(const lrkg::PairState& a, const lrkg::PairState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    m = std::max({m, std::abs(a.u[i] - b.u[i]), std::abs(a.v[i] - b.v[i])});
  }
  return m;
}

inline double max_abs(const lrkg::PairState& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.u.size(); ++i) m = std::max({m, std::abs(a.u[i]), std::abs(a.v[i])});
  return m;
}

}  // namespace fixture
