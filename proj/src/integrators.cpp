#include "lrkg/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace lrkg {

namespace {

std::vector<double> synthesize(const Grid& grid, const std::vector<double>& coeffs) {
  return inverse_transform(SpectralField(grid, coeffs));
}

std::vector<double> analyze(const Grid& grid, const std::vector<double>& nodal) {
  return std::move(forward_transform(nodal, grid)).take();
}

// Coefficients of I_N f(u) for u given by its coefficients.
std::vector<double> collocate_f(const StepContext& ctx, const std::vector<double>& u_coeffs) {
  return analyze(ctx.grid(), apply_f(ctx.model(), synthesize(ctx.grid(), u_coeffs)));
}

void require_spectral(const StepContext& ctx, const PairState& state) {
  if (state.representation != Representation::spectral) {
    throw std::invalid_argument("time steps act on spectral pair states");
  }
  if (!(state.grid == ctx.grid())) throw std::invalid_argument("state grid differs from step context grid");
  if (state.u.size() != state.grid.size() || state.v.size() != state.grid.size()) {
    throw std::invalid_argument("pair state component length does not match its grid");
  }
}

// Coefficients of I_N H(U) = (-f(u), f'(u) v), returned as (I_N f(u), I_N f'(u) v).
std::pair<std::vector<double>, std::vector<double>> collocate_F_and_H(const StepContext& ctx,
                                                                      const PairState& state) {
  const Grid& grid = ctx.grid();
  const auto u = synthesize(grid, state.u);
  const auto v = synthesize(grid, state.v);
  std::vector<double> fu(u.size());
  std::vector<double> dfv(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    fu[i] = ctx.model().f(u[i]);
    dfv[i] = ctx.model().df(u[i]) * v[i];
  }
  return {analyze(grid, fu), analyze(grid, dfv)};
}

}  // namespace

SchemeId SchemeId::parse(std::string_view name) {
  if (name == "corrected_lie" || name == "c_lie") return Family::corrected_lie;
  if (name == "lie") return Family::lie;
  if (name == "strang" || name == "ss68" || name == "strang_ss68") return Family::strang;
  if (name == "rs21") return Family::rs21;
  if (name == "hl21") return Family::hl21;
  if (name == "d79") return trig(FilterMethod::B);
  if (name == "g15") return trig(FilterMethod::Btilde);
  for (std::string_view prefix : {"trig_", "trig(", "trig"}) {
    if (name.starts_with(prefix)) {
      auto rest = name.substr(prefix.size());
      if (prefix == "trig(" && rest.ends_with(")")) rest.remove_suffix(1);
      try {
        return trig(parse_filter_method(rest));
      } catch (const std::invalid_argument&) {
        break;
      }
    }
  }
  std::ostringstream msg;
  msg << "unknown scheme '" << name << "'; known schemes:";
  for (const auto& id : catalog()) msg << ' ' << id.name();
  msg << " (aliases: c_lie, ss68, d79, g15)";
  throw std::invalid_argument(msg.str());
}

std::vector<SchemeId> SchemeId::catalog() {
  return {Family::corrected_lie, Family::lie,  Family::strang,
          Family::rs21,          Family::hl21, trig(FilterMethod::B),
          trig(FilterMethod::C), trig(FilterMethod::E), trig(FilterMethod::G),
          trig(FilterMethod::Btilde)};
}

std::vector<SchemeId> SchemeId::comparison_set() {
  return {Family::corrected_lie, Family::lie,  Family::strang,       Family::rs21,
          Family::hl21,          trig(FilterMethod::B), trig(FilterMethod::Btilde)};
}

std::string SchemeId::name() const {
  switch (family_) {
    case Family::corrected_lie: return "corrected_lie";
    case Family::lie: return "lie";
    case Family::strang: return "strang";
    case Family::rs21: return "rs21";
    case Family::hl21: return "hl21";
    case Family::trig: return "trig_" + std::string(to_string(filter_));
  }
  return "?";
}

int SchemeId::transforms_per_step() const {
  switch (family_) {
    case Family::lie:
    case Family::strang: return 2;
    default: return 4;
  }
}

StepContext::StepContext(SchemeId scheme, Grid grid, double tau, NonlinearModel model)
    : scheme_(scheme), grid_(grid), tau_(tau), model_(std::move(model)), sigma_(grid.frequencies()) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("step size must be positive");
  const std::size_t n = sigma_.size();
  semigroup_.resize(n);
  half_semigroup_.resize(n);
  correction_.resize(n);
  helmholtz_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const FrequencySymbol s(sigma_[k]);
    semigroup_[k] = semigroup_block(tau, s);
    half_semigroup_[k] = semigroup_block(0.5 * tau, s);
    correction_[k] = correction_block(tau, s);
    helmholtz_[k] = helmholtz_inverse_multiplier(tau, sigma_[k]);
  }
  if (scheme.family() == SchemeId::Family::trig) {
    psi_.resize(n);
    phi_.resize(n);
    psi0_.resize(n);
    psi1_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = tau * sigma_[k];
      psi_[k] = filter_multiplier(FilterKind::psi, scheme.filter(), x);
      phi_[k] = filter_multiplier(FilterKind::phi, scheme.filter(), x);
      psi0_[k] = filter_multiplier(FilterKind::psi0, scheme.filter(), x);
      psi1_[k] = filter_multiplier(FilterKind::psi1, scheme.filter(), x);
    }
  }
}

const std::vector<double>& StepContext::filter(FilterKind kind) const {
  if (psi_.empty()) throw std::logic_error("filter tables exist only for trigonometric schemes");
  switch (kind) {
    case FilterKind::psi: return psi_;
    case FilterKind::phi: return phi_;
    case FilterKind::psi0: return psi0_;
    case FilterKind::psi1: return psi1_;
  }
  throw std::invalid_argument("unknown filter kind");
}

PairState step_corrected_lie(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  const auto [f_hat, dfv_hat] = collocate_F_and_H(ctx, state);
  const double tau = ctx.tau();
  PairState out = PairState::zeros(ctx.grid(), Representation::spectral);
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    const ModeBlock& e = ctx.semigroup()[k];
    const ModeBlock& c = ctx.correction()[k];
    const double a = state.u[k];
    const double b = state.v[k] + tau * f_hat[k];
    out.u[k] = (e.a11 * a + e.a12 * b) + (-c.a11 * f_hat[k] + c.a12 * dfv_hat[k]);
    out.v[k] = (e.a21 * a + e.a22 * b) + (-c.a21 * f_hat[k] + c.a22 * dfv_hat[k]);
  }
  return out;
}

PairState correction_term(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  const auto [f_hat, dfv_hat] = collocate_F_and_H(ctx, state);
  PairState out = PairState::zeros(ctx.grid(), Representation::spectral);
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    const ModeBlock& c = ctx.correction()[k];
    out.u[k] = -c.a11 * f_hat[k] + c.a12 * dfv_hat[k];
    out.v[k] = -c.a21 * f_hat[k] + c.a22 * dfv_hat[k];
  }
  return out;
}

PairState step_lie(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  const auto f_hat = collocate_f(ctx, state.u);
  const double tau = ctx.tau();
  PairState out = PairState::zeros(ctx.grid(), Representation::spectral);
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    const ModeBlock& e = ctx.semigroup()[k];
    const double a = state.u[k];
    const double b = state.v[k] + tau * f_hat[k];
    out.u[k] = e.a11 * a + e.a12 * b;
    out.v[k] = e.a21 * a + e.a22 * b;
  }
  return out;
}

PairState step_strang(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  PairState half = apply_block_operator(ctx.half_semigroup(), state);
  const auto f_hat = collocate_f(ctx, half.u);
  for (std::size_t k = 0; k < half.v.size(); ++k) half.v[k] += ctx.tau() * f_hat[k];
  return apply_block_operator(ctx.half_semigroup(), half);
}

PairState step_rs21(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  PairState out = apply_block_operator(ctx.semigroup(), state);
  const auto f_start = collocate_f(ctx, state.u);
  const auto f_mid = collocate_f(ctx, out.u);
  const double h = 0.5 * ctx.tau();
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    const ModeBlock& e = ctx.semigroup()[k];
    out.u[k] += h * e.a12 * f_start[k];
    out.v[k] += h * (e.a22 * f_start[k] + f_mid[k]);
  }
  return out;
}

PairState step_hl21(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  const double tau = ctx.tau();
  const auto f_start = collocate_f(ctx, state.u);
  PairState out = PairState::zeros(ctx.grid(), Representation::spectral);
  std::vector<double> v_half(out.u.size());
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    const double s2 = ctx.sigma()[k] * ctx.sigma()[k];
    v_half[k] = ctx.helmholtz()[k] *
                (state.v[k] + 0.5 * tau * f_start[k] - 0.5 * tau * s2 * state.u[k]);
    out.u[k] = state.u[k] + tau * v_half[k];
  }
  const auto f_end = collocate_f(ctx, out.u);
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    out.v[k] = 2.0 * v_half[k] - state.v[k] + 0.5 * tau * (f_end[k] - f_start[k]);
  }
  return out;
}

PairState step_trig(const StepContext& ctx, const PairState& state) {
  require_spectral(ctx, state);
  if (ctx.scheme().family() != SchemeId::Family::trig) {
    throw std::invalid_argument("step_trig needs a trigonometric step context");
  }
  const double tau = ctx.tau();
  const auto& psi = ctx.filter(FilterKind::psi);
  const auto& phi = ctx.filter(FilterKind::phi);
  const auto& psi0 = ctx.filter(FilterKind::psi0);
  const auto& psi1 = ctx.filter(FilterKind::psi1);
  const std::size_t n = state.u.size();

  std::vector<double> filtered(n);
  for (std::size_t k = 0; k < n; ++k) filtered[k] = phi[k] * state.u[k];
  const auto g_start = collocate_f(ctx, filtered);

  PairState out = PairState::zeros(ctx.grid(), Representation::spectral);
  for (std::size_t k = 0; k < n; ++k) {
    const ModeBlock& e = ctx.semigroup()[k];
    out.u[k] = e.a11 * state.u[k] + e.a12 * state.v[k] + 0.5 * tau * tau * psi[k] * g_start[k];
  }
  for (std::size_t k = 0; k < n; ++k) filtered[k] = phi[k] * out.u[k];
  const auto g_end = collocate_f(ctx, filtered);
  for (std::size_t k = 0; k < n; ++k) {
    const ModeBlock& e = ctx.semigroup()[k];
    out.v[k] = e.a21 * state.u[k] + e.a22 * state.v[k] +
               0.5 * tau * (psi0[k] * g_start[k] + psi1[k] * g_end[k]);
  }
  return out;
}

PairState step(const StepContext& ctx, const PairState& state) {
  switch (ctx.scheme().family()) {
    case SchemeId::Family::corrected_lie: return step_corrected_lie(ctx, state);
    case SchemeId::Family::lie: return step_lie(ctx, state);
    case SchemeId::Family::strang: return step_strang(ctx, state);
    case SchemeId::Family::rs21: return step_rs21(ctx, state);
    case SchemeId::Family::hl21: return step_hl21(ctx, state);
    case SchemeId::Family::trig: return step_trig(ctx, state);
  }
  throw std::logic_error("unhandled scheme");
}

NumericalBlowup::NumericalBlowup(std::int64_t step_index, double norm)
    : std::runtime_error("non-finite state at step " + std::to_string(step_index) +
                         " (coefficient norm " + std::to_string(norm) + ")"),
      step_index_(step_index),
      norm_(norm) {}

namespace {

void check_finite(const PairState& state, std::int64_t step_index) {
  double sum = 0.0;
  for (double x : state.u) sum += x * x;
  for (double x : state.v) sum += x * x;
  if (!std::isfinite(sum)) throw NumericalBlowup(step_index, std::sqrt(sum));
}

}  // namespace

PairState integrate(const StepContext& ctx, const PairState& state0, std::int64_t n_steps) {
  return integrate(ctx, state0, n_steps, {}).final_state;
}

Trajectory integrate(const StepContext& ctx, const PairState& state0, std::int64_t n_steps,
                     const std::vector<std::int64_t>& record_at) {
  if (n_steps < 0) throw std::invalid_argument("number of steps must be nonnegative");
  std::vector<std::int64_t> marks(record_at);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  Trajectory traj{to_spectral(state0), {}};
  auto next_mark = marks.begin();
  auto record = [&](std::int64_t index) {
    while (next_mark != marks.end() && *next_mark < index) ++next_mark;
    if (next_mark != marks.end() && *next_mark == index) {
      traj.snapshots.emplace_back(index, traj.final_state);
      ++next_mark;
    }
  };
  check_finite(traj.final_state, 0);
  record(0);
  for (std::int64_t n = 1; n <= n_steps; ++n) {
    traj.final_state = step(ctx, traj.final_state);
    check_finite(traj.final_state, n);
    record(n);
  }
  return traj;
}

}  // namespace lrkg
