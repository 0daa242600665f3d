#include "lrkg/operators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lrkg/nonlinearity.hpp"

namespace lrkg {

namespace {

// Sums an alternating power series sum_n (-1)^n c_n x^(2n) given c_0 and the
// ratio c_{n+1}/c_n, stopping once terms fall below one ulp of the sum.
template <typename Ratio>
double even_series(double x, double c0, Ratio ratio) {
  const double x2 = x * x;
  double term = c0;
  double sum = c0;
  for (int n = 0; n < 60; ++n) {
    term *= -x2 * ratio(n);
    sum += term;
    if (std::abs(term) <= std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

FrequencySymbol::FrequencySymbol(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("frequency symbol must be positive and finite");
  }
}

double sinc(double x) {
  if (std::abs(x) < kSeriesSwitch) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
  }
  return std::sin(x) / x;
}

double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

double x_minus_sin(double x) {
  if (std::abs(x) < 1.0) {
    // x^3/3! - x^5/5! + ...
    const double c0 = x * x * x / 6.0;
    return even_series(x, c0, [](int n) { return 1.0 / ((2.0 * n + 4.0) * (2.0 * n + 5.0)); });
  }
  return x - std::sin(x);
}

double sinc_minus_cos(double x) {
  if (std::abs(x) < 1.0) {
    // sum_{n>=1} (-1)^(n+1) 2n x^(2n) / (2n+1)!
    const double c0 = x * x / 3.0;
    return even_series(x, c0, [](int n) {
      const double m = n + 1.0;  // current index
      return (m + 1.0) / m / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
    });
  }
  return std::sin(x) / x - std::cos(x);
}

ModeBlock semigroup_block(double t, FrequencySymbol sigma) {
  const double s = sigma.value();
  const double x = t * s;
  const double c = std::cos(x);
  return {c, t * sinc(x), -s * std::sin(x), c};
}

ModeBlock phi2_block(double tau, FrequencySymbol sigma) {
  if (!(tau > 0.0)) throw std::invalid_argument("phi2_block needs a positive step");
  const double s = sigma.value();
  const double x = 2.0 * tau * s;
  double alpha = 0.0;
  double gamma = 0.0;  // (x - sin x) / x^2
  if (x < kSeriesSwitch) {
    const double x2 = x * x;
    alpha = 0.5 - x2 / 24.0 * (1.0 - x2 / 30.0 * (1.0 - x2 / 56.0));
    gamma = x / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  } else {
    alpha = one_minus_cos(x) / (x * x);
    gamma = x_minus_sin(x) / (x * x);
  }
  const double beta = -gamma / s;
  // alpha I + beta J_sigma
  return {alpha, beta, -s * s * beta, alpha};
}

ModeBlock correction_block(double tau, FrequencySymbol sigma) {
  return (tau * tau) * (semigroup_block(tau, sigma) * phi2_block(tau, sigma));
}

ModeBlock correction_block_resolvent_form(double tau, FrequencySymbol sigma) {
  if (!(tau > 0.0)) throw std::invalid_argument("correction block needs a positive step");
  const double s = sigma.value();
  const double x = tau * s;
  // On one mode (2L)^{-1}(e^{tau L} - e^{-tau L}) = tau sinc(tau sigma) I, so the
  // bracket is tau (e^{tau L} - sinc(tau sigma) I); its diagonal cos - sinc is
  // evaluated without cancellation.
  const ModeBlock bracket{-tau * sinc_minus_cos(x), tau * tau * sinc(x), -tau * s * std::sin(x),
                          -tau * sinc_minus_cos(x)};
  const ModeBlock half_inverse_generator{0.0, -0.5 / (s * s), 0.5, 0.0};
  return half_inverse_generator * bracket;
}

PairState apply_block_operator(std::span<const ModeBlock> blocks, const PairState& state) {
  if (state.representation != Representation::spectral) {
    throw std::invalid_argument("block operators act on spectral pair states");
  }
  if (blocks.size() != state.grid.size() || state.u.size() != state.grid.size() ||
      state.v.size() != state.grid.size()) {
    throw std::invalid_argument("block table size " + std::to_string(blocks.size()) +
                                " does not match grid size " + std::to_string(state.grid.size()));
  }
  PairState out = PairState::zeros(state.grid, Representation::spectral);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ModeBlock& b = blocks[k];
    out.u[k] = b.a11 * state.u[k] + b.a12 * state.v[k];
    out.v[k] = b.a21 * state.u[k] + b.a22 * state.v[k];
  }
  return out;
}

PairState apply_semigroup(double t, const PairState& state) {
  const auto sigma = state.grid.frequencies();
  std::vector<ModeBlock> blocks(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) blocks[k] = semigroup_block(t, FrequencySymbol(sigma[k]));
  return apply_block_operator(blocks, state);
}

double filter_multiplier(FilterKind kind, FilterMethod method, double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("filter argument must be nonnegative");
  // Every method has psi = sinc^(p+1) * chi and psi1 = sinc^p * chi.
  int p = 0;
  double chi = 1.0;
  bool phi_is_sinc = false;
  switch (method) {
    case FilterMethod::B: p = 0; break;
    case FilterMethod::C: p = 1; phi_is_sinc = true; break;
    case FilterMethod::E: p = 1; break;
    case FilterMethod::G: p = 2; phi_is_sinc = true; break;
    case FilterMethod::Btilde: p = 0; chi = x <= std::numbers::pi ? 1.0 : 0.0; break;
    default: throw std::invalid_argument("unknown filter method");
  }
  const double sx = sinc(x);
  const double psi1 = chi * std::pow(sx, p);
  switch (kind) {
    case FilterKind::psi: return psi1 * sx;
    case FilterKind::phi: return chi * (phi_is_sinc ? sx : 1.0);
    case FilterKind::psi0: return psi1 * std::cos(x);
    case FilterKind::psi1: return psi1;
  }
  throw std::invalid_argument("unknown filter kind");
}

FilterMethod parse_filter_method(std::string_view name) {
  if (name == "B") return FilterMethod::B;
  if (name == "C") return FilterMethod::C;
  if (name == "E") return FilterMethod::E;
  if (name == "G") return FilterMethod::G;
  if (name == "Btilde") return FilterMethod::Btilde;
  throw std::invalid_argument("unknown filter method '" + std::string(name) + "'");
}

std::string_view to_string(FilterMethod method) {
  switch (method) {
    case FilterMethod::B: return "B";
    case FilterMethod::C: return "C";
    case FilterMethod::E: return "E";
    case FilterMethod::G: return "G";
    case FilterMethod::Btilde: return "Btilde";
  }
  return "?";
}

double helmholtz_inverse_multiplier(double tau, double sigma) {
  if (!(tau >= 0.0)) throw std::invalid_argument("Helmholtz multiplier needs tau >= 0");
  return 1.0 / (1.0 + 0.25 * tau * tau * sigma * sigma);
}

PairState conjugated_derivative(double s, const PairState& state, const NonlinearModel& model) {
  const PairState forward = to_nodal(apply_semigroup(s, to_spectral(state)));
  const PairState h = to_spectral(eval_H(model, forward));
  return apply_semigroup(-s, h);
}

}  // namespace lrkg
