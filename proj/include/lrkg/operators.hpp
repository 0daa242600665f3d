#pragma once

// Functions of the wave operator L = [0 1; Laplacian 0] evaluated exactly
// per sine mode. On mode k the Laplacian acts as -sigma_k^2, so L restricts
// to J_sigma = [0 1; -sigma^2 0] with J_sigma^2 = -sigma^2 I, and every
// function g(J_sigma) is Re g(i sigma) I + Im g(i sigma) / sigma J_sigma.

#include <span>
#include <string_view>

#include "lrkg/spectral.hpp"

namespace lrkg {

class NonlinearModel;

/// Crossover below which sinc-like and phi_2 kernels switch to Taylor series.
inline constexpr double kSeriesSwitch = 1e-2;

struct ModeBlock {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;

  static constexpr ModeBlock identity() { return {}; }
  double determinant() const { return a11 * a22 - a12 * a21; }

  friend ModeBlock operator*(const ModeBlock& x, const ModeBlock& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
  friend ModeBlock operator+(const ModeBlock& x, const ModeBlock& y) {
    return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
  }
  friend ModeBlock operator-(const ModeBlock& x, const ModeBlock& y) {
    return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
  }
  friend ModeBlock operator*(double s, const ModeBlock& x) {
    return {s * x.a11, s * x.a12, s * x.a21, s * x.a22};
  }
  friend bool operator==(const ModeBlock&, const ModeBlock&) = default;
};

/// sigma = pi |k|, the symbol of sqrt(-Laplacian) on mode k.
class FrequencySymbol {
 public:
  /// Throws std::invalid_argument unless sigma > 0 and finite.
  explicit FrequencySymbol(double sigma);
  double value() const { return sigma_; }

 private:
  double sigma_;
};

// Scalar kernels, accurate to a few ulps on the whole real line.
double sinc(double x);
/// 1 - cos(x), free of cancellation.
double one_minus_cos(double x);
/// x - sin(x), free of cancellation.
double x_minus_sin(double x);
/// sinc(x) - cos(x), free of cancellation.
double sinc_minus_cos(double x);

/// e^{tL} on one mode: [cos(t s), t sinc(t s); -s sin(t s), cos(t s)].
ModeBlock semigroup_block(double t, FrequencySymbol sigma);

/// phi_2(-2 tau L) = alpha I + beta J_sigma with x = 2 tau sigma,
/// alpha = (1 - cos x) / x^2, beta = -(x - sin x) / (x^2 sigma).
ModeBlock phi2_block(double tau, FrequencySymbol sigma);

/// The low-regularity correction tau^2 e^{tau L} phi_2(-2 tau L).
ModeBlock correction_block(double tau, FrequencySymbol sigma);

/// Same operator written as (2L)^{-1} [tau e^{tau L} - (2L)^{-1}(e^{tau L} - e^{-tau L})].
/// Kept as an independent algebraic route for cross-checking.
ModeBlock correction_block_resolvent_form(double tau, FrequencySymbol sigma);

/// Applies blocks[k] to (u_k, v_k) for every mode. Throws on size mismatch or
/// a state that is not in spectral representation.
PairState apply_block_operator(std::span<const ModeBlock> blocks, const PairState& state);

/// e^{tL} state.
PairState apply_semigroup(double t, const PairState& state);

enum class FilterKind { psi, phi, psi0, psi1 };
enum class FilterMethod { B, C, E, G, Btilde };

/// Filter value at x = tau sigma >= 0 for the trigonometric integrator family.
/// psi1 = psi / sinc and psi0 = cos psi1, so every method is symmetric.
double filter_multiplier(FilterKind kind, FilterMethod method, double x);

FilterMethod parse_filter_method(std::string_view name);
std::string_view to_string(FilterMethod method);

/// Symbol 1 / (1 + tau^2 sigma^2 / 4) of (1 - tau^2/4 Laplacian)^{-1}.
double helmholtz_inverse_multiplier(double tau, double sigma);

/// d/ds e^{-sL} F(e^{sL} W) = e^{-sL} (-f(u~), f'(u~) v~) with (u~, v~) = e^{sL} W,
/// nonlinear terms collocated at the grid nodes.
PairState conjugated_derivative(double s, const PairState& state, const NonlinearModel& model);

}  // namespace lrkg
