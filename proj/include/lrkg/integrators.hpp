#pragma once

// One-step time integrators for the semilinear Klein-Gordon system
//   U' = L U + F(U),  U = (u, u_t),  F(U) = (0, f(u)),
// on a sine-spectral grid. Every scheme maps a spectral PairState to the
// spectral PairState one step later; nonlinear terms are collocated.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lrkg/nonlinearity.hpp"
#include "lrkg/operators.hpp"
#include "lrkg/spectral.hpp"

namespace lrkg {

class SchemeId {
 public:
  enum class Family { corrected_lie, lie, strang, rs21, hl21, trig };

  constexpr SchemeId(Family family, FilterMethod filter = FilterMethod::B)
      : family_(family), filter_(filter) {}

  static constexpr SchemeId trig(FilterMethod filter) { return {Family::trig, filter}; }

  /// Accepts the canonical names from name() plus the aliases ss68
  /// (strang), c_lie (corrected_lie), d79 (trig_B) and g15 (trig_Btilde).
  static SchemeId parse(std::string_view name);
  /// All ten schemes (five trigonometric filters).
  static std::vector<SchemeId> catalog();
  /// The seven-scheme comparison set: corrected_lie, lie, strang, rs21,
  /// hl21, d79, g15.
  static std::vector<SchemeId> comparison_set();

  Family family() const { return family_; }
  FilterMethod filter() const { return filter_; }

  /// corrected_lie, lie, strang, rs21, hl21, trig_B, trig_C, trig_E, trig_G, trig_Btilde.
  std::string name() const;
  /// Sine transforms (forward plus inverse) per step on a grid.
  int transforms_per_step() const;

  friend bool operator==(SchemeId a, SchemeId b) {
    return a.family_ == b.family_ && (a.family_ != Family::trig || a.filter_ == b.filter_);
  }

 private:
  Family family_;
  FilterMethod filter_;
};

/// Immutable per-(grid, tau, scheme) tables shared by every step.
class StepContext {
 public:
  /// Throws std::invalid_argument unless tau > 0 and finite.
  StepContext(SchemeId scheme, Grid grid, double tau, NonlinearModel model);

  SchemeId scheme() const { return scheme_; }
  const Grid& grid() const { return grid_; }
  double tau() const { return tau_; }
  const NonlinearModel& model() const { return model_; }

  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<ModeBlock>& semigroup() const { return semigroup_; }
  const std::vector<ModeBlock>& half_semigroup() const { return half_semigroup_; }
  const std::vector<ModeBlock>& correction() const { return correction_; }
  const std::vector<double>& helmholtz() const { return helmholtz_; }
  const std::vector<double>& filter(FilterKind kind) const;

 private:
  SchemeId scheme_;
  Grid grid_;
  double tau_;
  NonlinearModel model_;
  std::vector<double> sigma_;
  std::vector<ModeBlock> semigroup_;
  std::vector<ModeBlock> half_semigroup_;
  std::vector<ModeBlock> correction_;
  std::vector<double> helmholtz_;
  std::vector<double> psi_, phi_, psi0_, psi1_;
};

PairState step_corrected_lie(const StepContext& ctx, const PairState& state);
PairState step_lie(const StepContext& ctx, const PairState& state);
PairState step_strang(const StepContext& ctx, const PairState& state);
PairState step_rs21(const StepContext& ctx, const PairState& state);
PairState step_hl21(const StepContext& ctx, const PairState& state);
PairState step_trig(const StepContext& ctx, const PairState& state);

/// The term tau^2 e^{tau L} phi_2(-2 tau L) I_N H(U) that corrected_lie adds
/// to the Lie step.
PairState correction_term(const StepContext& ctx, const PairState& state);

/// Dispatches on ctx.scheme().
PairState step(const StepContext& ctx, const PairState& state);

class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(std::int64_t step_index, double norm);
  std::int64_t step_index() const { return step_index_; }
  double norm() const { return norm_; }

 private:
  std::int64_t step_index_;
  double norm_;
};

struct Trajectory {
  PairState final_state;
  /// (step index, state) for every requested index, in increasing order.
  std::vector<std::pair<std::int64_t, PairState>> snapshots;
};

/// Takes n_steps steps from state0 (spectral). Throws NumericalBlowup when a
/// state stops being finite.
PairState integrate(const StepContext& ctx, const PairState& state0, std::int64_t n_steps);

Trajectory integrate(const StepContext& ctx, const PairState& state0, std::int64_t n_steps,
                     const std::vector<std::int64_t>& record_at);

}  // namespace lrkg
