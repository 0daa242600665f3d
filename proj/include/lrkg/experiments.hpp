#pragma once

// Convergence benchmarks: seeded random initial data of prescribed Sobolev
// regularity, well-resolved reference solutions, H^1 x L^2 errors and
// convergence-order estimates.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrkg/integrators.hpp"
#include "lrkg/spectral.hpp"

namespace lrkg {

/// Identifier of the initial-data generator. Changing the draw order or the
/// bit-to-double mapping requires a new version string.
inline constexpr const char* kInitialDataGenerator = "mt19937_64-uniform53/v1";

/// Regularity parameter of the random data: a finite theta >= 0 or the
/// smooth sentinel (exponentially decaying coefficients).
struct Regularity {
  std::optional<double> theta;  // nullopt = smooth

  static Regularity smooth() { return {}; }
  static Regularity sobolev(double theta) { return {theta}; }
  bool is_smooth() const { return !theta.has_value(); }
  std::string label() const;
  friend bool operator==(const Regularity&, const Regularity&) = default;
};

/// u coefficients |k|^-theta xi_k, v coefficients |k|^-(theta-1) eta_k with
/// xi, eta uniform on [-1, 1] drawn from mt19937_64(seed), all u draws (flat
/// index order) before all v draws; each component rescaled to unit L^2
/// norm. The smooth sentinel uses weight e^{-|k|} for both components.
/// Throws std::invalid_argument for theta < 0.
PairState make_initial_data(const Grid& grid, Regularity regularity, std::uint64_t seed);

struct ErrorPair {
  double h1l2 = 0.0;    // ||u - u_ref||_{H^1} + ||v - v_ref||_{L^2}
  double energy = 0.0;  // energy pair norm of the difference
};

/// Both states spectral on the same grid (project first otherwise).
ErrorPair error_pair(const PairState& state, const PairState& reference);

struct ReferenceSpec {
  /// Integrate `scheme` at step `tau`; when `analytic` is set (only valid for
  /// f == 0) the reference is e^{TL} U0 instead.
  SchemeId scheme = SchemeId::Family::corrected_lie;
  double tau = 0.0;
  bool analytic = false;
};

struct ExperimentSpec {
  int dim = 1;
  int n_modes = 1024;
  std::string model = "sine";
  Regularity regularity = Regularity::sobolev(1.0);
  std::uint64_t seed = 7;
  double final_time = 1.0;
  std::vector<double> tau_list;
  std::vector<SchemeId> schemes;
  ReferenceSpec reference;
  int threads = 1;

  /// Default desk-scale benchmark: d=1, N=2^10, tau 2^-4..2^-10, reference
  /// corrected_lie at 2^-14, T=1, the seven-scheme comparison set.
  static ExperimentSpec desk_default();

  /// Aggregated list of every problem; empty when valid.
  std::vector<std::string> problems() const;
  /// Throws std::invalid_argument with all problems joined.
  void validate() const;
};

/// round(T / tau); validate() guarantees this is exact to 1e-12 T.
std::int64_t steps_for(double final_time, double tau);

class ReferenceNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReferenceResult {
  PairState state;
  /// H^1 x L^2 change of the reference when its step is halved (zero for an
  /// analytic reference).
  double tolerance = 0.0;
};

/// Reference state at T. With `check` set, also integrates at tau/2 and
/// records the change as the tolerance.
ReferenceResult reference_solution(const ExperimentSpec& spec, const PairState& state0,
                                   bool check = true);

struct RunRecord {
  std::string scheme;
  double tau = 0.0;
  std::int64_t n_steps = 0;
  double err_pair = 0.0;
  double err_energy = 0.0;
  std::optional<double> local_order;  // against the next larger tau of the same scheme
  double wall_ms = 0.0;
  bool ok = true;
  std::string failure;  // set when !ok
};

struct SchemeFit {
  std::optional<double> order;  // least-squares slope of log err vs log tau
  bool exact = false;           // every error at round-off level
  int points = 0;               // records used in the fit
};

struct SweepResult {
  std::vector<RunRecord> records;  // sorted by (scheme, tau)
  std::map<std::string, SchemeFit> fits;
  double reference_tolerance = 0.0;
  double smallest_error = 0.0;
};

/// Runs every (scheme, tau) pair from the same seeded state against one
/// reference. Throws ReferenceNotConverged when the reference's
/// self-convergence check exceeds 1% of the smallest measured error.
SweepResult convergence_sweep(const ExperimentSpec& spec);

/// Least-squares slope of log(err) against log(tau) for records with
/// err > floor; nullopt when fewer than two qualify.
std::optional<double> fit_order(const std::vector<RunRecord>& records, double floor);

struct SpatialSpec {
  int dim = 1;
  std::vector<int> n_list;
  int n_reference = 4096;
  std::string model = "sine";
  Regularity regularity = Regularity::sobolev(1.0);
  std::uint64_t seed = 7;
  double final_time = 1.0;
  double tau = 1.0 / 4096.0;
  SchemeId scheme = SchemeId::Family::corrected_lie;
  int threads = 1;
};

struct SpatialRecord {
  int n_modes = 0;
  double err_pair = 0.0;
  double err_energy = 0.0;
  double wall_ms = 0.0;
};

struct SpatialResult {
  std::vector<SpatialRecord> records;  // increasing n_modes
  std::optional<double> decay_rate;    // -slope of log err vs log N
  bool monotone = false;
};

/// Draws data on the reference grid, projects it to each N, and measures the
/// error of the N-mode solution against the projected reference solution.
SpatialResult spatial_sweep(const SpatialSpec& spec);

}  // namespace lrkg
