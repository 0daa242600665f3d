#include "lrkg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace lrkg {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Uniform double on [-1, 1) from the top 53 bits of one 64-bit draw.
double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

void normalize(std::vector<double>& c) {
  double sum = 0.0;
  for (double x : c) sum += x * x;
  const double norm = std::sqrt(sum);
  if (norm > 0.0) {
    for (double& x : c) x /= norm;
  }
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

std::string Regularity::label() const {
  if (is_smooth()) return "smooth";
  std::ostringstream out;
  out << *theta;
  return out.str();
}

PairState make_initial_data(const Grid& grid, Regularity regularity, std::uint64_t seed) {
  if (!regularity.is_smooth() && !(*regularity.theta >= 0.0 && std::isfinite(*regularity.theta))) {
    throw std::invalid_argument("regularity theta must be finite and nonnegative");
  }
  std::mt19937_64 rng(seed);
  const std::size_t n = grid.size();
  std::vector<double> kabs(n);
  for (std::size_t i = 0; i < n; ++i) {
    double k2 = 0.0;
    for (int k : grid.wavenumbers(i)) k2 += static_cast<double>(k) * k;
    kabs[i] = std::sqrt(k2);
  }
  auto weight_u = [&](std::size_t i) {
    return regularity.is_smooth() ? std::exp(-kabs[i]) : std::pow(kabs[i], -(*regularity.theta));
  };
  auto weight_v = [&](std::size_t i) {
    return regularity.is_smooth() ? std::exp(-kabs[i])
                                  : std::pow(kabs[i], -(*regularity.theta - 1.0));
  };
  PairState state = PairState::zeros(grid, Representation::spectral);
  for (std::size_t i = 0; i < n; ++i) state.u[i] = weight_u(i) * uniform_pm1(rng);
  for (std::size_t i = 0; i < n; ++i) state.v[i] = weight_v(i) * uniform_pm1(rng);
  normalize(state.u);
  normalize(state.v);
  return state;
}

ErrorPair error_pair(const PairState& state, const PairState& reference) {
  if (state.representation != Representation::spectral ||
      reference.representation != Representation::spectral) {
    throw std::invalid_argument("error_pair compares spectral pair states");
  }
  if (!(state.grid == reference.grid)) {
    throw std::invalid_argument("error_pair needs states on the same grid; project first");
  }
  PairState diff = PairState::zeros(state.grid, Representation::spectral);
  for (std::size_t k = 0; k < diff.u.size(); ++k) {
    diff.u[k] = state.u[k] - reference.u[k];
    diff.v[k] = state.v[k] - reference.v[k];
  }
  return {sobolev_norm(diff.u_field(), 1.0) + sobolev_norm(diff.v_field(), 0.0),
          pair_norm(diff, PairNorm::energy)};
}

ExperimentSpec ExperimentSpec::desk_default() {
  ExperimentSpec spec;
  for (int e = 4; e <= 10; ++e) spec.tau_list.push_back(std::ldexp(1.0, -e));
  spec.schemes = SchemeId::comparison_set();
  spec.reference.tau = std::ldexp(1.0, -14);
  return spec;
}

std::int64_t steps_for(double final_time, double tau) {
  return static_cast<std::int64_t>(std::llround(final_time / tau));
}

std::vector<std::string> ExperimentSpec::problems() const {
  std::vector<std::string> out;
  if (dim < 1 || dim > 3) out.push_back("d must be 1, 2 or 3");
  if (n_modes < 2) out.push_back("N must be at least 2");
  try {
    (void)NonlinearModel::by_name(model);
  } catch (const std::invalid_argument& e) {
    out.push_back(e.what());
  }
  if (!regularity.is_smooth() && !(*regularity.theta >= 0.0 && std::isfinite(*regularity.theta))) {
    out.push_back("theta must be a nonnegative number or \"smooth\"");
  }
  if (!(final_time > 0.0) || !std::isfinite(final_time)) out.push_back("T must be positive");
  if (threads < 1) out.push_back("threads must be at least 1");
  if (schemes.empty()) out.push_back("at least one scheme is required");
  if (tau_list.empty()) out.push_back("tau list is empty");
  auto check_tau = [&](double tau, const std::string& what) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      out.push_back(what + " " + format_double(tau) + " must be positive");
      return;
    }
    if (final_time > 0.0 && std::isfinite(final_time)) {
      const auto n = steps_for(final_time, tau);
      if (n < 1 || std::abs(static_cast<double>(n) * tau - final_time) >= 1e-12 * final_time) {
        out.push_back(what + " " + format_double(tau) + " does not divide T = " +
                      format_double(final_time));
      }
    }
  };
  for (double tau : tau_list) check_tau(tau, "tau");
  if (!reference.analytic) {
    check_tau(reference.tau, "reference tau");
    double smallest = std::numeric_limits<double>::infinity();
    for (double tau : tau_list) {
      if (tau > 0.0) smallest = std::min(smallest, tau);
    }
    if (std::isfinite(smallest) && reference.tau > 0.0) {
      if (reference.tau > smallest / 16.0) {
        out.push_back("reference tau must be at most min(tau list) / 16");
      }
    }
  } else if (model != "zero") {
    out.push_back("an analytic reference requires the zero nonlinearity");
  }
  return out;
}

void ExperimentSpec::validate() const {
  const auto issues = problems();
  if (issues.empty()) return;
  std::string message = "invalid experiment:";
  for (const auto& issue : issues) message += "\n  - " + issue;
  throw std::invalid_argument(message);
}

ReferenceResult reference_solution(const ExperimentSpec& spec, const PairState& state0,
                                   bool check) {
  const auto model = NonlinearModel::by_name(spec.model);
  if (spec.reference.analytic) {
    if (!model.is_zero()) throw std::invalid_argument("analytic reference requires f == 0");
    return {apply_semigroup(spec.final_time, to_spectral(state0)), 0.0};
  }
  const double tau = spec.reference.tau;
  const Grid grid = state0.grid;
  std::vector<PairState> results(check ? 2 : 1, PairState::zeros(grid, Representation::spectral));
  parallel_for(results.size(), spec.threads, [&](std::size_t i) {
    const double h = i == 0 ? tau : 0.5 * tau;
    StepContext ctx(spec.reference.scheme, grid, h, model);
    results[i] = integrate(ctx, state0, steps_for(spec.final_time, h));
  });
  ReferenceResult out{results[0], 0.0};
  if (check) out.tolerance = error_pair(results[0], results[1]).h1l2;
  return out;
}

std::optional<double> fit_order(const std::vector<RunRecord>& records, double floor) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (r.ok && r.err_pair > floor && r.err_pair > 0.0) {
      pts.emplace_back(std::log(r.tau), std::log(r.err_pair));
    }
  }
  if (pts.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

SweepResult convergence_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const Grid grid(spec.dim, spec.n_modes);
  const auto model = NonlinearModel::by_name(spec.model);
  const PairState state0 = make_initial_data(grid, spec.regularity, spec.seed);
  const ReferenceResult reference = reference_solution(spec, state0);

  struct Task {
    SchemeId scheme;
    double tau;
  };
  std::vector<Task> tasks;
  for (const auto& scheme : spec.schemes) {
    for (double tau : spec.tau_list) tasks.push_back({scheme, tau});
  }
  std::vector<RunRecord> records(tasks.size());
  parallel_for(tasks.size(), spec.threads, [&](std::size_t i) {
    const auto& task = tasks[i];
    RunRecord& rec = records[i];
    rec.scheme = task.scheme.name();
    rec.tau = task.tau;
    rec.n_steps = steps_for(spec.final_time, task.tau);
    const auto start = std::chrono::steady_clock::now();
    try {
      StepContext ctx(task.scheme, grid, task.tau, model);
      const PairState final_state = integrate(ctx, state0, rec.n_steps);
      const ErrorPair err = error_pair(final_state, reference.state);
      rec.err_pair = err.h1l2;
      rec.err_energy = err.energy;
      if (!std::isfinite(rec.err_pair) || !std::isfinite(rec.err_energy)) {
        throw NumericalBlowup(rec.n_steps, rec.err_pair);
      }
    } catch (const NumericalBlowup& e) {
      rec.ok = false;
      rec.failure = e.what();
      rec.err_pair = std::numeric_limits<double>::quiet_NaN();
      rec.err_energy = std::numeric_limits<double>::quiet_NaN();
    }
    rec.wall_ms = elapsed_ms(start);
  });

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.scheme != b.scheme ? a.scheme < b.scheme : a.tau < b.tau;
  });

  SweepResult result;
  result.reference_tolerance = reference.tolerance;
  result.smallest_error = std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, pair_norm(state0, PairNorm::level1));
  const double roundoff = 1e-10 * scale;
  for (const auto& r : records) {
    if (r.ok) result.smallest_error = std::min(result.smallest_error, r.err_pair);
  }

  // Local orders between consecutive step sizes of one scheme.
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    auto& fine = records[i];
    const auto& coarse = records[i + 1];
    if (fine.scheme != coarse.scheme || !fine.ok || !coarse.ok) continue;
    if (fine.err_pair > 0.0 && coarse.err_pair > 0.0) {
      fine.local_order = std::log(coarse.err_pair / fine.err_pair) / std::log(coarse.tau / fine.tau);
    }
  }

  const bool all_roundoff = std::all_of(records.begin(), records.end(), [&](const RunRecord& r) {
    return r.ok && r.err_pair <= roundoff;
  });
  if (!all_roundoff && reference.tolerance > 0.01 * result.smallest_error) {
    std::ostringstream msg;
    msg << "reference not converged: halving the reference step changes it by "
        << reference.tolerance << ", more than 1% of the smallest measured error "
        << result.smallest_error;
    throw ReferenceNotConverged(msg.str());
  }

  for (const auto& scheme : spec.schemes) {
    std::vector<RunRecord> mine;
    for (const auto& r : records) {
      if (r.scheme == scheme.name()) mine.push_back(r);
    }
    SchemeFit fit;
    fit.exact = std::all_of(mine.begin(), mine.end(),
                            [&](const RunRecord& r) { return r.ok && r.err_pair <= roundoff; });
    const double floor = std::max(10.0 * reference.tolerance, fit.exact ? roundoff : 0.0);
    for (const auto& r : mine) {
      if (r.ok && r.err_pair > floor) ++fit.points;
    }
    if (!fit.exact) fit.order = fit_order(mine, floor);
    result.fits[scheme.name()] = fit;
  }
  result.records = std::move(records);
  return result;
}

SpatialResult spatial_sweep(const SpatialSpec& spec) {
  if (spec.n_list.empty()) throw std::invalid_argument("spatial sweep needs at least one N");
  for (int n : spec.n_list) {
    if (n < 2 || n >= spec.n_reference) {
      throw std::invalid_argument("every N must satisfy 2 <= N < reference N");
    }
  }
  if (!(spec.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const auto n_steps = steps_for(spec.final_time, spec.tau);
  if (n_steps < 1 ||
      std::abs(static_cast<double>(n_steps) * spec.tau - spec.final_time) >= 1e-12 * spec.final_time) {
    throw std::invalid_argument("tau does not divide T");
  }
  const auto model = NonlinearModel::by_name(spec.model);
  const Grid ref_grid(spec.dim, spec.n_reference);
  const PairState data = make_initial_data(ref_grid, spec.regularity, spec.seed);

  std::vector<int> sizes = spec.n_list;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  // Slot 0 is the reference run.
  std::vector<PairState> finals(sizes.size() + 1, PairState::zeros(ref_grid, Representation::spectral));
  std::vector<double> wall(sizes.size() + 1, 0.0);
  parallel_for(finals.size(), spec.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const PairState init = i == 0 ? data : project(data, sizes[i - 1]);
    StepContext ctx(spec.scheme, init.grid, spec.tau, model);
    finals[i] = integrate(ctx, init, n_steps);
    wall[i] = elapsed_ms(start);
  });

  SpatialResult result;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const ErrorPair err = error_pair(finals[i + 1], project(finals[0], sizes[i]));
    result.records.push_back({sizes[i], err.h1l2, err.energy, wall[i + 1]});
  }
  result.monotone = true;
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    if (!(result.records[i].err_pair < result.records[i - 1].err_pair)) result.monotone = false;
  }
  if (result.records.size() >= 2) {
    std::vector<RunRecord> as_runs;
    for (const auto& r : result.records) {
      RunRecord run;
      run.tau = static_cast<double>(r.n_modes);
      run.err_pair = r.err_pair;
      as_runs.push_back(run);
    }
    if (auto slope = fit_order(as_runs, 0.0)) result.decay_rate = -*slope;
  }
  return result;
}

}  // namespace lrkg
