#pragma once

// Command-line driver: single runs, convergence sweeps, scheme comparisons
// and spatial sweeps with CSV/JSON output.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lrkg/experiments.hpp"

namespace lrkg::cli {

/// Bumped whenever a column or JSON field changes meaning.
inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kCsvHeader =
    "scheme,tau,n_steps,err_h1l2,err_energy,local_order,wall_ms";

enum class ExitCode : int { ok = 0, invalid_config = 1, blowup = 2, reference_not_converged = 3 };

/// %.17g; round-trips every finite double.
std::string format_real(double x);

/// Schema comment line, header, one row per record.
void write_sweep_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Thread count from LRKG_THREADS, else hardware concurrency (at least 1).
int default_threads();

/// Runs the driver on argv (argv[0] is the program name). Results go to
/// `out` unless --out is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lrkg::cli
