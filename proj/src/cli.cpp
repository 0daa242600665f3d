#include "lrkg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace lrkg::cli {

using nlohmann::json;

namespace {

struct Options {
  std::vector<std::string> schemes;
  std::string model = "sine";
  std::string theta = "1";
  std::uint64_t seed = 7;
  int n_modes = 1024;
  int dim = 1;
  std::string tau;
  std::vector<std::string> tau_list;
  double final_time = 1.0;
  std::string reference_tau;
  bool reference = false;
  std::string out;
  std::string format;
  int threads = 0;
  std::string plot_data;
  std::string config;
  std::vector<int> n_list;
  int n_reference = 4096;
  std::int64_t snapshot_every = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts plain numbers and powers of two written as 2^-k.
std::optional<double> parse_step(const std::string& text) {
  if (text.rfind("2^", 0) == 0) {
    try {
      std::size_t used = 0;
      const int e = std::stoi(text.substr(2), &used);
      if (used + 2 == text.size()) return std::ldexp(1.0, e);
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::optional<Regularity> parse_theta(const std::string& text) {
  if (text == "smooth") return Regularity::smooth();
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size() && std::isfinite(x) && x >= 0.0) return Regularity::sobolev(x);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::string json_scalar_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return format_real(value.get<double>());
  throw ConfigError("expected a number or string, got " + value.dump());
}

/// Fills every option the command line left unset from the JSON config.
void merge_config(const std::string& path, CLI::App& sub, Options& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");

  auto unset = [&](const std::string& flag) {
    auto* opt = sub.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  using Setter = std::function<void(const json&)>;
  const std::vector<std::tuple<std::string, std::string, Setter>> fields = {
      {"scheme", "--scheme",
       [&](const json& v) {
         o.schemes.clear();
         if (v.is_array()) {
           for (const auto& s : v) o.schemes.push_back(s.get<std::string>());
         } else {
           o.schemes.push_back(v.get<std::string>());
         }
       }},
      {"schemes", "--scheme",
       [&](const json& v) { o.schemes = v.get<std::vector<std::string>>(); }},
      {"f", "--f", [&](const json& v) { o.model = v.get<std::string>(); }},
      {"theta", "--theta", [&](const json& v) { o.theta = json_scalar_text(v); }},
      {"seed", "--seed", [&](const json& v) { o.seed = v.get<std::uint64_t>(); }},
      {"N", "--N", [&](const json& v) { o.n_modes = v.get<int>(); }},
      {"d", "--d", [&](const json& v) { o.dim = v.get<int>(); }},
      {"tau", "--tau", [&](const json& v) { o.tau = json_scalar_text(v); }},
      {"tau_list", "--tau-list",
       [&](const json& v) {
         o.tau_list.clear();
         for (const auto& t : v) o.tau_list.push_back(json_scalar_text(t));
       }},
      {"T", "--T", [&](const json& v) { o.final_time = v.get<double>(); }},
      {"reference_tau", "--reference-tau", [&](const json& v) { o.reference_tau = json_scalar_text(v); }},
      {"reference", "--reference", [&](const json& v) { o.reference = v.get<bool>(); }},
      {"out", "--out", [&](const json& v) { o.out = v.get<std::string>(); }},
      {"format", "--format", [&](const json& v) { o.format = v.get<std::string>(); }},
      {"threads", "--threads", [&](const json& v) { o.threads = v.get<int>(); }},
      {"plot_data", "--plot-data", [&](const json& v) { o.plot_data = v.get<std::string>(); }},
      {"N_list", "--N-list", [&](const json& v) { o.n_list = v.get<std::vector<int>>(); }},
      {"N_reference", "--N-ref", [&](const json& v) { o.n_reference = v.get<int>(); }},
      {"snapshot_every", "--snapshot-every",
       [&](const json& v) { o.snapshot_every = v.get<std::int64_t>(); }},
  };
  std::vector<std::string> problems;
  for (const auto& [key, value] : doc.items()) {
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const auto& f) { return std::get<0>(f) == key; });
    if (it == fields.end()) {
      problems.push_back("unknown config key '" + key + "'");
      continue;
    }
    if (!unset(std::get<1>(*it))) continue;
    try {
      std::get<2>(*it)(value);
    } catch (const std::exception& e) {
      problems.push_back("config key '" + key + "': " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config file:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

enum class Format { csv, json, both };

struct Common {
  Format format = Format::csv;
  int threads = 1;
  NonlinearModel model = NonlinearModel::zero();
  Regularity regularity;
  std::vector<SchemeId> schemes;
};

/// Validation shared by every command; appends to `problems`.
Common resolve_common(const Options& o, Format default_format, std::vector<std::string>& problems) {
  Common c;
  if (o.format.empty()) {
    c.format = default_format;
  } else if (o.format == "csv") {
    c.format = Format::csv;
  } else if (o.format == "json") {
    c.format = Format::json;
  } else if (o.format == "both") {
    c.format = Format::both;
  } else {
    problems.push_back("format must be csv, json or both");
  }
  c.threads = o.threads > 0 ? o.threads : default_threads();
  if (o.threads < 0) problems.push_back("threads must be positive");
  try {
    c.model = NonlinearModel::by_name(o.model);
  } catch (const std::invalid_argument& e) {
    problems.push_back(e.what());
  }
  if (auto r = parse_theta(o.theta)) {
    c.regularity = *r;
  } else {
    problems.push_back("theta must be a nonnegative number or \"smooth\", got '" + o.theta + "'");
  }
  for (const auto& name : o.schemes) {
    try {
      c.schemes.push_back(SchemeId::parse(name));
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
  }
  if (o.dim < 1 || o.dim > 3) problems.push_back("d must be 1, 2 or 3");
  if (o.n_modes < 2) problems.push_back("N must be at least 2");
  if (!(o.final_time > 0.0) || !std::isfinite(o.final_time)) problems.push_back("T must be positive");
  if (o.snapshot_every < 0) problems.push_back("snapshot-every must be nonnegative");
  return c;
}

std::optional<double> resolve_step(const std::string& text, const std::string& what,
                                   std::vector<std::string>& problems) {
  if (text.empty()) return std::nullopt;
  auto tau = parse_step(text);
  if (!tau) {
    problems.push_back(what + " '" + text + "' is not a number");
  } else if (!(*tau > 0.0) || !std::isfinite(*tau)) {
    problems.push_back(what + " must be positive, got " + text);
    return std::nullopt;
  }
  return tau;
}

void fail_if(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += "\n  - " + p;
  throw ConfigError(msg);
}

std::string csv_comment(std::string_view kind) {
  return "# schema=lrkg-" + std::string(kind) + "-csv/" + std::to_string(kSchemaVersion);
}

json nullable(std::optional<double> x) { return x ? json(*x) : json(nullptr); }
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json records_json(const std::vector<RunRecord>& records) {
  json rows = json::array();
  for (const auto& r : records) {
    json row = {{"scheme", r.scheme},
                {"tau", r.tau},
                {"n_steps", r.n_steps},
                {"err_h1l2", finite_or_null(r.err_pair)},
                {"err_energy", finite_or_null(r.err_energy)},
                {"local_order", nullable(r.local_order)},
                {"wall_ms", r.wall_ms},
                {"ok", r.ok}};
    if (!r.ok) row["failure"] = r.failure;
    rows.push_back(row);
  }
  return rows;
}

json sweep_json(const SweepResult& sweep) {
  json fits = json::object();
  for (const auto& [name, fit] : sweep.fits) {
    fits[name] = {{"order", nullable(fit.order)}, {"exact", fit.exact}, {"points", fit.points}};
  }
  return {{"reference_tolerance", sweep.reference_tolerance},
          {"smallest_error", finite_or_null(sweep.smallest_error)},
          {"fits", fits},
          {"records", records_json(sweep.records)}};
}

json spec_json(const ExperimentSpec& spec) {
  json schemes = json::array();
  for (const auto& s : spec.schemes) schemes.push_back(s.name());
  return {{"d", spec.dim},
          {"N", spec.n_modes},
          {"f", spec.model},
          {"theta", spec.regularity.label()},
          {"seed", spec.seed},
          {"T", spec.final_time},
          {"tau_list", spec.tau_list},
          {"schemes", schemes},
          {"reference",
           spec.reference.analytic
               ? json{{"analytic", true}}
               : json{{"scheme", spec.reference.scheme.name()}, {"tau", spec.reference.tau}}},
          {"initial_data_generator", kInitialDataGenerator}};
}

json document(std::string_view command) {
  return {{"schema", "lrkg-" + std::string(command) + "/" + std::to_string(kSchemaVersion)},
          {"command", command}};
}

/// Writes `text` to path, or to `out` when path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) throw std::runtime_error("cannot write '" + path + "'");
}

void emit_outputs(const Options& o, Format format, const std::string& csv, const json& doc,
                  std::ostream& out) {
  const bool want_csv = format != Format::json;
  const bool want_json = format != Format::csv;
  if (want_csv) emit(o.out.empty() ? "" : o.out + ".csv", csv, out);
  if (want_json) emit(o.out.empty() ? "" : o.out + ".json", doc.dump(2) + "\n", out);
}

/// Two-column gnuplot files: one per scheme (and per section when given).
void write_plot_data(const std::string& dir, const std::string& prefix,
                     const std::vector<RunRecord>& records, bool with_work) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const RunRecord*>> by_scheme;
  for (const auto& r : records) by_scheme[r.scheme].push_back(&r);
  for (const auto& [scheme, rows] : by_scheme) {
    std::ostringstream err, work;
    err << "# tau err_h1l2\n";
    work << "# work err_h1l2  (work = steps x sine transforms per step)\n";
    const int per_step = SchemeId::parse(scheme).transforms_per_step();
    for (const auto* r : rows) {
      if (!r->ok) continue;
      err << format_real(r->tau) << ' ' << format_real(r->err_pair) << '\n';
      work << r->n_steps * per_step << ' ' << format_real(r->err_pair) << '\n';
    }
    const auto base = std::filesystem::path(dir) / (prefix + scheme);
    std::ofstream(base.string() + ".dat") << err.str();
    if (with_work) std::ofstream(base.string() + "_work.dat") << work.str();
  }
}

std::vector<double> resolve_tau_list(const Options& o, std::vector<std::string>& problems) {
  std::vector<double> taus;
  if (o.tau_list.empty()) {
    for (int e = 4; e <= 10; ++e) taus.push_back(std::ldexp(1.0, -e));
    return taus;
  }
  for (const auto& text : o.tau_list) {
    if (auto t = resolve_step(text, "tau", problems)) taus.push_back(*t);
  }
  return taus;
}

ExperimentSpec build_sweep_spec(const Options& o, const Common& c, Regularity regularity,
                                std::vector<SchemeId> default_schemes,
                                std::vector<std::string>& problems) {
  ExperimentSpec spec;
  spec.dim = o.dim;
  spec.n_modes = o.n_modes;
  spec.model = o.model;
  spec.regularity = regularity;
  spec.seed = o.seed;
  spec.final_time = o.final_time;
  spec.threads = c.threads;
  spec.schemes = c.schemes.empty() ? std::move(default_schemes) : c.schemes;
  spec.tau_list = resolve_tau_list(o, problems);
  const auto ref = resolve_step(o.reference_tau, "reference tau", problems);
  if (ref) {
    spec.reference.tau = *ref;
  } else if (c.model.is_zero()) {
    spec.reference.analytic = true;
  } else if (!spec.tau_list.empty()) {
    const double smallest = *std::min_element(spec.tau_list.begin(), spec.tau_list.end());
    spec.reference.tau = std::min(std::ldexp(1.0, -14), smallest / 16.0);
  }
  return spec;
}

std::string sweep_csv(const std::vector<RunRecord>& records) {
  std::ostringstream csv;
  write_sweep_csv(csv, records);
  return csv.str();
}

void report_failures(const std::vector<RunRecord>& records, std::ostream& err) {
  for (const auto& r : records) {
    if (!r.ok) err << "run failed: " << r.scheme << " tau=" << format_real(r.tau) << ": " << r.failure << '\n';
  }
}

int cmd_convergence(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems;
  const Common c = resolve_common(o, Format::csv, problems);
  auto spec = build_sweep_spec(o, c, c.regularity, SchemeId::comparison_set(), problems);
  fail_if(problems);
  for (const auto& p : spec.problems()) problems.push_back(p);
  fail_if(problems);

  const SweepResult sweep = convergence_sweep(spec);
  report_failures(sweep.records, err);
  json doc = document("convergence");
  doc["spec"] = spec_json(spec);
  doc.update(sweep_json(sweep));
  emit_outputs(o, c.format, csv_comment("sweep") + "\n" + sweep_csv(sweep.records), doc, out);
  if (!o.plot_data.empty()) write_plot_data(o.plot_data, "", sweep.records, false);
  for (const auto& [name, fit] : sweep.fits) {
    err << name << ": order " << (fit.exact ? "exact" : fit.order ? format_real(*fit.order) : "n/a") << '\n';
  }
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems;
  const Common c = resolve_common(o, Format::csv, problems);
  fail_if(problems);
  Regularity rough = c.regularity.is_smooth() ? Regularity::sobolev(1.0) : c.regularity;
  const std::vector<std::pair<std::string, Regularity>> sections = {
      {"theta=smooth", Regularity::smooth()}, {"theta=" + rough.label(), rough}};

  std::ostringstream csv;
  csv << csv_comment("compare") << "\nsection,scheme,tau,n_steps,work,err_h1l2,err_energy,local_order,wall_ms\n";
  json doc = document("compare");
  doc["sections"] = json::array();
  for (const auto& [label, regularity] : sections) {
    auto spec = build_sweep_spec(o, c, regularity, SchemeId::catalog(), problems);
    for (const auto& p : spec.problems()) problems.push_back(p);
    fail_if(problems);
    const SweepResult sweep = convergence_sweep(spec);
    report_failures(sweep.records, err);
    for (const auto& r : sweep.records) {
      const auto work = r.n_steps * SchemeId::parse(r.scheme).transforms_per_step();
      csv << label << ',' << r.scheme << ',' << format_real(r.tau) << ',' << r.n_steps << ',' << work << ','
          << format_real(r.err_pair) << ',' << format_real(r.err_energy) << ','
          << (r.local_order ? format_real(*r.local_order) : "") << ',' << format_real(r.wall_ms) << '\n';
    }
    json section = sweep_json(sweep);
    section["label"] = label;
    section["spec"] = spec_json(spec);
    for (auto& row : section["records"]) {
      row["work"] = row["n_steps"].get<std::int64_t>() *
                    SchemeId::parse(row["scheme"].get<std::string>()).transforms_per_step();
    }
    doc["sections"].push_back(section);
    if (!o.plot_data.empty()) {
      write_plot_data(o.plot_data, label.substr(std::string("theta=").size()) + "_", sweep.records, true);
    }
  }
  emit_outputs(o, c.format, csv.str(), doc, out);
  return 0;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream&) {
  std::vector<std::string> problems;
  const Common c = resolve_common(o, Format::json, problems);
  if (c.schemes.size() > 1) problems.push_back("run takes exactly one scheme");
  const SchemeId scheme = c.schemes.empty() ? SchemeId(SchemeId::Family::corrected_lie) : c.schemes.front();
  std::optional<double> tau;
  if (o.tau.empty()) {
    problems.push_back("run needs --tau");
  } else {
    tau = resolve_step(o.tau, "tau", problems);
  }
  fail_if(problems);

  ExperimentSpec spec;
  spec.dim = o.dim;
  spec.n_modes = o.n_modes;
  spec.model = o.model;
  spec.regularity = c.regularity;
  spec.seed = o.seed;
  spec.final_time = o.final_time;
  spec.threads = c.threads;
  spec.schemes = {scheme};
  spec.tau_list = {*tau};
  if (auto ref = resolve_step(o.reference_tau, "reference tau", problems)) {
    spec.reference.tau = *ref;
  } else if (c.model.is_zero()) {
    spec.reference.analytic = true;
  } else {
    spec.reference.tau = *tau / 16.0;
  }
  if (o.reference) {
    for (const auto& p : spec.problems()) problems.push_back(p);
  } else {
    const auto n = steps_for(o.final_time, *tau);
    if (n < 1 || std::abs(static_cast<double>(n) * *tau - o.final_time) >= 1e-12 * o.final_time) {
      problems.push_back("tau " + o.tau + " does not divide T = " + format_real(o.final_time));
    }
  }
  fail_if(problems);

  const Grid grid(o.dim, o.n_modes);
  const PairState state0 = make_initial_data(grid, c.regularity, o.seed);
  const StepContext ctx(scheme, grid, *tau, c.model);
  const auto n_steps = steps_for(o.final_time, *tau);
  std::vector<std::int64_t> marks;
  if (o.snapshot_every > 0) {
    for (std::int64_t k = 0; k <= n_steps; k += o.snapshot_every) marks.push_back(k);
  }
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = integrate(ctx, state0, n_steps, marks);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  json doc = document("run");
  doc["spec"] = spec_json(spec);
  doc["scheme"] = scheme.name();
  doc["tau"] = *tau;
  doc["n_steps"] = n_steps;
  doc["norm_h1l2"] = pair_norm(traj.final_state, PairNorm::level1);
  doc["norm_energy"] = pair_norm(traj.final_state, PairNorm::energy);
  doc["wall_ms"] = wall_ms;
  std::optional<ErrorPair> err_pair;
  if (o.reference) {
    const auto ref = reference_solution(spec, state0);
    err_pair = error_pair(traj.final_state, ref.state);
    doc["err_h1l2"] = err_pair->h1l2;
    doc["err_energy"] = err_pair->energy;
    doc["reference_tolerance"] = ref.tolerance;
  }
  if (!marks.empty()) {
    json snaps = json::array();
    for (const auto& [k, state] : traj.snapshots) {
      snaps.push_back({{"step", k},
                       {"t", static_cast<double>(k) * *tau},
                       {"norm_h1l2", pair_norm(state, PairNorm::level1)},
                       {"norm_energy", pair_norm(state, PairNorm::energy)}});
    }
    doc["snapshots"] = snaps;
  }

  std::ostringstream csv;
  csv << csv_comment("run") << "\nscheme,tau,n_steps,norm_h1l2,norm_energy,err_h1l2,err_energy,wall_ms\n"
      << scheme.name() << ',' << format_real(*tau) << ',' << n_steps << ','
      << format_real(doc["norm_h1l2"].get<double>()) << ',' << format_real(doc["norm_energy"].get<double>())
      << ',' << (err_pair ? format_real(err_pair->h1l2) : "") << ','
      << (err_pair ? format_real(err_pair->energy) : "") << ',' << format_real(wall_ms) << '\n';
  emit_outputs(o, c.format, csv.str(), doc, out);
  return 0;
}

int cmd_spatial(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems;
  const Common c = resolve_common(o, Format::csv, problems);
  if (c.schemes.size() > 1) problems.push_back("spatial takes exactly one scheme");
  SpatialSpec spec;
  spec.dim = o.dim;
  spec.n_list = o.n_list.empty() ? std::vector<int>{64, 128, 256, 512, 1024} : o.n_list;
  spec.n_reference = o.n_reference;
  spec.model = o.model;
  spec.regularity = c.regularity;
  spec.seed = o.seed;
  spec.final_time = o.final_time;
  spec.threads = c.threads;
  if (!c.schemes.empty()) spec.scheme = c.schemes.front();
  spec.tau = std::ldexp(1.0, -12);
  if (!o.tau.empty()) {
    if (auto t = resolve_step(o.tau, "tau", problems)) spec.tau = *t;
  }
  for (int n : spec.n_list) {
    if (n < 2 || n >= spec.n_reference) problems.push_back("every N must satisfy 2 <= N < reference N");
  }
  fail_if(problems);
  SpatialResult result;
  try {
    result = spatial_sweep(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::ostringstream csv;
  csv << csv_comment("spatial") << "\nn_modes,err_h1l2,err_energy,wall_ms\n";
  json rows = json::array();
  for (const auto& r : result.records) {
    csv << r.n_modes << ',' << format_real(r.err_pair) << ',' << format_real(r.err_energy) << ','
        << format_real(r.wall_ms) << '\n';
    rows.push_back({{"n_modes", r.n_modes}, {"err_h1l2", r.err_pair}, {"err_energy", r.err_energy},
                    {"wall_ms", r.wall_ms}});
  }
  json doc = document("spatial");
  doc["scheme"] = spec.scheme.name();
  doc["tau"] = spec.tau;
  doc["N_reference"] = spec.n_reference;
  doc["theta"] = spec.regularity.label();
  doc["seed"] = spec.seed;
  doc["decay_rate"] = nullable(result.decay_rate);
  doc["monotone"] = result.monotone;
  doc["records"] = rows;
  emit_outputs(o, c.format, csv.str(), doc, out);
  if (!o.plot_data.empty()) {
    std::filesystem::create_directories(o.plot_data);
    std::ofstream plot(std::filesystem::path(o.plot_data) / "spatial.dat");
    plot << "# N err_h1l2\n";
    for (const auto& r : result.records) plot << r.n_modes << ' ' << format_real(r.err_pair) << '\n';
  }
  if (result.decay_rate) err << "spatial decay rate " << format_real(*result.decay_rate) << '\n';
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--scheme", o.schemes, "scheme name(s), comma separated")->delimiter(',');
  sub->add_option("--f", o.model, "nonlinearity: sine, zero, constant:<c>");
  sub->add_option("--theta", o.theta, "regularity theta >= 0 or 'smooth'");
  sub->add_option("--seed", o.seed, "seed of the initial data");
  sub->add_option("--N", o.n_modes, "sine modes per dimension");
  sub->add_option("--d", o.dim, "space dimension (1-3)");
  sub->add_option("--T", o.final_time, "final time");
  sub->add_option("--reference-tau", o.reference_tau, "reference step (number or 2^-k)");
  sub->add_option("--out", o.out, "output path stem; writes <stem>.csv / <stem>.json");
  sub->add_option("--format", o.format, "csv, json or both");
  sub->add_option("--threads", o.threads, "worker threads (default: LRKG_THREADS or all cores)");
  sub->add_option("--plot-data", o.plot_data, "directory for two-column plot files");
  sub->add_option("--config", o.config, "JSON config; flags override its values");
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.scheme << ',' << format_real(r.tau) << ',' << r.n_steps << ',' << format_real(r.err_pair) << ','
        << format_real(r.err_energy) << ',' << (r.local_order ? format_real(*r.local_order) : "") << ','
        << format_real(r.wall_ms) << '\n';
  }
}

int default_threads() {
  if (const char* env = std::getenv("LRKG_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Low-regularity integrators for the semilinear Klein-Gordon equation", "lrkg");
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "integrate one scheme at one step size");
  add_common(run_cmd, o);
  run_cmd->add_option("--tau", o.tau, "step size (number or 2^-k)");
  run_cmd->add_flag("--reference", o.reference, "also report the error against a reference solution");
  run_cmd->add_option("--snapshot-every", o.snapshot_every, "record norms every M steps");

  auto* conv = app.add_subcommand("convergence", "error versus step size for several schemes");
  add_common(conv, o);
  conv->add_option("--tau-list", o.tau_list, "step sizes, comma separated")->delimiter(',');

  auto* cmp = app.add_subcommand("compare", "smooth and rough data, error and work for the scheme catalog");
  add_common(cmp, o);
  cmp->add_option("--tau-list", o.tau_list, "step sizes, comma separated")->delimiter(',');

  auto* spatial = app.add_subcommand("spatial", "error versus number of modes at a fixed small step");
  add_common(spatial, o);
  spatial->add_option("--tau", o.tau, "step size (number or 2^-k)");
  spatial->add_option("--N-list", o.n_list, "mode counts, comma separated")->delimiter(',');
  spatial->add_option("--N-ref", o.n_reference, "reference mode count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::invalid_config);
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!o.config.empty()) merge_config(o.config, *active, o);
    if (active == run_cmd) return cmd_run(o, out, err);
    if (active == conv) return cmd_convergence(o, out, err);
    if (active == cmp) return cmd_compare(o, out, err);
    return cmd_spatial(o, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return static_cast<int>(ExitCode::invalid_config);
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return static_cast<int>(ExitCode::invalid_config);
  } catch (const NumericalBlowup& e) {
    err << e.what() << '\n';
    return static_cast<int>(ExitCode::blowup);
  } catch (const ReferenceNotConverged& e) {
    err << e.what() << '\n';
    return static_cast<int>(ExitCode::reference_not_converged);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::invalid_config);
  }
}

}  // namespace lrkg::cli
