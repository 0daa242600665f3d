#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "lrkg/experiments.hpp"
#include "oracles.hpp"

using namespace lrkg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double l2(const std::vector<double>& c) {
  double s = 0.0;
  for (double x : c) s += x * x;
  return std::sqrt(s);
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.n_modes = 64;
  spec.regularity = Regularity::smooth();
  spec.seed = 5;
  spec.tau_list = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  spec.schemes = {SchemeId::Family::corrected_lie, SchemeId::Family::lie};
  spec.reference.tau = 1.0 / 1024;
  spec.threads = 2;
  return spec;
}

}  // namespace

TEST_CASE("initial data normalization and reproducibility", "[experiments]") {
  const Grid grid(1, 128);
  for (auto regularity : {Regularity::smooth(), Regularity::sobolev(0.0), Regularity::sobolev(1.0),
                          Regularity::sobolev(2.5)}) {
    for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 123456789ULL}) {
      const auto a = make_initial_data(grid, regularity, seed);
      CHECK_THAT(l2(a.u), WithinAbs(1.0, 1e-12));
      CHECK_THAT(l2(a.v), WithinAbs(1.0, 1e-12));
      const auto b = make_initial_data(grid, regularity, seed);
      CHECK(a.u == b.u);
      CHECK(a.v == b.v);
      CHECK(a.representation == Representation::spectral);
    }
  }
  CHECK(make_initial_data(grid, Regularity::sobolev(1.0), 1).u != make_initial_data(grid, Regularity::sobolev(1.0), 2).u);
  CHECK_THROWS_AS(make_initial_data(grid, Regularity::sobolev(-0.5), 1), std::invalid_argument);
}

TEST_CASE("initial data follow the documented draw order", "[experiments]") {
  const Grid grid(1, 6);
  const double theta = 1.5;
  const std::uint64_t seed = 99;
  std::mt19937_64 rng(seed);
  std::vector<double> xi(6), eta(6);
  for (double& x : xi) x = 2.0 * std::ldexp(static_cast<double>(rng() >> 11), -53) - 1.0;
  for (double& x : eta) x = 2.0 * std::ldexp(static_cast<double>(rng() >> 11), -53) - 1.0;
  std::vector<double> u(6), v(6);
  for (int k = 1; k <= 6; ++k) {
    u[k - 1] = std::pow(k, -theta) * xi[k - 1];
    v[k - 1] = std::pow(k, -(theta - 1.0)) * eta[k - 1];
  }
  const double nu = l2(u), nv = l2(v);
  const auto data = make_initial_data(grid, Regularity::sobolev(theta), seed);
  for (int i = 0; i < 6; ++i) {
    CHECK_THAT(data.u[i], WithinAbs(u[i] / nu, 1e-15));
    CHECK_THAT(data.v[i], WithinAbs(v[i] / nv, 1e-15));
  }
  CHECK(std::string(kInitialDataGenerator) == "mt19937_64-uniform53/v1");
}

TEST_CASE("rough data lie in H^s exactly for s below theta - 1/2", "[experiments]") {
  // Coefficients |k|^-theta xi_k: sum k^(2s - 2 theta) converges iff s < theta - 1/2.
  auto growth = [](double s) {
    const auto coarse = make_initial_data(Grid(1, 256), Regularity::sobolev(1.0), 7);
    const auto fine = make_initial_data(Grid(1, 4096), Regularity::sobolev(1.0), 7);
    return sobolev_norm(fine.u_field(), s) / sobolev_norm(coarse.u_field(), s);
  };
  CHECK(growth(0.25) < 1.1);
  CHECK(growth(0.75) > 1.5);
  CHECK(growth(1.0) > 3.0);
}

TEST_CASE("error pair", "[experiments]") {
  const Grid grid(1, 16);
  const auto a = fixture::random_state(grid, 1);
  CHECK(error_pair(a, a).h1l2 == 0.0);
  CHECK(error_pair(a, a).energy == 0.0);

  auto b = a;
  const double delta = 1e-3;
  b.u[0] += delta;
  CHECK_THAT(error_pair(b, a).h1l2, WithinRel(delta * std::sqrt(1.0 + std::numbers::pi * std::numbers::pi), 1e-9));
  CHECK_THAT(error_pair(b, a).energy, WithinRel(delta * std::numbers::pi, 1e-9));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = fixture::random_state(grid, 3 * seed + 10);
    const auto y = fixture::random_state(grid, 3 * seed + 11);
    const auto z = fixture::random_state(grid, 3 * seed + 12);
    CHECK(error_pair(x, z).h1l2 <= error_pair(x, y).h1l2 + error_pair(y, z).h1l2 + 1e-12);
  }
  CHECK_THROWS_AS(error_pair(a, fixture::random_state(Grid(1, 8), 1)), std::invalid_argument);
  CHECK_THROWS_AS(error_pair(to_nodal(a), a), std::invalid_argument);
}

TEST_CASE("experiment spec validation", "[experiments]") {
  const auto desk = ExperimentSpec::desk_default();
  CHECK(desk.n_modes == 1024);
  CHECK(desk.tau_list.size() == 7);
  CHECK(desk.tau_list.front() == 1.0 / 16);
  CHECK(desk.tau_list.back() == 1.0 / 1024);
  CHECK(desk.reference.tau == std::ldexp(1.0, -14));
  CHECK(desk.final_time == 1.0);
  CHECK(desk.schemes.size() == 7);
  CHECK(desk.problems().empty());

  auto bad = desk;
  bad.n_modes = 1;
  bad.tau_list.push_back(0.0);
  bad.tau_list.push_back(0.3);
  bad.model = "cubic";
  const auto issues = bad.problems();
  CHECK(issues.size() == 4);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  auto coarse_ref = desk;
  coarse_ref.reference.tau = std::ldexp(1.0, -12);
  CHECK(coarse_ref.problems().size() == 1);

  auto analytic = desk;
  analytic.reference.analytic = true;
  CHECK(analytic.problems().size() == 1);
  analytic.model = "zero";
  CHECK(analytic.problems().empty());

  CHECK(steps_for(1.0, 1.0 / 64) == 64);
}

TEST_CASE("reference solutions", "[experiments]") {
  SECTION("zero nonlinearity matches the exact flow") {
    auto spec = small_spec();
    spec.model = "zero";
    const auto state0 = make_initial_data(Grid(1, 64), spec.regularity, spec.seed);
    const auto exact = apply_semigroup(1.0, state0);
    const auto numeric = reference_solution(spec, state0);
    CHECK(fixture::max_abs_diff(numeric.state, exact) < 1e-10);
    spec.reference.analytic = true;
    const auto analytic = reference_solution(spec, state0);
    CHECK(analytic.tolerance == 0.0);
    CHECK(fixture::max_abs_diff(analytic.state, exact) < 1e-14);
  }
  SECTION("two reference schemes agree within ten tolerances") {
    auto spec = small_spec();
    const auto state0 = make_initial_data(Grid(1, 64), spec.regularity, spec.seed);
    const auto a = reference_solution(spec, state0);
    spec.reference.scheme = SchemeId::Family::rs21;
    const auto b = reference_solution(spec, state0, false);
    CHECK(a.tolerance > 0.0);
    CHECK(error_pair(a.state, b.state).h1l2 < 10.0 * a.tolerance);
  }
}

TEST_CASE("convergence sweep on smooth data", "[experiments]") {
  const auto spec = small_spec();
  const auto sweep = convergence_sweep(spec);
  REQUIRE(sweep.records.size() == spec.schemes.size() * spec.tau_list.size());
  for (std::size_t i = 1; i < sweep.records.size(); ++i) {
    const auto& p = sweep.records[i - 1];
    const auto& q = sweep.records[i];
    CHECK((p.scheme < q.scheme || (p.scheme == q.scheme && p.tau < q.tau)));
  }
  for (const auto& r : sweep.records) {
    CHECK(r.ok);
    CHECK(r.n_steps == steps_for(1.0, r.tau));
    CHECK(r.local_order.has_value() == (r.tau != 1.0 / 8));
  }
  REQUIRE(sweep.fits.at("corrected_lie").order);
  CHECK_THAT(*sweep.fits.at("corrected_lie").order, WithinAbs(2.0, 0.15));
  CHECK_THAT(*sweep.fits.at("lie").order, WithinAbs(1.0, 0.15));
  CHECK(sweep.reference_tolerance < 0.01 * sweep.smallest_error);

  const auto again = convergence_sweep(spec);
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    CHECK(again.records[i].err_pair == sweep.records[i].err_pair);
    CHECK(again.records[i].err_energy == sweep.records[i].err_energy);
  }
}

TEST_CASE("sweeps of the linear problem are flagged exact", "[experiments]") {
  auto spec = small_spec();
  spec.model = "zero";
  spec.reference.analytic = true;
  spec.schemes = {SchemeId::Family::corrected_lie, SchemeId::Family::strang, SchemeId::Family::hl21};
  const auto sweep = convergence_sweep(spec);
  CHECK(sweep.fits.at("corrected_lie").exact);
  CHECK(sweep.fits.at("strang").exact);
  CHECK_FALSE(sweep.fits.at("hl21").exact);
  CHECK_FALSE(sweep.fits.at("corrected_lie").order.has_value());
}

TEST_CASE("an unconverged reference is rejected", "[experiments]") {
  auto spec = small_spec();
  spec.schemes = {SchemeId::Family::corrected_lie};
  spec.reference.scheme = SchemeId::Family::lie;
  CHECK_THROWS_AS(convergence_sweep(spec), ReferenceNotConverged);
}

TEST_CASE("order fit ignores records at the floor", "[experiments]") {
  std::vector<RunRecord> records;
  for (int e = 2; e <= 6; ++e) {
    RunRecord r;
    r.tau = std::ldexp(1.0, -e);
    r.err_pair = std::max(3.0 * r.tau * r.tau, 1e-3);
    records.push_back(r);
  }
  CHECK_THAT(*fit_order(records, 2e-3), WithinAbs(2.0, 1e-12));
  CHECK_FALSE(fit_order(records, 1.0).has_value());
}

TEST_CASE("spatial sweep on smooth data", "[experiments]") {
  SpatialSpec spec;
  spec.n_list = {8, 16, 24, 32};
  spec.n_reference = 64;
  spec.regularity = Regularity::smooth();
  spec.tau = 1.0 / 64;
  spec.threads = 2;
  const auto result = spatial_sweep(spec);
  REQUIRE(result.records.size() == 4);
  CHECK(result.monotone);
  REQUIRE(result.decay_rate);
  CHECK(*result.decay_rate > 4.0);
  CHECK(result.records.back().err_pair < 1e-10);

  spec.n_list = {64};
  CHECK_THROWS_AS(spatial_sweep(spec), std::invalid_argument);
}
