#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "error_code.hpp"
#include "generators.hpp"
#include "tlbt/balancing.hpp"
#include "tlbt/error.hpp"
#include "tlbt/error_bounds.hpp"
#include "tlbt/gramians.hpp"
#include "tlbt/simulation.hpp"

using tlbt::ErrorCode;
using tlbt::Horizon;
using tlbt::Matrix;
using tlbt::StateSpaceSystem;
using tlbt_test::error_code_of;
using tlbt_test::Gen;

namespace {

StateSpaceSystem scalar_system() {
  return StateSpaceSystem(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0),
                          Matrix::Constant(1, 1, 1.0));
}

tlbt::ReducedModel reduce(const StateSpaceSystem& sys, const tlbt::GramianSet& g, tlbt::Index r) {
  return tlbt::truncate(sys, tlbt::balance(g, sys, r));
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> w(count);
  for (int i = 0; i < count; ++i) w[i] = std::pow(10.0, lo + (hi - lo) * i / (count - 1));
  return w;
}

}  // namespace

TEST_CASE("bound collapses for exact reduction") {
  const auto s = scalar_system();
  const auto g = tlbt::time_limited_gramians(s, 1.0);
  const tlbt::ReducedModel same{s.a(), s.b(), s.c(), Horizon::finite(1.0), "s"};
  const auto rep = tlbt::tlbt_h2_bound(s, same, g.p, Horizon::finite(1.0));
  CHECK(rep.epsilon <= 1e-10 * std::sqrt(rep.term_cpc));

  Gen gen(1);
  const auto sys = gen.system(6, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto rom = reduce(sys, gr, 6);
  const auto full = tlbt::tlbt_h2_bound(sys, rom, gr.p, Horizon::finite(1.0));
  CHECK(full.epsilon <= 1e-10 * std::sqrt(full.term_cpc));
  const auto alt = tlbt::tlbt_h2_bound_alt(sys, gr, 6);
  REQUIRE(alt.alt);
  CHECK(std::abs(alt.alt->eps2) <= 1e-10 * alt.term_cpc);
}

TEST_CASE("trace invariant of the report") {
  const auto sys = tlbt::generate_heat_model(20, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto rep = tlbt::tlbt_h2_bound(sys, reduce(sys, gr, 4), gr.p, Horizon::finite(1.0));
  CHECK(std::abs(rep.radicand - (rep.term_cpc + rep.term_cprc - 2.0 * rep.term_cpmc)) <= 1e-12);
  CHECK(rep.epsilon > 0.0);
  CHECK(rep.order == 4);

  const auto j = nlohmann::json::parse(tlbt::to_json(rep));
  const double e2 = j["epsilon_squared"].get<double>();
  CHECK(std::abs(e2 - (j["term_cpc"].get<double>() + j["term_cprc"].get<double>() -
                       2.0 * j["term_cpmc"].get<double>())) <= 1e-12);
}

TEST_CASE("bound dominates simulated error on heat n=20, r=2") {
  const auto sys = tlbt::generate_heat_model(20, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto rom = reduce(sys, gr, 2);
  const auto rep = tlbt::tlbt_h2_bound(sys, rom, gr.p, Horizon::finite(1.0));
  const double dt = 1.0 / 1000.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto u = tlbt::InputSignal::random_unit(2, 20, 1.0, seed);
    const auto err = tlbt::output_error(tlbt::simulate(sys, u, 1.0, dt), tlbt::simulate(rom, u, 1.0, dt), 1.0);
    CHECK(err.max_on_horizon <= rep.epsilon * (1.0 + 1e-6));
  }
}

TEST_CASE("both representations agree on random systems") {
  Gen g(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = g.system(8, 2, 2);
    const auto gr = tlbt::time_limited_gramians(sys, g.uniform(0.5, 3.0));
    const auto rep = tlbt::tlbt_h2_bound_alt(sys, gr, 3);
    REQUIRE(rep.alt);
    CHECK(rep.alt->discrepancy <= 1e-7 * std::max(rep.radicand, rep.term_cpc));
  }
}

TEST_CASE("low-rank bound equals the dense bound with an exact factor") {
  Gen g(3);
  const auto sys = g.system(7, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto rom = reduce(sys, gr, 3);
  const auto dense = tlbt::tlbt_h2_bound(sys, rom, gr.p, Horizon::finite(1.0));
  const auto lr = tlbt::tlbt_h2_bound_lowrank(sys, rom, tlbt::spd_factor(gr.p, 0.0, 1e-10), Horizon::finite(1.0));
  CHECK(lr.epsilon == doctest::Approx(dense.epsilon).epsilon(1e-8));
}

TEST_CASE("quadrature refinement matches the trace formula where both are accurate") {
  const auto sys = tlbt::generate_heat_model(20, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto rom = reduce(sys, gr, 3);
  const auto rep = tlbt::tlbt_h2_bound(sys, rom, gr.p, Horizon::finite(1.0));
  CHECK_FALSE(rep.quadrature);
  const double q = tlbt::output_error_energy(sys, rom, Horizon::finite(1.0));
  CHECK(q == doctest::Approx(rep.radicand).epsilon(1e-5));
}

TEST_CASE("quadrature refinement takes over when the trace formula cancels") {
  const auto sys = tlbt::generate_heat_model(50, 7, 6);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto bal = tlbt::balance(gr, sys, 1);
  const auto r = std::min<tlbt::Index>(13, bal.n_hat() - 1);
  const auto rom = reduce(sys, gr, r);
  const auto rep = tlbt::tlbt_h2_bound(sys, rom, gr.p, Horizon::finite(1.0));
  CHECK(rep.quadrature);
  CHECK(rep.epsilon > 0.0);
  CHECK(rep.epsilon * rep.epsilon == doctest::Approx(rep.eps2_quadrature));
  const auto j = nlohmann::json::parse(tlbt::to_json(rep));
  CHECK(j["epsilon_method"] == "quadrature");
}

TEST_CASE("error energy on an infinite horizon needs stable dynamics") {
  const auto s = scalar_system();
  const tlbt::ReducedModel unstable{Matrix::Constant(1, 1, 1.0), s.b(), s.c(), Horizon::infinite(), "u"};
  CHECK(error_code_of([&] { tlbt::output_error_energy(s, unstable, Horizon::infinite()); }) == ErrorCode::Unstable);
}

TEST_CASE("remainder diagnostics") {
  const auto sys = tlbt::generate_heat_model(20, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 50.0);
  const auto d = tlbt::remainder_diagnostics(sys, gr, 5);
  CHECK(std::abs(d.remainder) <= d.remainder_bound);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(d.summands[i]) <= d.upper_bounds[i] * (1.0 + 1e-12));

  // F_1 lives in the T-dependent balanced basis; decay shows once that basis settles
  double prev = INFINITY;
  for (double t = 0.1; t < 5.0; t *= 2.0) {
    const double f1 = tlbt::remainder_diagnostics(sys, tlbt::time_limited_gramians(sys, t), 3).norm_f1;
    CHECK(f1 <= prev);
    prev = f1;
  }

  Gen g(4);
  const StateSpaceSystem zero_b(g.stable(4), Matrix::Zero(4, 1), g.matrix(1, 4));
  tlbt::GramianSet zg = tlbt::time_limited_gramians(zero_b, 1.0);
  CHECK(error_code_of([&] { tlbt::remainder_diagnostics(zero_b, zg, 1); }) == ErrorCode::Degenerate);
}

TEST_CASE("bt_hinf_bound examples") {
  const std::vector<double> s{3.0, 2.0, 1.0};
  CHECK(tlbt::bt_hinf_bound(s, 1) == doctest::Approx(6.0));
  CHECK(tlbt::bt_hinf_bound(s, 3) == 0.0);
  CHECK(tlbt::bt_hinf_bound(std::vector<double>{1.0}, 0) == doctest::Approx(2.0));
  CHECK(error_code_of([&] { tlbt::bt_hinf_bound(s, 4); }) == ErrorCode::Order);
}

TEST_CASE("bt_h2_bound_infinite") {
  Gen g(5);
  const auto sys = g.system(5, 1, 1);
  const auto gi = tlbt::infinite_gramians(sys);
  CHECK(std::abs(tlbt::bt_h2_bound_infinite(sys, gi, 5)) <= 1e-12);
  CHECK(tlbt::bt_h2_bound_infinite(sys, gi, 2) > 0.0);
  CHECK(error_code_of([&] { tlbt::bt_h2_bound_infinite(sys, gi, 0); }) == ErrorCode::Order);

  const auto s = scalar_system();
  CHECK(error_code_of([&] { tlbt::bt_h2_bound_infinite(s, tlbt::infinite_gramians(s), 0); }) == ErrorCode::Order);
}

TEST_CASE("horizon limit of the balanced representation") {
  const auto sys = tlbt::generate_heat_model(20, 2, 2);
  const double t = 40.0 / std::abs(tlbt::spectral_abscissa(sys.a()));
  const auto gi = tlbt::infinite_gramians(sys);
  const auto gt = tlbt::time_limited_gramians(sys, t);
  const auto rep = tlbt::tlbt_h2_bound_alt(sys, gt, 4);
  const double eq4 = tlbt::bt_h2_bound_infinite(sys, gi, 4);
  CHECK(std::abs(rep.alt->leading - eq4) <= 1e-5 * eq4);
  CHECK(std::abs(rep.alt->remainder + rep.alt->last) <= 1e-8 * rep.radicand);
}

TEST_CASE("sampled H-infinity error") {
  const auto s = scalar_system();
  const tlbt::ReducedModel same{s.a(), s.b(), s.c(), Horizon::infinite(), "s"};
  CHECK(tlbt::hinf_error_sampled(s, same, logspace(-3, 3, 20)) <= 1e-10);

  const tlbt::ReducedModel other{Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 3.0),
                                 Matrix::Constant(1, 1, 1.0), Horizon::infinite(), "o"};
  const std::vector<double> zero{0.0};
  CHECK(tlbt::hinf_error_sampled(s, other, zero) == doctest::Approx(std::abs(-1.0 - (-1.5))));

  const auto heat = tlbt::generate_heat_model(20, 2, 2);
  const auto gi = tlbt::infinite_gramians(heat);
  const auto bal = tlbt::balance(gi, heat, 4);
  const auto rom = tlbt::truncate(heat, bal);
  const std::vector<double> hsv(bal.singular_values.data(), bal.singular_values.data() + bal.n_hat());
  CHECK(tlbt::hinf_error_sampled(heat, rom, logspace(-3, 5, 200)) <= tlbt::bt_hinf_bound(hsv, 4));
}

TEST_CASE("similarity transform leaves the bound unchanged") {
  Gen g(6);
  const auto sys = g.system(6, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto e1 = tlbt::tlbt_h2_bound(sys, reduce(sys, gr, 2), gr.p, Horizon::finite(1.0)).epsilon;
  const auto ts = tlbt::apply_state_transform(sys, g.conditioned(6, 100.0));
  const auto gt = tlbt::time_limited_gramians(ts, 1.0);
  const auto e2 = tlbt::tlbt_h2_bound(ts, reduce(ts, gt, 2), gt.p, Horizon::finite(1.0)).epsilon;
  CHECK(e2 == doctest::Approx(e1).epsilon(1e-6));
}
