#include <doctest.h>

#include <cmath>

#include "error_code.hpp"
#include "generators.hpp"
#include "tlbt/balancing.hpp"
#include "tlbt/error.hpp"
#include "tlbt/gramians.hpp"

using tlbt::ErrorCode;
using tlbt::Horizon;
using tlbt::Matrix;
using tlbt::StateSpaceSystem;
using tlbt_test::error_code_of;
using tlbt_test::Gen;
using tlbt_test::rel_fro;

namespace {

StateSpaceSystem scalar_system() {
  return StateSpaceSystem(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0),
                          Matrix::Constant(1, 1, 1.0));
}

const double kScalarP1 = (1.0 - std::exp(-2.0)) / 2.0;

tlbt::ReducedModel as_rom(const StateSpaceSystem& s, Horizon h) {
  return tlbt::ReducedModel{s.a(), s.b(), s.c(), h, s.name()};
}

}  // namespace

TEST_CASE("infinite gramians examples") {
  const auto g = tlbt::infinite_gramians(scalar_system());
  CHECK(g.p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.q(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << -1.0, -2.0;
  const auto d = tlbt::infinite_gramians(StateSpaceSystem(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2)));
  CHECK(d.p(0, 0) == doctest::Approx(0.5));
  CHECK(d.p(1, 1) == doctest::Approx(0.25));

  Gen gen(1);
  const auto z = tlbt::infinite_gramians(StateSpaceSystem(gen.stable(3), Matrix::Zero(3, 1), gen.matrix(1, 3)));
  CHECK(z.p.norm() == 0.0);
}

TEST_CASE("infinite gramians carry matching factors") {
  Gen g(13);
  const auto sys = g.system(6, 2, 3);
  const auto gr = tlbt::infinite_gramians(sys);
  REQUIRE(gr.p_factor);
  REQUIRE(gr.q_factor);
  CHECK(rel_fro(*gr.p_factor * gr.p_factor->transpose(), gr.p) < 1e-10);
  CHECK(rel_fro(*gr.q_factor * gr.q_factor->transpose(), gr.q) < 1e-10);

  const Matrix e = Matrix::Identity(5, 5) + 0.2 * g.matrix(5, 5);
  const StateSpaceSystem es(e * g.stable(5), e * g.matrix(5, 2), g.matrix(2, 5), e);
  const auto ge = tlbt::infinite_gramians(es);
  CHECK(rel_fro(*ge.q_factor * ge.q_factor->transpose(), ge.q) < 1e-10);
}

TEST_CASE("infinite gramians need a Hurwitz matrix") {
  Gen g(2);
  const StateSpaceSystem s(g.stable(3) + 5.0 * Matrix::Identity(3, 3), g.matrix(3, 1), g.matrix(1, 3));
  CHECK(error_code_of([&] { tlbt::infinite_gramians(s); }) == ErrorCode::Unstable);
}

TEST_CASE("time-limited gramians examples") {
  const auto g = tlbt::time_limited_gramians(scalar_system(), 1.0);
  CHECK(g.p(0, 0) == doctest::Approx(kScalarP1).epsilon(1e-14));
  CHECK(g.q(0, 0) == doctest::Approx(kScalarP1).epsilon(1e-14));

  const auto far = tlbt::time_limited_gramians(scalar_system(), 20.0);
  CHECK(std::abs(far.p(0, 0) - 0.5) < 1e-10);

  Gen gen(3);
  const auto z = tlbt::time_limited_gramians(StateSpaceSystem(gen.stable(3), Matrix::Zero(3, 1), gen.matrix(1, 3)), 2.0);
  CHECK(z.p.norm() == 0.0);
  CHECK(error_code_of([] { tlbt::time_limited_gramians(scalar_system(), -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("quadrature oracle examples") {
  CHECK(tlbt::gramian_quadrature_oracle(scalar_system(), 1.0, 64)(0, 0) ==
        doctest::Approx(kScalarP1).epsilon(1e-10));
  Gen g(4);
  const StateSpaceSystem zero_b(g.stable(3), Matrix::Zero(3, 2), g.matrix(1, 3));
  CHECK(tlbt::gramian_quadrature_oracle(zero_b, 3.0, 16).norm() == 0.0);
}

TEST_CASE("time-limited gramians agree with the quadrature oracle") {
  Gen g(5);
  for (int trial = 0; trial < 8; ++trial) {
    const auto sys = g.system(6, 2, 2);
    const double t = g.uniform(0.5, 3.0);
    const auto gr = tlbt::time_limited_gramians(sys, t);
    CHECK(rel_fro(gr.p, tlbt::gramian_quadrature_oracle(sys, t, 256)) < 1e-8);
  }
}

TEST_CASE("time-limited gramians of an unstable separated system") {
  Gen g(6);
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 0.5, -1.0, -2.0;
  const StateSpaceSystem sys(a, g.matrix(3, 1), g.matrix(1, 3));
  const auto gr = tlbt::time_limited_gramians(sys, 1.5);
  CHECK(rel_fro(gr.p, tlbt::gramian_quadrature_oracle(sys, 1.5, 256)) < 1e-8);

  Matrix bad = Matrix::Zero(2, 2);
  bad.diagonal() << 1.0, -1.0;
  const StateSpaceSystem ns(bad, g.matrix(2, 1), g.matrix(1, 2));
  CHECK(error_code_of([&] { tlbt::time_limited_gramians(ns, 1.0); }) == ErrorCode::NotSeparated);
}

TEST_CASE("observability gramian is the reachability gramian of the dual") {
  Gen g(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = g.system(5, 2, 3);
    const StateSpaceSystem dual(sys.a().transpose(), sys.c().transpose(), sys.b().transpose());
    const auto gs = tlbt::time_limited_gramians(sys, 1.3);
    const auto gd = tlbt::time_limited_gramians(dual, 1.3);
    CHECK(rel_fro(gs.q, gd.p) < 1e-12);
  }
}

TEST_CASE("time-limited gramians grow with the horizon") {
  Gen g(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = g.system(6, 2, 2);
    const double t1 = g.uniform(0.1, 2.0);
    const double t2 = t1 + g.uniform(0.1, 2.0);
    const Matrix p1 = tlbt::time_limited_gramians(sys, t1).p;
    const Matrix p2 = tlbt::time_limited_gramians(sys, t2).p;
    Eigen::SelfAdjointEigenSolver<Matrix> es(p2 - p1);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * tlbt::norm2(p2));
  }
}

TEST_CASE("horizon limit of the time-limited gramians") {
  const auto sys = tlbt::generate_heat_model(12, 2, 2);
  const double alpha = std::abs(tlbt::spectral_abscissa(sys.a()));
  const auto inf = tlbt::infinite_gramians(sys);
  const auto lim = tlbt::time_limited_gramians(sys, 20.0 / alpha);
  CHECK((lim.p - inf.p).norm() <= 1e-6 * inf.p.norm());
  CHECK((lim.q - inf.q).norm() <= 1e-6 * inf.q.norm());
}

TEST_CASE("E-system gramians match the standard form") {
  Gen g(9);
  const Matrix e = Matrix::Identity(5, 5) + 0.2 * g.matrix(5, 5);
  const Matrix a = g.stable(5);
  const StateSpaceSystem sys(e * a, e * g.matrix(5, 2), g.matrix(2, 5), e);
  const auto ge = tlbt::time_limited_gramians(sys, 1.0);
  const auto gs = tlbt::time_limited_gramians(sys.standard_form(), 1.0);
  CHECK(rel_fro(ge.p, gs.p) < 1e-10);
  // q_balancing = E^T Q E equals the standard-form observability Gramian.
  CHECK(rel_fro(ge.q_balancing, gs.q) < 1e-10);
  CHECK(rel_fro(e.transpose() * ge.q * e, ge.q_balancing) < 1e-10);
  // Generalized Lyapunov residual for P.
  const auto& hd = *ge.horizon_data;
  const Matrix res = sys.a() * ge.p * e.transpose() + e * ge.p * sys.a().transpose() +
                     sys.b() * sys.b().transpose() - hd.f * hd.f.transpose();
  CHECK(res.norm() <= 1e-10 * (sys.b() * sys.b().transpose()).norm());
}

TEST_CASE("Lemma identity for the quadrature integral") {
  Gen g(10);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = g.integer(1, 8);
    const auto r = g.integer(1, 4);
    const Matrix a1 = g.stable(n);
    const Matrix a2 = g.stable(r);
    const Matrix b1 = g.matrix(n, 2);
    const Matrix b2 = g.matrix(r, 2);
    const double t = trial % 2 ? 0.5 : 2.0;
    const Matrix x = tlbt::quadrature_integral(a1, b1, a2, b2, t, 256);
    const Matrix bb = b1 * b2.transpose();
    const Matrix res = a1 * x + x * a2.transpose() + bb -
                       tlbt::expm(a1, t) * bb * tlbt::expm(a2, t).transpose();
    CHECK(res.norm() <= 1e-8 * bb.norm());
  }
}

TEST_CASE("reduced gramian examples") {
  const auto rom = as_rom(scalar_system(), Horizon::finite(1.0));
  CHECK(tlbt::reduced_gramian(rom, Horizon::finite(1.0))(0, 0) == doctest::Approx(kScalarP1).epsilon(1e-14));
  auto zero = rom;
  zero.b1.setZero();
  CHECK(tlbt::reduced_gramian(zero, Horizon::finite(1.0)).norm() == 0.0);
}

TEST_CASE("reduced gramian of a full-order balanced model is the singular value matrix") {
  Gen g(11);
  const auto sys = g.system(5, 2, 2);
  const auto gr = tlbt::time_limited_gramians(sys, 1.0);
  const auto bal = tlbt::balance(gr, sys, 5);
  REQUIRE(bal.n_hat() == 5);
  const auto rom = tlbt::truncate(sys, bal);
  const Matrix pr = tlbt::reduced_gramian(rom, Horizon::finite(1.0));
  const Matrix sigma = bal.singular_values.asDiagonal();
  CHECK((pr - sigma).norm() <= 1e-8 * sigma.norm());
}

TEST_CASE("mixed gramian examples") {
  const auto sys = scalar_system();
  const auto rom = as_rom(sys, Horizon::finite(1.0));
  CHECK(tlbt::mixed_gramian(sys, rom, Horizon::finite(1.0))(0, 0) == doctest::Approx(kScalarP1).epsilon(1e-14));

  Gen g(12);
  const auto big = g.system(6, 2, 2);
  const auto same = as_rom(big, Horizon::finite(1.5));
  const Matrix pm = tlbt::mixed_gramian(big, same, Horizon::finite(1.5));
  const Matrix p = tlbt::time_limited_gramians(big, 1.5).p;
  CHECK(rel_fro(pm, p) < 1e-8);

  const auto gr = tlbt::time_limited_gramians(big, 1.5);
  const auto rom2 = tlbt::truncate(big, tlbt::balance(gr, big, 2));
  const Matrix pm2 = tlbt::mixed_gramian(big, rom2, Horizon::finite(1.5));
  const Matrix oracle = tlbt::quadrature_integral(big.a(), big.b(), rom2.a11, rom2.b1, 1.5, 256);
  CHECK(rel_fro(pm2, oracle) < 1e-8);

  const Matrix pinf = tlbt::mixed_gramian(big, rom2, Horizon::infinite());
  CHECK(rel_fro(big.a() * pinf + pinf * rom2.a11.transpose(), -big.b() * rom2.b1.transpose()) < 1e-10);
}

TEST_CASE("attach_factors") {
  const auto sys = tlbt::generate_heat_model(30, 2, 2);
  auto g = tlbt::time_limited_gramians(sys, 1.0);
  tlbt::attach_factors(g, 1e-12);
  REQUIRE(g.p_factor);
  REQUIRE(g.q_factor);
  CHECK(g.p_factor->cols() < 30);
  CHECK(rel_fro(*g.p_factor * g.p_factor->transpose(), g.p) < 1e-6);
}
