#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aubry/config.hpp"
#include "aubry/fields.hpp"
#include "aubry/lagrangian.hpp"

using namespace aubry;

namespace {

const double kPi = std::acos(-1.0);

double max_energy_drift(const MechanicalLagrangian& L, const Trajectory& tr) {
  const double e0 = energy(L, tr.states.front());
  double d = 0.0;
  for (const auto& s : tr.states) d = std::max(d, std::abs(energy(L, s) - e0));
  return d;
}

}  // namespace

TEST(Fields, FourierGradientMatchesFiniteDifference) {
  FourierSeries U(2, {{{1, 0}, 1.0, 0.2}, {{1, 2}, 0.3, -0.7}, {{0, 1}, 0.0, 0.5}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-6;
  for (int n = 0; n < 20; ++n) {
    const Point x = make_point(u(rng), u(rng));
    const Point g = U.gradient(x);
    for (int c = 0; c < 2; ++c) {
      Point a = x, b = x;
      a[c] += h;
      b[c] -= h;
      EXPECT_NEAR(g[c], (U.value(a) - U.value(b)) / (2 * h), 1e-6);
    }
  }
}

TEST(Fields, CanonicalFoldsOppositeModes) {
  FourierSeries a(1, {{{1, 0}, 1.0, 0.5}, {{-1, 0}, 1.0, 0.5}});
  FourierSeries b(1, {{{1, 0}, 2.0, 0.0}});
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_TRUE((a + b * -1.0).is_zero());
}

TEST(Fields, ScanExtremaOfCosine) {
  FourierSeries U(1, {{{1, 0}, 1.0, 0.0}});
  const auto ext = scan_extrema(U);
  EXPECT_NEAR(ext.max, 1.0, 1e-12);
  EXPECT_NEAR(ext.min, -1.0, 1e-12);
  EXPECT_NEAR(torus_distance(ext.argmax, make_point(0.0)), 0.0, 1e-6);
  EXPECT_NEAR(ext.argmin[0], 0.5, 1e-6);
}

TEST(Fields, LocalMaximaOfDoubleWell) {
  // 0.5 cos 2pi x + cos 4pi x: maxima 1.5 at 0 and 0.5 at 1/2
  const auto L = cosine_lagrangian({0.0, 0.5, 1.0});
  const auto maxima = local_maxima(L.potential());
  ASSERT_EQ(maxima.size(), 2u);
  EXPECT_NEAR(L.potential().value(maxima[0]), 1.5, 1e-10);
  EXPECT_NEAR(L.potential().value(maxima[1]), 0.5, 1e-10);
}

TEST(Lagrangian, ValueAndEnergyAtRest) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  const Point x = make_point(0.2);
  const Point v = make_point(0.0);
  EXPECT_NEAR(L.value(x, v), -std::cos(2 * kPi * 0.2), 1e-15);
  EXPECT_NEAR(energy(L, {x, make_point(3.0)}), 4.5 + std::cos(2 * kPi * 0.2), 1e-14);
}

TEST(Lagrangian, ConstantHarmonicIsForceFree) {
  const auto L = cosine_lagrangian({1.0});
  EXPECT_EQ(L.acceleration(make_point(0.3), make_point(1.0))[0], 0.0);
}

TEST(Lagrangian, MagneticAccelerationMatchesHandDerivation) {
  // eta = (0.3 cos 2pi y, 0): J(0,1) = -0.6 pi sin 2pi y
  OneForm eta({FourierSeries(2, {{{0, 1}, 0.3, 0.0}}), FourierSeries(2)});
  MechanicalLagrangian L(std::make_shared<FourierSeries>(2), eta);
  EXPECT_TRUE(L.has_magnetic_force());
  const Point x = make_point(0.1, 0.35);
  const Point v = make_point(0.7, -1.3);
  const double s = 0.6 * kPi * std::sin(2 * kPi * x[1]);
  const Point a = L.acceleration(x, v);
  EXPECT_NEAR(a[0], s * v[1], 1e-12);
  EXPECT_NEAR(a[1], -s * v[0], 1e-12);
}

TEST(Lagrangian, ClosedOneFormHasNoForce) {
  OneForm eta({FourierSeries::constant(1, 0.5)});
  EXPECT_TRUE(eta.is_closed());
  MechanicalLagrangian L(std::make_shared<FourierSeries>(1), eta);
  EXPECT_FALSE(L.has_magnetic_force());
  EXPECT_NEAR(L.value(make_point(0.4), make_point(2.0)), 2.0 + 1.0, 1e-15);
}

TEST(ElFlow, SeparatrixEnergyDrift) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  // bottom of the well at x = 1/2 with E = max U = 1
  const auto tr = el_flow(L, {make_point(0.5), make_point(2.0)}, 10.0, 1e-3);
  EXPECT_EQ(tr.states.size(), 10001u);
  EXPECT_LE(max_energy_drift(L, tr), 1e-7);
}

TEST(ElFlow, IntegratorOrders) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  const PhaseState s0{make_point(0.3), make_point(0.4)};
  // halving dt shrinks the final error by about 2^p
  auto final_x = [&](Integrator m, double dt) {
    return el_flow(L, s0, 1.0, dt, m).states.back().x[0];
  };
  const double ref = final_x(Integrator::Yoshida4, 1e-4);
  for (auto [m, p] : {std::pair{Integrator::Verlet, 2}, {Integrator::Yoshida4, 4},
                      {Integrator::RungeKutta4, 4}}) {
    const double e1 = std::abs(final_x(m, 0.02) - ref);
    const double e2 = std::abs(final_x(m, 0.01) - ref);
    EXPECT_NEAR(std::log2(e1 / e2), p, 0.5) << integrator_name(m);
  }
}

TEST(ElFlow, MagneticFlowConservesEnergy) {
  OneForm eta({FourierSeries(2, {{{0, 1}, 0.3, 0.0}}), FourierSeries(2)});
  auto U = std::make_shared<FourierSeries>(2, std::vector<FourierTerm>{{{1, 0}, 1.0, 0.0}});
  MechanicalLagrangian L(U, eta);
  const auto tr = el_flow(L, {make_point(0.1, 0.2), make_point(0.5, 1.0)}, 5.0, 1e-3);
  EXPECT_LE(max_energy_drift(L, tr), 1e-9);
}

TEST(ElFlow, RejectsBadStep) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  EXPECT_THROW(el_flow(L, {make_point(0.0), make_point(0.0)}, 1.0, 0.0), Error);
}

TEST(SpeedBound, ChainAndDomain) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  const auto b = apriori_speed_bound(L, 2.0);
  EXPECT_NEAR(b.lagrangian_inf, -1.0, 1e-9);
  EXPECT_GE(b.potential_max, 1.0);
  EXPECT_LE(b.potential_min, -1.0);
  EXPECT_GT(b.speed, 0.0);
  // L(x, v) > |v| - B on a sample of states
  for (double v : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    for (double x : {0.0, 0.25, 0.5}) {
      EXPECT_GT(L.value(make_point(x), make_point(v)), v - b.superlinear_b);
    }
  }
  EXPECT_THROW(apriori_speed_bound(L, -1.5), InvalidBound);
}

TEST(SpeedBound, MonotoneInLevel) {
  const auto L = cosine_lagrangian({0.0, 0.5, 1.0});
  EXPECT_LE(apriori_speed_bound(L, 1.0).speed, apriori_speed_bound(L, 5.0).speed);
}
