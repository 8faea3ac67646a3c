#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aubry/suspension.hpp"

using namespace aubry;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

// tau = 1 + [w_0 = 1] / 2
CeilingFunction golden_tau() { return symbol_ceiling({1.0, 1.5}); }

SymbolWindow window_of(const Word& w, int center) { return SymbolWindow{w, center}; }

}  // namespace

TEST(SuspendFlow, ZeroAndUnitCeiling) {
  const auto w = periodic_window({0, 1, 1, 0, 1}, 2, 8);
  const auto p = suspend_flow({w, 0.25}, 0.0, golden_tau());
  EXPECT_EQ(p.base.center, w.center);
  EXPECT_EQ(p.height, 0.25);
  const auto q = suspend_flow({w, 0.25}, 1.0, constant_ceiling(1.0));
  EXPECT_EQ(q.base.center, w.center + 1);
  EXPECT_DOUBLE_EQ(q.height, 0.25);
}

TEST(SuspendFlow, HandIteratedGoldenMean) {
  // symbol 0 has its roof at 1, and the remaining 1.3 fits under the 1.5 of symbol 1
  auto p = suspend_flow({window_of({0, 1, 0, 0, 1, 0, 0}, 3), 0.0}, 2.3, golden_tau());
  EXPECT_EQ(p.base.center, 4);
  EXPECT_NEAR(p.height, 1.3, 1e-15);
  p = suspend_flow({window_of({0, 0, 1, 0, 1, 0, 0}, 2), 0.0}, 2.3, golden_tau());
  EXPECT_EQ(p.base.center, 3);
  EXPECT_NEAR(p.height, 0.8, 1e-15);
  // backwards: floors at symbols 0 (tau 1) then 1 (tau 1.5)
  p = suspend_flow({window_of({0, 1, 0, 0, 1, 0, 0}, 3), 0.0}, -2.3, golden_tau());
  EXPECT_EQ(p.base.center, 1);
  EXPECT_NEAR(p.height, 0.2, 1e-15);
}

TEST(SuspendFlow, FlowPropertyOnRandomPoints) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto tau = golden_tau();
  for (int n = 0; n < 10000; ++n) {
    SymbolWindow w;
    w.center = 64;
    int prev = 0;
    for (int i = 0; i < 129; ++i) {
      prev = prev == 1 ? 0 : (u(rng) < 0.5 ? 1 : 0);
      w.symbols.push_back(prev);
    }
    const SuspensionPoint pt{w, u(rng) * tau(w)};
    const double t = 20.0 * (u(rng) - 0.5), s = 20.0 * (u(rng) - 0.5);
    const auto one = suspend_flow(pt, t + s, tau);
    const auto two = suspend_flow(suspend_flow(pt, t, tau), s, tau);
    ASSERT_EQ(one.base.center, two.base.center);
    ASSERT_NEAR(one.height, two.height, 1e-12);
  }
}

TEST(SuspendFlow, WindowExhausted) {
  const auto w = periodic_window({0}, 0, 3);
  EXPECT_THROW(suspend_flow({w, 0.0}, 10.0, constant_ceiling(1.0)), WindowExhausted);
  EXPECT_THROW(suspend_flow({w, 1.0}, 0.0, constant_ceiling(1.0)), InvalidArgument);
}

TEST(Measures, ParryGoldenMeanClosedForm) {
  const auto mu = parry_measure(TransitionMatrix::golden_mean());
  validate(mu, nullptr);
  const auto g = TransitionMatrix::golden_mean();
  validate(mu, &g);
  EXPECT_NEAR(mu.P(0, 0), 1.0 / kPhi, 1e-14);
  EXPECT_NEAR(mu.P(0, 1), 1.0 / (kPhi * kPhi), 1e-14);
  EXPECT_NEAR(mu.P(1, 0), 1.0, 1e-14);
  EXPECT_NEAR(mu.p[0], kPhi * kPhi / (1.0 + kPhi * kPhi), 1e-14);
}

TEST(Measures, ValidateRejects) {
  Eigen::MatrixXd P(2, 2);
  P << 0.5, 0.5, 0.5, 0.5;
  MarkovMeasure bad{P, Eigen::Vector2d(0.9, 0.1)};
  EXPECT_THROW(validate(bad), NonInvariant);
  const auto good = markov_measure(P);
  EXPECT_NO_THROW(validate(good));
  const auto g = TransitionMatrix::golden_mean();
  EXPECT_THROW(validate(good, &g), NonInvariant);  // charges 1 -> 1
  EXPECT_THROW(validate(EmpiricalMeasure{{{{1}, true}}, {1.0}}, &g), NonInvariant);
  EXPECT_THROW(validate(EmpiricalMeasure{{{{0}, true}}, {0.5}}), NonInvariant);
}

TEST(LiftMeasure, Normalization) {
  const auto nu = parry_measure(TransitionMatrix::golden_mean());
  const auto I = lift_measure(nu, golden_tau());
  EXPECT_NEAR(I.integrate([](const SymbolWindow&, double) { return 1.0; }), 1.0, 1e-13);
  EXPECT_NEAR(I.mean_ceiling(), nu.p[0] + 1.5 * nu.p[1], 1e-14);
}

TEST(LiftMeasure, ConstantCeilingIsProduct) {
  const auto nu = parry_measure(TransitionMatrix::golden_mean());
  const auto I = lift_measure(nu, constant_ceiling(2.0));
  auto f = [](const SymbolWindow& w, double) { return w.at(0) == 1 ? 3.0 : -1.0; };
  EXPECT_NEAR(I.integrate(f), 3.0 * nu.p[1] - nu.p[0], 1e-13);
}

TEST(LiftMeasure, HeightMatchesClosedFormAndMonteCarlo) {
  Eigen::MatrixXd P(2, 2);
  P << 0.3, 0.7, 1.0, 0.0;
  const auto nu = markov_measure(P);
  const auto tau = golden_tau();
  // int_0^tau s ds = tau^2 / 2
  const double exact = (nu.p[0] * 0.5 + nu.p[1] * 1.125) / (nu.p[0] + 1.5 * nu.p[1]);
  auto height = [](const SymbolWindow&, double s) { return s; };
  EXPECT_NEAR(lift_measure(nu, tau).integrate(height), exact, 1e-13);
  LiftOptions mc;
  mc.monte_carlo = true;
  mc.samples = 2000000;
  mc.seed = 4;
  EXPECT_NEAR(lift_measure(nu, tau, mc).integrate(height), exact, 1e-3);
}

TEST(LiftMeasure, FlowInvariance) {
  const auto nu = parry_measure(TransitionMatrix::golden_mean());
  const auto tau = golden_tau();
  LiftOptions opts;
  opts.observable_radius = 1;
  const auto I = lift_measure(nu, tau, opts);
  auto f = [](const SymbolWindow& w, double s) {
    return std::sin(3.0 * s) + (w.at(1) == 1 ? 0.5 : 0.0) * s + w.at(-1);
  };
  const double base = I.integrate(f);
  for (double t : {0.1, 0.7, 2.3, -1.1}) EXPECT_NEAR(I.integrate(f, t), base, 1e-6) << t;
}

TEST(OrbitWeight, Examples) {
  const auto tau = golden_tau();
  const PeriodicOrbit orbit{{0, 1, 0}, true};
  EXPECT_EQ(orbit_weight(orbit, [](const SymbolWindow&, double) { return 0.0; }, tau), 0.0);
  EXPECT_NEAR(orbit_weight(orbit, [](const SymbolWindow&, double) { return 1.0; }, tau), 3.5, 1e-14);
  const auto zero = [](const SymbolWindow& w, double) { return w.at(0) == 0 ? 1.0 : 0.0; };
  EXPECT_NEAR(orbit_weight({{0}, true}, zero, constant_ceiling(1.0)), 1.0, 1e-14);
}

TEST(LiftMeasure, EmpiricalMeasureOfOneOrbit) {
  // uniform over the shifts of 001 with tau = 1 + [w_0 = 1] / 2
  const EmpiricalMeasure em{{{{0, 0, 1}, true}}, {1.0}};
  const auto I = lift_measure(em, golden_tau());
  EXPECT_NEAR(I.mean_ceiling(), 3.5 / 3.0, 1e-14);
  EXPECT_NEAR(I.integrate([](const SymbolWindow& w, double) { return w.at(0); }), 1.5 / 3.5, 1e-13);
}
