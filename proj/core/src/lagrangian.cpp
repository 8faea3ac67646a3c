#include "aubry/lagrangian.hpp"

#include <cmath>

namespace aubry {

MechanicalLagrangian::MechanicalLagrangian(std::shared_ptr<const ScalarField> potential,
                                           OneForm oneform)
    : potential_(std::move(potential)), oneform_(std::move(oneform)) {
  if (!potential_) throw InvalidArgument("null potential");
  if (oneform_.dim() != potential_->dim()) throw DimMismatch("potential vs one-form");
  closed_ = oneform_.is_closed();
}

MechanicalLagrangian::MechanicalLagrangian(std::shared_ptr<const ScalarField> potential)
    : MechanicalLagrangian(potential, OneForm::zero(potential ? potential->dim() : 1)) {}

double MechanicalLagrangian::value(const Point& x, const Point& v) const {
  return 0.5 * v.squaredNorm() + oneform_.value(x).dot(v) - potential_->value(x);
}

Point MechanicalLagrangian::acceleration(const Point& x, const Point& v) const {
  Point a = -potential_->gradient(x);
  if (!closed_) {
    const Mat j = oneform_.jacobian(x);
    a += (j.transpose() - j) * v;
  }
  return a;
}

MechanicalLagrangian cosine_lagrangian(std::vector<double> harmonics) {
  std::vector<FourierTerm> terms;
  for (std::size_t j = 0; j < harmonics.size(); ++j) {
    if (harmonics[j] != 0.0) terms.push_back({{static_cast<int>(j), 0}, harmonics[j], 0.0});
  }
  return MechanicalLagrangian(std::make_shared<FourierSeries>(1, std::move(terms)));
}

double energy(const MechanicalLagrangian& L, const PhaseState& s) {
  return 0.5 * s.v.squaredNorm() + L.potential().value(s.x);
}

namespace {

void verlet_step(const MechanicalLagrangian& L, Point& x, Point& v, double h) {
  v += 0.5 * h * L.acceleration(x, v);
  x += h * v;
  v += 0.5 * h * L.acceleration(x, v);
}

void yoshida4_step(const MechanicalLagrangian& L, Point& x, Point& v, double h) {
  static const double cbrt2 = std::cbrt(2.0);
  static const double w1 = 1.0 / (2.0 - cbrt2);
  static const double w0 = -cbrt2 * w1;
  verlet_step(L, x, v, w1 * h);
  verlet_step(L, x, v, w0 * h);
  verlet_step(L, x, v, w1 * h);
}

void rk4_step(const MechanicalLagrangian& L, Point& x, Point& v, double h) {
  const Point k1x = v;
  const Point k1v = L.acceleration(x, v);
  const Point k2x = v + 0.5 * h * k1v;
  const Point k2v = L.acceleration(x + 0.5 * h * k1x, k2x);
  const Point k3x = v + 0.5 * h * k2v;
  const Point k3v = L.acceleration(x + 0.5 * h * k2x, k3x);
  const Point k4x = v + h * k3v;
  const Point k4v = L.acceleration(x + h * k3x, k4x);
  x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace

Trajectory el_flow(const MechanicalLagrangian& L, const PhaseState& s0, double T,
                   double dt, Integrator method) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(T >= dt)) throw InvalidArgument("T must be at least dt");
  if (s0.x.size() != L.dim() || s0.v.size() != L.dim()) throw DimMismatch("initial state");

  if (method == Integrator::Auto) {
    method = L.has_magnetic_force() ? Integrator::RungeKutta4 : Integrator::Yoshida4;
  }
  if (L.has_magnetic_force() && method != Integrator::RungeKutta4) {
    throw InvalidArgument("splitting integrators need a velocity-free force");
  }

  const auto steps = static_cast<std::size_t>(std::floor(T / dt + 1e-9));
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(steps + 1);

  Point x = wrap_unit(s0.x);
  Point v = s0.v;
  traj.states.push_back({x, v});
  for (std::size_t i = 0; i < steps; ++i) {
    switch (method) {
      case Integrator::Verlet: verlet_step(L, x, v, dt); break;
      case Integrator::Yoshida4: yoshida4_step(L, x, v, dt); break;
      default: rk4_step(L, x, v, dt); break;
    }
    if (!x.allFinite() || !v.allFinite()) {
      throw NonFiniteState("state diverged at step " + std::to_string(i + 1));
    }
    x = wrap_unit(x);
    traj.states.push_back({x, v});
  }
  return traj;
}

SpeedBound apriori_speed_bound(const MechanicalLagrangian& L, double C) {
  const ScalarField& U = L.potential();
  constexpr int kRes = 256;
  const FieldExtrema ext = scan_extrema(U, kRes);

  // Grid extrema become rigorous bounds after a Lipschitz slack of half the
  // grid diagonal; polishing only ever improves the grid values.
  double lip = U.lipschitz_bound();
  if (lip < 0.0) lip = 0.0;
  const double slack = lip * 0.5 * std::sqrt(static_cast<double>(L.dim())) / kRes;

  SpeedBound b;
  b.potential_max = ext.max + slack;
  b.potential_min = ext.min - slack;
  const double eta_max = L.oneform().sup_bound();

  // inf over v of 1/2|v|^2 + eta.v is -1/2|eta|^2, so inf L = min_x(-1/2|eta|^2 - U).
  if (L.oneform().is_zero()) {
    b.lagrangian_inf = -ext.max;
  } else {
    struct NegHalfEtaSqMinusU final : ScalarField {
      const MechanicalLagrangian& L;
      explicit NegHalfEtaSqMinusU(const MechanicalLagrangian& l) : L(l) {}
      int dim() const override { return L.dim(); }
      double value(const Point& x) const override {
        return -0.5 * L.oneform().value(x).squaredNorm() - L.potential().value(x);
      }
      Point gradient(const Point& x) const override {
        const Point e = L.oneform().value(x);
        return -(L.oneform().jacobian(x).transpose() * e) - L.potential().gradient(x);
      }
    } inf_field(L);
    b.lagrangian_inf = scan_extrema(inf_field, 128).min;
  }

  if (!(C > b.lagrangian_inf)) {
    throw InvalidBound("C = " + std::to_string(C) + " does not exceed inf L = " +
                       std::to_string(b.lagrangian_inf));
  }

  // L >= 1/2|v|^2 - eta_max|v| - max U, which exceeds |v| - B once
  // B > 1/2 (1 + eta_max)^2 + max U.
  b.superlinear_b = 0.5 * (1.0 + eta_max) * (1.0 + eta_max) + b.potential_max + 1e-9;

  // Some t0 has L < C, hence |v(t0)| < B + C; energy is conserved.
  const double v0 = b.superlinear_b + C;
  const double e_upper = b.potential_max + 0.5 * v0 * v0;
  b.speed = std::sqrt(2.0 * (e_upper - b.potential_min) / MechanicalLagrangian::kConvexity);
  return b;
}

}  // namespace aubry
