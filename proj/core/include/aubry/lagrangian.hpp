#pragma once

#include <memory>
#include <vector>

#include "aubry/common.hpp"
#include "aubry/fields.hpp"

namespace aubry {

/// State (x, v) in the tangent bundle of T^dim; x is kept in [0,1)^dim.
struct PhaseState {
  Point x;
  Point v;
};

/// Uniformly sampled solution curve: states[i] is the state at t0 + i*dt.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<PhaseState> states;

  double duration() const { return dt * static_cast<double>(states.size() - 1); }
};

enum class Integrator {
  Auto,        ///< yoshida4 without magnetic force, rk4 otherwise
  Verlet,      ///< Stormer-Verlet (kick-drift-kick), second order
  Yoshida4,    ///< triple-jump composition of Verlet, fourth order symplectic
  RungeKutta4  ///< classical RK4; handles velocity-dependent forces
};

/// L(x,v) = 1/2 |v|^2 + eta(x).v - U(x) on T^1 or T^2.
///
/// The fibre Hessian is the identity, so the convexity constant is 1 and the
/// Legendre transform is explicit. Instances are immutable and may be shared
/// freely between threads.
class MechanicalLagrangian {
 public:
  static constexpr double kConvexity = 1.0;

  MechanicalLagrangian(std::shared_ptr<const ScalarField> potential,
                       OneForm oneform);
  explicit MechanicalLagrangian(std::shared_ptr<const ScalarField> potential);

  int dim() const { return potential_->dim(); }
  const ScalarField& potential() const { return *potential_; }
  std::shared_ptr<const ScalarField> potential_ptr() const { return potential_; }
  const OneForm& oneform() const { return oneform_; }

  double value(const Point& x, const Point& v) const;
  /// Acceleration from the Euler-Lagrange equation:
  /// x'' = -grad U(x) + (J^T - J) x', with J the Jacobian of eta.
  Point acceleration(const Point& x, const Point& v) const;
  bool has_magnetic_force() const { return !closed_; }

 private:
  std::shared_ptr<const ScalarField> potential_;
  OneForm oneform_;
  bool closed_ = true;
};

/// Pendulum-style helper: U(x) = sum_j a_j cos(2 pi j x) on T^1, j = 0, 1, ...
MechanicalLagrangian cosine_lagrangian(std::vector<double> harmonics);

/// E = v.dL/dv - L = 1/2 |v|^2 + U(x); the one-form drops out.
double energy(const MechanicalLagrangian& L, const PhaseState& s);

/// Integrates the Euler-Lagrange flow from s0 on the grid {0, dt, ..., n dt}
/// with n = floor(T/dt). Throws NonFiniteState on overflow or NaN.
Trajectory el_flow(const MechanicalLagrangian& L, const PhaseState& s0, double T,
                   double dt, Integrator method = Integrator::Auto);

/// Ingredients of the a-priori speed bound chain, exposed for inspection.
struct SpeedBound {
  double speed = 0.0;            ///< A0: every EL solution with mean action < C has |v| < A0
  double superlinear_b = 0.0;    ///< B with L(x,v) > |v| - B
  double potential_max = 0.0;    ///< upper bound on max U
  double potential_min = 0.0;    ///< lower bound on min U
  double lagrangian_inf = 0.0;   ///< estimate of inf L over TM
};

/// Explicit A0[C] from the energy sandwich
///   min U + |v|^2/2 <= E <= max U + g |v|^2 / 2,  g = 1,
/// and the superlinearity constant B. Throws InvalidBound when C <= inf L.
SpeedBound apriori_speed_bound(const MechanicalLagrangian& L, double C);

}  // namespace aubry
