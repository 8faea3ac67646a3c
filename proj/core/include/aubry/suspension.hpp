#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "aubry/sft.hpp"

namespace aubry {

/// Positive roof function on symbol windows.
struct CeilingFunction {
  std::function<double(const SymbolWindow&)> eval;
  /// tau(w) depends only on w_i with |i| <= radius.
  int radius = 0;
  double min = 1.0;
  double max = 1.0;
  /// Lipschitz constant with respect to d_a, a = 2.
  double lipschitz = 0.0;

  double operator()(const SymbolWindow& w) const;
};

CeilingFunction constant_ceiling(double c);
/// tau(w) = values[w_0].
CeilingFunction symbol_ceiling(std::vector<double> values);

/// (w, s) with 0 <= s < tau(w).
struct SuspensionPoint {
  SymbolWindow base;
  double height = 0.0;
};

/// sigma^k: the window is unchanged, only its center moves.
SymbolWindow shift(const SymbolWindow& w, int k);

/// Periodic extension of a cycle, centered at cycle[offset], radius r.
SymbolWindow periodic_window(const Word& cycle, int offset, int radius);

/// Moves the point up by t and applies (w, s + tau(w)) ~ (sigma w, s) as often
/// as needed, in either direction. Throws WindowExhausted when tau would need
/// symbols outside the window.
SuspensionPoint suspend_flow(const SuspensionPoint& pt, double t, const CeilingFunction& tau);

/// Markov measure with transition matrix P and stationary vector p.
struct MarkovMeasure {
  Eigen::MatrixXd P;
  Eigen::VectorXd p;
};

/// Probability weights on periodic orbits; each orbit carries the uniform
/// measure on its shifts.
struct EmpiricalMeasure {
  std::vector<PeriodicOrbit> orbits;
  std::vector<double> weights;
};

using SymbolicMeasure = std::variant<MarkovMeasure, EmpiricalMeasure>;

/// Maximal-entropy Markov measure of an irreducible matrix.
MarkovMeasure parry_measure(const TransitionMatrix& a);
/// Stationary Markov measure for a stochastic P (power iteration).
MarkovMeasure markov_measure(const Eigen::MatrixXd& P);

/// Throws NonInvariant when stochasticity, stationarity (1e-12) or support
/// compatibility with `a` fails. `a` may be null to skip the support check.
void validate(const SymbolicMeasure& nu, const TransitionMatrix* a = nullptr);

/// f(w, s) for a suspension point; must depend only on w_i with |i| <= radius
/// as declared in LiftOptions::observable_radius.
using FlowObservable = std::function<double(const SymbolWindow&, double)>;

struct LiftOptions {
  int observable_radius = 0;
  bool monte_carlo = false;
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Weak form of the lifted flow measure
///   f -> (1 / int tau dnu) int int_0^{tau(w)} f(w, s) ds dnu(w).
class FlowIntegrator {
 public:
  FlowIntegrator(SymbolicMeasure nu, CeilingFunction tau, LiftOptions opts);

  /// Integral of f composed with the flow at time t (t = 0: f itself).
  double integrate(const FlowObservable& f, double t = 0.0) const;
  /// int tau dnu.
  double mean_ceiling() const { return mean_tau_; }

 private:
  struct Atom {
    SymbolWindow window;
    double weight;
  };
  std::vector<Atom> atoms(int radius) const;
  double exact(const FlowObservable& f, double t) const;
  double sampled(const FlowObservable& f, double t) const;

  SymbolicMeasure nu_;
  CeilingFunction tau_;
  LiftOptions opts_;
  double mean_tau_ = 0.0;
};

FlowIntegrator lift_measure(const SymbolicMeasure& nu, const CeilingFunction& tau,
                            const LiftOptions& opts = {});

/// Sum over one period of int_0^{tau} cost(sigma^j w, s) ds.
double orbit_weight(const PeriodicOrbit& w, const FlowObservable& cost,
                    const CeilingFunction& tau);

}  // namespace aubry
