#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aubry/common.hpp"
#include "aubry/lagrangian.hpp"

namespace aubry {

/// Piecewise linear curve with knots equally spaced in time.
///
/// Knots live in the universal cover R^dim, so the integer winding of every
/// segment is implicit in the lifted coordinates.
struct BrokenPath {
  std::vector<Point> knots;
  double duration = 0.0;

  int dim() const { return knots.empty() ? 0 : static_cast<int>(knots.front().size()); }
  std::size_t size() const { return knots.size(); }
  double step() const { return duration / static_cast<double>(knots.size() - 1); }

  Point torus_knot(std::size_t i) const { return wrap_unit(knots[i]); }
  /// Integer offset that segment i adds on top of its torus endpoints.
  Eigen::VectorXi winding(std::size_t i) const;
  /// Total displacement in the cover, start to end.
  Point displacement() const { return knots.back() - knots.front(); }

  static BrokenPath straight(const Point& from, const Point& to, double duration,
                             std::size_t n_knots);
  static BrokenPath constant(const Point& at, double duration, std::size_t n_knots);
  /// Linear interpolation in time onto n_knots knots, same endpoints.
  BrokenPath resampled(std::size_t n_knots) const;
  BrokenPath rescaled(double duration) const;
};

/// Thrown by tonelli_minimizer; carries the best iterate it reached.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, BrokenPath best, double residual)
      : Error("NoConvergence: " + what), best_(std::move(best)), residual_(residual) {}
  const BrokenPath& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  BrokenPath best_;
  double residual_;
};

class BelowCritical : public Error {
 public:
  explicit BelowCritical(const std::string& what) : Error("BelowCritical: " + what) {}
};

/// Integral of k + L along the path: the kinetic part is exact for linear
/// segments, the rest uses three-point Gauss-Legendre per segment.
double action(const MechanicalLagrangian& L, const BrokenPath& p, double k);

/// max over interior knots of |dS/dq_i| / h: the discrete Euler-Lagrange defect.
double el_residual(const MechanicalLagrangian& L, const BrokenPath& p);

struct MinimizerOptions {
  int max_winding = 3;
  int max_iterations = 200;
  double residual_tol = 1e-6;
  /// Largest knot displacement allowed per Newton step.
  double max_step = 0.25;
};

struct MinimizerResult {
  BrokenPath path;
  double action = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton descent on the interior knots with both endpoints (and hence
/// the winding class) fixed.
MinimizerResult minimize_path(const MechanicalLagrangian& L, BrokenPath initial, double k,
                              const MinimizerOptions& opts = {});

/// Fixed-time, fixed-endpoint minimizer of the (k = 0) action, searched over
/// winding classes |w_i| <= opts.max_winding relative to the nearest lift of y.
/// Throws NoConvergence when no class reaches the residual tolerance.
BrokenPath tonelli_minimizer(const MechanicalLagrangian& L, const Point& x, const Point& y,
                             double T, std::size_t n_knots, const MinimizerOptions& opts = {});

struct LoopSearchOptions {
  std::size_t budget = 10000;
  std::uint64_t seed = 1;
  /// A loop counts as a witness when its action is below -tol * max(1, T).
  double negative_tol = 1e-10;
  std::size_t minimized_loops = 6;
  double t_min = 0.05;
  double t_max = 50.0;
};

struct LoopSearchResult {
  bool found = false;
  BrokenPath loop;
  double action = 0.0;
  std::size_t candidates = 0;
};

/// Searches for a closed curve of negative (L + k)-action. Candidates are
/// constant loops at grid points and maxima of U, straight winding loops,
/// random waypoint loops, and Newton-minimized versions of the best of those.
LoopSearchResult find_negative_loop(const MechanicalLagrangian& L, double k,
                                    const LoopSearchOptions& opts = {});

struct PotentialOptions {
  double t_min = 0.05;
  double t_max = 50.0;
  int t_samples = 40;
  /// Golden-section steps on log T around the best grid duration.
  int refine_steps = 14;
  double knot_spacing = 0.025;
  std::size_t min_knots = 8;
  std::size_t max_knots = 1000;
  /// Iteration cap is lower than for a single solve: the sweep does hundreds.
  MinimizerOptions minimizer{3, 60};
  LoopSearchOptions loops{};
  int threads = 1;
};

/// Phi_k(x, y), or the -infinity sentinel with a negative loop as certificate.
struct ActionValue {
  bool neg_infinity = false;
  double value = 0.0;
  std::optional<BrokenPath> certificate;
  std::optional<BrokenPath> minimizer;

  bool finite() const { return !neg_infinity; }
};

ActionValue action_potential(const MechanicalLagrangian& L, double k, const Point& x,
                             const Point& y, const PotentialOptions& opts = {});

struct CriticalValueOptions {
  /// Final bracket width; the reported value is the bracket midpoint.
  double width = 1e-3;
  int max_bisections = 80;
  LoopSearchOptions loops{};
};

struct CriticalValue {
  double value = 0.0;
  double lower = 0.0;  ///< a negative loop exists at this energy
  double upper = 0.0;  ///< no negative loop found within budget
  BrokenPath witness;  ///< negative loop at `lower`
};

/// Bisection on k between a level with a negative-loop witness and a level
/// where the search budget finds none. Throws BudgetExceeded when the initial
/// bracket cannot be established.
CriticalValue critical_value(const MechanicalLagrangian& L, const CriticalValueOptions& opts = {});

/// Phi_c(x,y) + Phi_c(y,x); zero on projected Aubry pairs, positive elsewhere.
/// Throws BelowCritical when either potential is -infinity.
double staticity_defect(const MechanicalLagrangian& L, double c, const Point& x,
                        const Point& y, const PotentialOptions& opts = {});

}  // namespace aubry
