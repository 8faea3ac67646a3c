#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "aubry/common.hpp"
#include "aubry/entropy.hpp"

namespace aubry {

/// Hyperbolic automorphism of T^2 given by an integer matrix (row-major).
class ToralAutomorphism {
 public:
  /// Throws InvalidArgument unless |det| = 1 and the eigenvalues are real and
  /// off the unit circle.
  explicit ToralAutomorphism(std::array<std::int64_t, 4> m = {2, 1, 1, 1});

  const std::array<std::int64_t, 4>& entries() const { return m_; }
  int det() const { return det_; }
  Eigen::Matrix2d matrix() const;
  /// Exact integer inverse.
  std::array<std::int64_t, 4> inverse_entries() const;

  double lambda_u() const { return lambda_u_; }  ///< |lambda_u| > 1
  double lambda_s() const { return lambda_s_; }  ///< det / lambda_u
  const Eigen::Vector2d& e_u() const { return e_u_; }
  const Eigen::Vector2d& e_s() const { return e_s_; }
  /// Columns e_s, e_u.
  const Eigen::Matrix2d& basis() const { return basis_; }
  /// Coordinates (s, u) of v in the eigenbasis.
  Eigen::Vector2d split(const Eigen::Vector2d& v) const { return basis_inv_ * v; }

  /// Shadowing constant 1/(1 - |lambda_s|) + 1/(1 - 1/|lambda_u|).
  double Q() const;
  /// 2-norm condition number of the eigenbasis.
  double condition() const;
  /// Constant D of the expansivity contract d(x, y) <= D beta e^{-lambda L}.
  double gap_constant() const { return 2.0 * condition(); }

 private:
  std::array<std::int64_t, 4> m_;
  int det_;
  double lambda_u_, lambda_s_;
  Eigen::Vector2d e_u_, e_s_;
  Eigen::Matrix2d basis_, basis_inv_;
};

/// T^n x mod 1 (n may be negative). Uses the exact integer power and one
/// reduction while its entries fit in 64 bits, else iterates with reductions.
Point apply(const ToralAutomorphism& tm, const Point& x, long n);

/// Local chart radius for bracket.
inline constexpr double kBracketChart = 0.1;

struct BracketResult {
  Point w;
  double s = 0.0;  ///< w = x + s e_s
  double u = 0.0;  ///< w = y + u e_u
  bool exists = false;
};

/// W^s_gamma(x) intersected with W^u_gamma(y). Throws OutOfLocalChart when
/// d(x, y) > kBracketChart.
BracketResult bracket(const ToralAutomorphism& tm, const Point& x, const Point& y, double gamma);

/// Sequence p_0..p_{N-1} on T^2 with d(T p_i, p_{i+1}) <= delta.
struct PseudoOrbit {
  std::vector<Point> points;
  double delta = 0.0;
  bool periodic = false;  ///< also d(T p_{N-1}, p_0) <= delta

  /// Validates the recorded delta; throws InvalidArgument when it is not a bound.
  static PseudoOrbit make(const ToralAutomorphism& tm, std::vector<Point> points, double delta,
                          bool periodic = false);
};

/// Largest jump d(T p_i, p_{i+1}) (including the closing jump when periodic).
double max_jump(const ToralAutomorphism& tm, const std::vector<Point>& points, bool periodic);

/// True orbit plus random jumps of size at most delta.
PseudoOrbit random_pseudo_orbit(const ToralAutomorphism& tm, std::size_t length, double delta,
                                std::mt19937_64& rng);

/// Largest delta accepted by the shadowing routines.
inline constexpr double kShadowThreshold = 0.25;

struct ShadowResult {
  Point start;
  double eps_achieved = 0.0;  ///< sup_i d(T^i start, p_i)
  double residual = 0.0;      ///< sup_i d(T x_i, x_{i+1}) of the corrected sequence
};

/// Exact shadowing for the linear model. Throws ThresholdExceeded when
/// p.delta >= kShadowThreshold.
ShadowResult shadow(const ToralAutomorphism& tm, const PseudoOrbit& p);

/// Specification with integer times t_0 < t_1 < ... and gaps >= L.
struct Specification {
  std::vector<long> times;
  std::vector<Point> points;
  long L = 1;
  double delta = 0.0;

  /// Checks the gap condition and d(T^{t_{i+1}-t_i} x_i, x_{i+1}) <= delta;
  /// throws InvalidArgument otherwise.
  void validate(const ToralAutomorphism& tm) const;
  /// Pseudo-orbit on [t_0, t_last] following each x_i until the next time.
  PseudoOrbit expand(const ToralAutomorphism& tm) const;
};

/// d(x, y) after checking d(T^n x, T^n y) <= beta for |n| <= L. Throws
/// HypothesisViolated with the first offending n.
double expansivity_gap(const ToralAutomorphism& tm, const Point& x, const Point& y, int L,
                       double beta);

struct PeriodicShadow {
  /// Nearest double to the periodic point.
  Point start;
  /// The periodic point as numerator / denominator (denominator 0 when the
  /// rational form was not recovered).
  std::array<std::int64_t, 2> numerator{0, 0};
  std::int64_t denominator = 0;
  double eps_achieved = 0.0;
  /// dist(T^N x - x, Z^2), evaluated with the exact integer power: in integers
  /// on the rational form when there is one, otherwise on `start`.
  double closing_error = 0.0;
};

/// Periodic point of period N = p.points.size() shadowing a periodic
/// pseudo-orbit.
PeriodicShadow periodic_shadow(const ToralAutomorphism& tm, const PseudoOrbit& p);

/// Two-sided orbits of lattice points (Z / 2^bits)^2 placed along e_u from
/// `start` with the given spacing. Steps -past..future, origin = past.
/// Orbits are exact since the map acts on the lattice by integers.
LabeledOrbitEnsemble unstable_segment_ensemble(const ToralAutomorphism& tm, const Point& start,
                                               std::size_t count, double spacing, int past,
                                               int future, int bits = 30);

/// Spacing that stretches to `fraction * delta` after T steps.
double segment_spacing(const ToralAutomorphism& tm, double T, double delta, double fraction = 0.8);

/// f_eps(x) = A x + eps/(2 pi) sin(2 pi x_1) (1, 1) mod 1; area preserving.
Point perturbed_map(const ToralAutomorphism& tm, double eps, const Point& x);

/// Forward orbits (steps 0..steps) of f_eps from points along e_u.
LabeledOrbitEnsemble perturbed_segment_ensemble(const ToralAutomorphism& tm, double eps,
                                                const Point& start, std::size_t count,
                                                double spacing, int steps);

}  // namespace aubry
