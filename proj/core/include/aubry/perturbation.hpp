#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "aubry/action.hpp"
#include "aubry/config.hpp"
#include "aubry/fields.hpp"
#include "aubry/lagrangian.hpp"

namespace aubry {

/// phi(x) = eps * min(d(x, core), plateau)^k around a closed polyline.
struct CanalPotential {
  int dim = 1;
  /// Vertices in the universal cover; consecutive vertices are joined by
  /// straight segments. A single vertex is a point core.
  std::vector<Point> core;
  /// The closing segment runs from core.back() to core.front() + winding.
  std::array<int, 2> winding{0, 0};
  double eps = 0.1;
  int k = 2;
  double plateau = std::numeric_limits<double>::infinity();

  /// Throws InvalidArgument on an empty core, eps <= 0, k < 2 or bad dims.
  void check() const;
  /// Torus distance to the core; `nearest` receives the closest core point
  /// lifted next to x.
  double distance(const Point& x, Point* nearest = nullptr) const;
};

double canal(const CanalPotential& cp, const Point& x);

/// The canal as a scalar field (exact gradient off the cut locus).
class CanalField final : public ScalarField {
 public:
  struct Piece {
    Point a, b;
  };

  explicit CanalField(CanalPotential cp);

  int dim() const override { return cp_.dim; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double lipschitz_bound() const override;
  const CanalPotential& canal() const { return cp_; }

 private:
  CanalPotential cp_;
  std::vector<Piece> pieces_;
};

/// L + phi, i.e. potential U - phi and the same one-form. Throws DimMismatch.
MechanicalLagrangian perturb(const MechanicalLagrangian& L, const CanalPotential& cp);

/// sup over the states of a solution of L of the force mismatch
/// |a_{L+phi}(x, v) - a_L(x, v)|: zero exactly when the curve still solves
/// the perturbed equations.
double core_force_residual(const MechanicalLagrangian& L, const CanalPotential& cp,
                           const Trajectory& gamma);

/// Core polyline through the states of a periodic trajectory.
CanalPotential canal_along(const Trajectory& gamma, std::array<int, 2> winding, double eps, int k,
                           double plateau = std::numeric_limits<double>::infinity());

struct LocalizationOptions {
  double tol = 2e-2;
  /// Loops whose knots all lie within this distance of the core count as
  /// localized.
  double neighborhood = 0.1;
  /// Grid resolution per axis for the off-core rest measures.
  int grid = 64;
  CriticalValueOptions critical{};
};

struct LocalizationReport {
  double c_base = 0.0;
  double c_perturbed = 0.0;
  bool monotone = false;  ///< c(L+phi) <= c(L) + tol
  /// Best mean (L+phi+c)-action of rest measures on the core and away from it.
  double on_core_action = 0.0;
  double off_core_action = 0.0;
  /// Largest core distance of the witness loop at the lower bracket of c(L+phi).
  double witness_core_distance = 0.0;
  bool localized = false;
};

LocalizationReport experiment_localization(const MechanicalLagrangian& L, const CanalPotential& cp,
                                           const LocalizationOptions& opts = {});

/// [canal] section: eps, k, plateau, winding = "a b", and core = "x y | x y | ..."
/// (or core_file = path to a CSV polyline, one vertex per row).
CanalPotential canal_spec(const Config& cfg, int dim, const std::string& base_dir = ".");
void write_canal_spec(const CanalPotential& cp, Config& cfg);

/// CSV polyline: one vertex per row, dim columns; '#' lines are comments.
std::vector<Point> parse_polyline(const std::string& text, int dim);

}  // namespace aubry
