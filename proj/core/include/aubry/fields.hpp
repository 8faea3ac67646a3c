#pragma once

#include <array>
#include <memory>
#include <vector>

#include "aubry/common.hpp"

namespace aubry {

/// Smooth 1-periodic scalar field on T^dim.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual int dim() const = 0;
  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;
  /// Default: central differences of the gradient.
  virtual Mat hessian(const Point& x) const;
  /// Upper bound on |grad| over the torus, used to turn grid extrema into
  /// rigorous bounds. Returns a negative number when unknown.
  virtual double lipschitz_bound() const { return -1.0; }
};

/// One real Fourier mode a*cos(2pi k.x) + b*sin(2pi k.x).
struct FourierTerm {
  std::array<int, 2> k{0, 0};
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

/// Truncated real Fourier series; gradient and Hessian are exact.
class FourierSeries final : public ScalarField {
 public:
  explicit FourierSeries(int dim, std::vector<FourierTerm> terms = {});

  static FourierSeries constant(int dim, double c);

  int dim() const override { return dim_; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  Mat hessian(const Point& x) const override;
  double lipschitz_bound() const override;

  const std::vector<FourierTerm>& terms() const { return terms_; }
  /// Sum of |a|+|b| over all modes; bounds |value| from above.
  double sup_bound() const;
  /// Merges duplicate modes (k and -k folded together) and drops zeros.
  FourierSeries canonical() const;
  bool is_zero() const { return canonical().terms_.empty(); }

  /// Partial derivative along axis, again a Fourier series.
  FourierSeries derivative(int axis) const;

  FourierSeries operator+(const FourierSeries& other) const;
  FourierSeries operator*(double s) const;

  friend bool operator==(const FourierSeries& a, const FourierSeries& b);

 private:
  int dim_;
  std::vector<FourierTerm> terms_;
};

/// U(x) = sum_i w_i U_i(x).
class LinearCombinationField final : public ScalarField {
 public:
  LinearCombinationField(
      std::vector<std::pair<double, std::shared_ptr<const ScalarField>>> parts);

  int dim() const override { return dim_; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  Mat hessian(const Point& x) const override;
  double lipschitz_bound() const override;

 private:
  int dim_;
  std::vector<std::pair<double, std::shared_ptr<const ScalarField>>> parts_;
};

/// Smooth periodic covector field eta on T^dim, one Fourier series per component.
class OneForm {
 public:
  OneForm() = default;
  explicit OneForm(std::vector<FourierSeries> components);
  static OneForm zero(int dim);

  int dim() const { return static_cast<int>(components_.size()); }
  const std::vector<FourierSeries>& components() const { return components_; }

  Point value(const Point& x) const;
  /// J(j,l) = d eta_j / d x_l.
  Mat jacobian(const Point& x) const;
  /// Upper bound on sup |eta(x)|.
  double sup_bound() const;
  /// True when every component is the zero series.
  bool is_zero() const;
  /// True when d(eta) vanishes identically, i.e. there is no magnetic force.
  bool is_closed() const;

 private:
  std::vector<FourierSeries> components_;
};

struct FieldExtrema {
  double min = 0.0;
  double max = 0.0;
  Point argmin;
  Point argmax;
};

/// Global extrema by a uniform grid scan followed by local Newton polishing of
/// the best grid cells. `resolution` is the grid size per axis.
FieldExtrema scan_extrema(const ScalarField& f, int resolution = 256);

/// All local maxima found by ascent from grid seeds, deduplicated; sorted by
/// decreasing value.
std::vector<Point> local_maxima(const ScalarField& f, int resolution = 32);

}  // namespace aubry
