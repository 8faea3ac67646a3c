#include "aubry/fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Cholesky>

namespace aubry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase(const FourierTerm& t, const Point& x) {
  double p = t.k[0] * x[0];
  if (x.size() > 1) p += t.k[1] * x[1];
  return kTwoPi * p;
}

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("dimension must be 1 or 2");
}

}  // namespace

Mat ScalarField::hessian(const Point& x) const {
  const int d = dim();
  Mat h(d, d);
  constexpr double step = 1e-6;
  for (int j = 0; j < d; ++j) {
    Point xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    h.col(j) = (gradient(xp) - gradient(xm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

FourierSeries::FourierSeries(int dim, std::vector<FourierTerm> terms)
    : dim_(dim), terms_(std::move(terms)) {
  check_dim(dim);
  if (dim == 1) {
    for (const auto& t : terms_) {
      if (t.k[1] != 0) throw InvalidArgument("1-d series with a second index");
    }
  }
}

FourierSeries FourierSeries::constant(int dim, double c) {
  return FourierSeries(dim, {FourierTerm{{0, 0}, c, 0.0}});
}

double FourierSeries::value(const Point& x) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    const double p = phase(t, x);
    v += t.cos_coef * std::cos(p) + t.sin_coef * std::sin(p);
  }
  return v;
}

Point FourierSeries::gradient(const Point& x) const {
  Point g = Point::Zero(dim_);
  for (const auto& t : terms_) {
    const double p = phase(t, x);
    const double s = kTwoPi * (-t.cos_coef * std::sin(p) + t.sin_coef * std::cos(p));
    for (int i = 0; i < dim_; ++i) g[i] += s * t.k[i];
  }
  return g;
}

Mat FourierSeries::hessian(const Point& x) const {
  Mat h = Mat::Zero(dim_, dim_);
  for (const auto& t : terms_) {
    const double p = phase(t, x);
    const double s = -kTwoPi * kTwoPi * (t.cos_coef * std::cos(p) + t.sin_coef * std::sin(p));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) h(i, j) += s * t.k[i] * t.k[j];
  }
  return h;
}

double FourierSeries::lipschitz_bound() const {
  double l = 0.0;
  for (const auto& t : terms_) {
    const double kn = std::hypot(t.k[0], t.k[1]);
    l += kTwoPi * kn * (std::abs(t.cos_coef) + std::abs(t.sin_coef));
  }
  return l;
}

double FourierSeries::sup_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.cos_coef) + std::abs(t.sin_coef);
  return s;
}

FourierSeries FourierSeries::canonical() const {
  // cos is even and sin odd in k, so fold every mode onto a representative
  // with the first nonzero index positive.
  std::map<std::array<int, 2>, std::pair<double, double>> acc;
  for (const auto& t : terms_) {
    auto k = t.k;
    double a = t.cos_coef, b = t.sin_coef;
    if (k[0] < 0 || (k[0] == 0 && k[1] < 0)) {
      k = {-k[0], -k[1]};
      b = -b;
    }
    if (k[0] == 0 && k[1] == 0) b = 0.0;
    auto& slot = acc[k];
    slot.first += a;
    slot.second += b;
  }
  std::vector<FourierTerm> out;
  for (const auto& [k, ab] : acc) {
    if (ab.first != 0.0 || ab.second != 0.0) out.push_back({k, ab.first, ab.second});
  }
  return FourierSeries(dim_, std::move(out));
}

FourierSeries FourierSeries::derivative(int axis) const {
  std::vector<FourierTerm> out;
  for (const auto& t : terms_) {
    const double f = kTwoPi * t.k[axis];
    if (f == 0.0) continue;
    // d/dx [a cos + b sin] = f (b cos - a sin)
    out.push_back({t.k, f * t.sin_coef, -f * t.cos_coef});
  }
  return FourierSeries(dim_, std::move(out));
}

FourierSeries FourierSeries::operator+(const FourierSeries& other) const {
  if (other.dim_ != dim_) throw DimMismatch("adding Fourier series");
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return FourierSeries(dim_, std::move(terms)).canonical();
}

FourierSeries FourierSeries::operator*(double s) const {
  auto terms = terms_;
  for (auto& t : terms) {
    t.cos_coef *= s;
    t.sin_coef *= s;
  }
  return FourierSeries(dim_, std::move(terms));
}

bool operator==(const FourierSeries& a, const FourierSeries& b) {
  if (a.dim_ != b.dim_) return false;
  const auto ca = a.canonical(), cb = b.canonical();
  if (ca.terms_.size() != cb.terms_.size()) return false;
  for (std::size_t i = 0; i < ca.terms_.size(); ++i) {
    const auto& x = ca.terms_[i];
    const auto& y = cb.terms_[i];
    if (x.k != y.k || x.cos_coef != y.cos_coef || x.sin_coef != y.sin_coef) return false;
  }
  return true;
}

LinearCombinationField::LinearCombinationField(
    std::vector<std::pair<double, std::shared_ptr<const ScalarField>>> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) throw InvalidArgument("empty linear combination");
  dim_ = parts_.front().second->dim();
  for (const auto& [w, f] : parts_) {
    if (f->dim() != dim_) throw DimMismatch("linear combination of fields");
  }
}

double LinearCombinationField::value(const Point& x) const {
  double v = 0.0;
  for (const auto& [w, f] : parts_) v += w * f->value(x);
  return v;
}

Point LinearCombinationField::gradient(const Point& x) const {
  Point g = Point::Zero(dim_);
  for (const auto& [w, f] : parts_) g += w * f->gradient(x);
  return g;
}

Mat LinearCombinationField::hessian(const Point& x) const {
  Mat h = Mat::Zero(dim_, dim_);
  for (const auto& [w, f] : parts_) h += w * f->hessian(x);
  return h;
}

double LinearCombinationField::lipschitz_bound() const {
  double l = 0.0;
  for (const auto& [w, f] : parts_) {
    const double lf = f->lipschitz_bound();
    if (lf < 0.0) return -1.0;
    l += std::abs(w) * lf;
  }
  return l;
}

OneForm::OneForm(std::vector<FourierSeries> components)
    : components_(std::move(components)) {
  const int d = dim();
  check_dim(d);
  for (const auto& c : components_) {
    if (c.dim() != d) throw DimMismatch("one-form component dimension");
  }
}

OneForm OneForm::zero(int dim) {
  return OneForm(std::vector<FourierSeries>(dim, FourierSeries(dim)));
}

Point OneForm::value(const Point& x) const {
  Point v(dim());
  for (int j = 0; j < dim(); ++j) v[j] = components_[j].value(x);
  return v;
}

Mat OneForm::jacobian(const Point& x) const {
  Mat j(dim(), dim());
  for (int r = 0; r < dim(); ++r) j.row(r) = components_[r].gradient(x).transpose();
  return j;
}

double OneForm::sup_bound() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.sup_bound() * c.sup_bound();
  return std::sqrt(s);
}

bool OneForm::is_zero() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const FourierSeries& c) { return c.is_zero(); });
}

bool OneForm::is_closed() const {
  if (dim() == 1) return true;
  const FourierSeries curl =
      components_[1].derivative(0) + components_[0].derivative(1) * -1.0;
  // tolerate rounding in the folded coefficients
  for (const auto& t : curl.canonical().terms()) {
    if (std::abs(t.cos_coef) > 1e-14 || std::abs(t.sin_coef) > 1e-14) return false;
  }
  return true;
}

namespace {

// Newton iteration on the gradient with a trust cap, falling back to gradient
// steps when the Hessian is not definite in the right direction.
Point polish_extremum(const ScalarField& f, Point x, bool maximize) {
  const double sgn = maximize ? 1.0 : -1.0;
  for (int it = 0; it < 200; ++it) {
    const Point g = f.gradient(x);
    if (g.norm() < 1e-14) break;
    const Mat h = f.hessian(x);
    Point step;
    const Mat hs = -sgn * h;
    Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(hs)};
    if (llt.info() == Eigen::Success) {
      step = Point(sgn * llt.solve(Eigen::VectorXd(g)));
    } else {
      step = sgn * g * (0.02 / (1.0 + g.norm()));
    }
    const double cap = 0.02;
    if (step.norm() > cap) step *= cap / step.norm();
    const double v0 = f.value(x);
    double a = 1.0;
    Point xn = x + a * step;
    while (sgn * (f.value(xn) - v0) < 0.0 && a > 1e-8) {
      a *= 0.5;
      xn = x + a * step;
    }
    if (a <= 1e-8) break;
    x = xn;
  }
  return wrap_unit(x);
}

template <class Fn>
void for_grid(int dim, int n, Fn&& fn) {
  if (dim == 1) {
    for (int i = 0; i < n; ++i) fn(make_point((i + 0.5) / n));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fn(make_point((i + 0.5) / n, (j + 0.5) / n));
  }
}

}  // namespace

FieldExtrema scan_extrema(const ScalarField& f, int resolution) {
  struct Sample {
    double v;
    Point x;
  };
  std::vector<Sample> samples;
  for_grid(f.dim(), resolution, [&](const Point& x) { samples.push_back({f.value(x), x}); });

  const std::size_t keep = std::min<std::size_t>(8, samples.size());
  auto polish_best = [&](bool maximize) {
    std::partial_sort(samples.begin(), samples.begin() + keep, samples.end(),
                      [&](const Sample& a, const Sample& b) {
                        return maximize ? a.v > b.v : a.v < b.v;
                      });
    Sample best = samples.front();
    for (std::size_t i = 0; i < keep; ++i) {
      Point p = polish_extremum(f, samples[i].x, maximize);
      const double v = f.value(p);
      if (maximize ? v > best.v : v < best.v) best = {v, p};
    }
    return best;
  };

  FieldExtrema e;
  const Sample hi = polish_best(true);
  const Sample lo = polish_best(false);
  e.max = hi.v;
  e.argmax = hi.x;
  e.min = lo.v;
  e.argmin = lo.x;
  return e;
}

std::vector<Point> local_maxima(const ScalarField& f, int resolution) {
  std::vector<std::pair<double, Point>> found;
  for_grid(f.dim(), resolution, [&](const Point& seed) {
    Point p = polish_extremum(f, seed, true);
    if (f.gradient(p).norm() > 1e-8) return;
    for (const auto& [v, q] : found) {
      if (torus_distance(p, q) < 1e-6) return;
    }
    found.emplace_back(f.value(p), p);
  });
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Point> out;
  for (auto& [v, p] : found) out.push_back(p);
  return out;
}

}  // namespace aubry
