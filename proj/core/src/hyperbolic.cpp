#include "aubry/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace aubry {

namespace {

using Int4 = std::array<std::int64_t, 4>;
__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

Eigen::Vector2d unit_eigenvector(const Int4& m, double lambda) {
  Eigen::Vector2d v;
  if (m[1] != 0) {
    v << static_cast<double>(m[1]), lambda - static_cast<double>(m[0]);
  } else {
    v << lambda - static_cast<double>(m[3]), static_cast<double>(m[2]);
  }
  v.normalize();
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
  return v;
}

std::optional<Int4> mul(const Int4& a, const Int4& b) {
  Int4 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      std::int64_t p1, p2, s;
      if (__builtin_mul_overflow(a[2 * i], b[j], &p1) ||
          __builtin_mul_overflow(a[2 * i + 1], b[2 + j], &p2) || __builtin_add_overflow(p1, p2, &s)) {
        return std::nullopt;
      }
      out[static_cast<std::size_t>(2 * i + j)] = s;
    }
  }
  return out;
}

std::optional<Int4> power(Int4 base, unsigned long n) {
  Int4 acc{1, 0, 0, 1};
  while (n > 0) {
    if (n & 1UL) {
      auto next = mul(acc, base);
      if (!next) return std::nullopt;
      acc = *next;
    }
    n >>= 1;
    if (n > 0) {
      auto sq = mul(base, base);
      if (!sq) return std::nullopt;
      base = *sq;
    }
  }
  return acc;
}

// frac(k * x) without rounding the product: x is a dyadic rational.
double frac_mul(std::int64_t k, double x) {
  if (k == 0 || x == 0.0) return 0.0;
  int e = 0;
  const double f = std::frexp(x, &e);
  const auto mant = static_cast<std::int64_t>(std::ldexp(f, 53));
  const int shift = 53 - e;
  if (shift <= 0) return 0.0;
  if (shift > 120) return wrap_unit(static_cast<double>(static_cast<long double>(k) * x));
  const i128 p = static_cast<i128>(k) * mant;
  const auto mask = (static_cast<u128>(1) << shift) - 1;
  const auto r = static_cast<u128>(p) & mask;
  return std::ldexp(static_cast<double>(r), -shift);
}

Point mat_mod1(const Int4& m, const Point& x) {
  return make_point(wrap_unit(frac_mul(m[0], x[0]) + frac_mul(m[1], x[1])),
                    wrap_unit(frac_mul(m[2], x[0]) + frac_mul(m[3], x[1])));
}

Eigen::Vector2d cover_image(const ToralAutomorphism& tm, const Point& p) {
  return tm.matrix() * Eigen::Vector2d(p[0], p[1]);
}

Eigen::Vector2d jump(const ToralAutomorphism& tm, const Point& from, const Point& to) {
  const Eigen::Vector2d t = cover_image(tm, from);
  Point d = wrap_centered(make_point(to[0] - t[0], to[1] - t[1]));
  return {d[0], d[1]};
}

Point as_point(const Eigen::Vector2d& v) { return make_point(v[0], v[1]); }

void require_planar(const std::vector<Point>& pts) {
  for (const auto& p : pts) {
    if (p.size() != 2) throw DimMismatch("toral automorphisms act on 2D points");
  }
}

void check_threshold(double delta) {
  if (!(delta < kShadowThreshold)) {
    throw ThresholdExceeded("delta = " + std::to_string(delta) + " must be below " +
                            std::to_string(kShadowThreshold));
  }
}

}  // namespace

ToralAutomorphism::ToralAutomorphism(Int4 m) : m_(m) {
  const i128 d = static_cast<i128>(m[0]) * m[3] - static_cast<i128>(m[1]) * m[2];
  if (d != 1 && d != -1) throw InvalidArgument("determinant must be +-1");
  det_ = static_cast<int>(d);
  const double tr = static_cast<double>(m[0]) + static_cast<double>(m[3]);
  const double disc = tr * tr - 4.0 * det_;
  if (disc <= 0.0) throw InvalidArgument("eigenvalues are not real and distinct");
  const double root = std::sqrt(disc);
  const double l1 = 0.5 * (tr + root), l2 = 0.5 * (tr - root);
  lambda_u_ = std::abs(l1) >= std::abs(l2) ? l1 : l2;
  if (!(std::abs(lambda_u_) > 1.0 + 1e-12)) throw InvalidArgument("eigenvalue on the unit circle");
  lambda_s_ = det_ / lambda_u_;
  e_u_ = unit_eigenvector(m_, lambda_u_);
  e_s_ = unit_eigenvector(m_, lambda_s_);
  basis_.col(0) = e_s_;
  basis_.col(1) = e_u_;
  basis_inv_ = basis_.inverse();
}

Eigen::Matrix2d ToralAutomorphism::matrix() const {
  Eigen::Matrix2d a;
  a << static_cast<double>(m_[0]), static_cast<double>(m_[1]), static_cast<double>(m_[2]),
      static_cast<double>(m_[3]);
  return a;
}

Int4 ToralAutomorphism::inverse_entries() const {
  return {det_ * m_[3], -det_ * m_[1], -det_ * m_[2], det_ * m_[0]};
}

double ToralAutomorphism::Q() const {
  return 1.0 / (1.0 - std::abs(lambda_s_)) + 1.0 / (1.0 - 1.0 / std::abs(lambda_u_));
}

double ToralAutomorphism::condition() const {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(basis_);
  const auto s = svd.singularValues();
  return s[0] / s[1];
}

Point apply(const ToralAutomorphism& tm, const Point& x, long n) {
  if (x.size() != 2) throw DimMismatch("toral automorphisms act on 2D points");
  const Point x0 = wrap_unit(x);
  if (n == 0) return x0;
  const Int4 step = n > 0 ? tm.entries() : tm.inverse_entries();
  const unsigned long k = n > 0 ? static_cast<unsigned long>(n) : 0UL - static_cast<unsigned long>(n);
  if (auto p = power(step, k)) return mat_mod1(*p, x0);
  Point y = x0;
  for (unsigned long i = 0; i < k; ++i) y = mat_mod1(step, y);
  return y;
}

BracketResult bracket(const ToralAutomorphism& tm, const Point& x, const Point& y, double gamma) {
  if (x.size() != 2 || y.size() != 2) throw DimMismatch("toral automorphisms act on 2D points");
  const Point d0 = wrap_centered(make_point(y[0] - x[0], y[1] - x[1]));
  if (d0.norm() > kBracketChart) {
    throw OutOfLocalChart("d(x, y) = " + std::to_string(d0.norm()) + " exceeds the chart radius");
  }
  BracketResult best;
  double best_size = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      // x + s e_s = y + u e_u  <=>  s e_s - u e_u = y - x
      const Eigen::Vector2d c = tm.split(Eigen::Vector2d(d0[0] + i, d0[1] + j));
      const double size = std::max(std::abs(c[0]), std::abs(c[1]));
      if (size < best_size) {
        best_size = size;
        best.s = c[0];
        best.u = -c[1];
      }
    }
  }
  best.w = wrap_unit(as_point(Eigen::Vector2d(x[0], x[1]) + best.s * tm.e_s()));
  best.exists = best_size <= gamma;
  return best;
}

double max_jump(const ToralAutomorphism& tm, const std::vector<Point>& points, bool periodic) {
  require_planar(points);
  double m = 0.0;
  const std::size_t n = points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) m = std::max(m, jump(tm, points[i], points[i + 1]).norm());
  if (periodic && n > 0) m = std::max(m, jump(tm, points[n - 1], points[0]).norm());
  return m;
}

PseudoOrbit PseudoOrbit::make(const ToralAutomorphism& tm, std::vector<Point> points, double delta,
                              bool periodic) {
  if (points.empty()) throw InvalidArgument("empty pseudo-orbit");
  const double actual = max_jump(tm, points, periodic);
  if (actual > delta * (1.0 + 1e-12) + 1e-15) {
    throw InvalidArgument("recorded delta " + std::to_string(delta) + " is below the largest jump " +
                          std::to_string(actual));
  }
  return PseudoOrbit{std::move(points), delta, periodic};
}

PseudoOrbit random_pseudo_orbit(const ToralAutomorphism& tm, std::size_t length, double delta,
                                std::mt19937_64& rng) {
  if (length == 0) throw InvalidArgument("empty pseudo-orbit");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts;
  pts.reserve(length);
  pts.push_back(make_point(unit(rng), unit(rng)));
  for (std::size_t i = 1; i < length; ++i) {
    const double r = delta * unit(rng);
    const double th = 2.0 * std::numbers::pi * unit(rng);
    const Eigen::Vector2d t = cover_image(tm, pts.back());
    pts.push_back(wrap_unit(make_point(t[0] + r * std::cos(th), t[1] + r * std::sin(th))));
  }
  return PseudoOrbit::make(tm, std::move(pts), delta);
}

ShadowResult shadow(const ToralAutomorphism& tm, const PseudoOrbit& p) {
  check_threshold(p.delta);
  require_planar(p.points);
  const std::size_t n = p.points.size();
  if (n == 0) throw InvalidArgument("empty pseudo-orbit");
  const double ls = tm.lambda_s(), lu = tm.lambda_u();

  // c_{i+1} = T c_i - e_i, split into stable (forward) and unstable (backward) parts
  std::vector<Eigen::Vector2d> e(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = tm.split(jump(tm, p.points[i], p.points[i + 1]));
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) a[i + 1] = ls * a[i] - e[i][0];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i + 1] + e[i][1]) / lu;

  ShadowResult out;
  std::vector<Point> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d c = a[i] * tm.e_s() + b[i] * tm.e_u();
    x[i] = wrap_unit(make_point(p.points[i][0] + c[0], p.points[i][1] + c[1]));
    out.eps_achieved = std::max(out.eps_achieved, torus_distance(x[i], p.points[i]));
  }
  out.residual = max_jump(tm, x, false);
  out.start = x[0];
  return out;
}

void Specification::validate(const ToralAutomorphism& tm) const {
  if (times.size() != points.size() || times.empty()) {
    throw InvalidArgument("specification needs one time per point");
  }
  require_planar(points);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const long gap = times[i + 1] - times[i];
    if (gap < L) throw InvalidArgument("gap " + std::to_string(gap) + " below L at index " + std::to_string(i));
    const double d = torus_distance(apply(tm, points[i], gap), points[i + 1]);
    if (d > delta * (1.0 + 1e-12) + 1e-15) {
      throw InvalidArgument("jump " + std::to_string(d) + " exceeds delta at index " + std::to_string(i));
    }
  }
}

PseudoOrbit Specification::expand(const ToralAutomorphism& tm) const {
  validate(tm);
  std::vector<Point> out;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    for (long j = 0; j < times[i + 1] - times[i]; ++j) out.push_back(apply(tm, points[i], j));
  }
  out.push_back(wrap_unit(points.back()));
  return PseudoOrbit::make(tm, std::move(out), delta);
}

double expansivity_gap(const ToralAutomorphism& tm, const Point& x, const Point& y, int L,
                       double beta) {
  if (L < 0) throw InvalidArgument("L must be nonnegative");
  for (long k = 0; k <= L; ++k) {
    for (long n : {k, -k}) {
      const double d = torus_distance(apply(tm, x, n), apply(tm, y, n));
      if (d > beta) {
        throw HypothesisViolated("orbits separate by " + std::to_string(d) + " > beta at n = " +
                                 std::to_string(n));
      }
      if (k == 0) break;
    }
  }
  return torus_distance(x, y);
}

PeriodicShadow periodic_shadow(const ToralAutomorphism& tm, const PseudoOrbit& p) {
  check_threshold(p.delta);
  require_planar(p.points);
  const std::size_t n = p.points.size();
  if (n == 0) throw InvalidArgument("empty pseudo-orbit");
  if (max_jump(tm, p.points, true) > p.delta * (1.0 + 1e-12) + 1e-15) {
    throw InvalidArgument("pseudo-orbit is not delta-periodic");
  }
  const double ls = tm.lambda_s(), lu = tm.lambda_u();
  std::vector<Eigen::Vector2d> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = tm.split(jump(tm, p.points[i], p.points[(i + 1) % n]));

  // cyclic solutions of a_{i+1} = ls a_i - alpha_i and b_{i+1} = lu b_i - beta_i
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa = ls * sa - e[i][0];
    sb = sb / lu + e[n - 1 - i][1] / lu;
  }
  std::vector<double> a(n), b(n + 1);
  a[0] = sa / (1.0 - std::pow(ls, static_cast<double>(n)));
  for (std::size_t i = 0; i + 1 < n; ++i) a[i + 1] = ls * a[i] - e[i][0];
  b[n] = sb / (1.0 - std::pow(1.0 / lu, static_cast<double>(n)));
  for (std::size_t i = n; i-- > 0;) b[i] = (b[i + 1] + e[i][1]) / lu;

  PeriodicShadow out;
  Point x0 = wrap_unit(make_point(p.points[0][0] + a[0] * tm.e_s()[0] + b[0] * tm.e_u()[0],
                                  p.points[0][1] + a[0] * tm.e_s()[1] + b[0] * tm.e_u()[1]));

  const auto tn = power(tm.entries(), n);
  if (tn) {
    // snap to the exact rational solution of (T^N - I) x = k
    const i128 m0 = (*tn)[0] - 1, m1 = (*tn)[1], m2 = (*tn)[2], m3 = (*tn)[3] - 1;
    const i128 det = m0 * m3 - m1 * m2;
    const long double y0 = static_cast<long double>(m0) * x0[0] + static_cast<long double>(m1) * x0[1];
    const long double y1 = static_cast<long double>(m2) * x0[0] + static_cast<long double>(m3) * x0[1];
    const auto k0 = static_cast<i128>(std::llround(y0)), k1 = static_cast<i128>(std::llround(y1));
    const i128 ad = det < 0 ? -det : det;
    auto residue = [&](i128 num) {
      if (det < 0) num = -num;
      i128 r = num % ad;
      return r < 0 ? r + ad : r;
    };
    const i128 r0 = residue(m3 * k0 - m1 * k1), r1 = residue(-m2 * k0 + m0 * k1);
    auto as_double = [&](i128 r) { return static_cast<double>(static_cast<long double>(r) / static_cast<long double>(ad)); };
    const Point snapped = make_point(as_double(r0), as_double(r1));
    if (det != 0 && ad < (i128{1} << 62) && torus_distance(snapped, x0) < 1e-9) {
      x0 = snapped;
      out.numerator = {static_cast<std::int64_t>(r0), static_cast<std::int64_t>(r1)};
      out.denominator = static_cast<std::int64_t>(ad);
      // T^N r - r must be divisible by the denominator
      const i128 c0 = (*tn)[0] * r0 + (*tn)[1] * r1 - r0;
      const i128 c1 = (*tn)[2] * r0 + (*tn)[3] * r1 - r1;
      const double f0 = static_cast<double>(residue(c0)) / static_cast<double>(ad);
      const double f1 = static_cast<double>(residue(c1)) / static_cast<double>(ad);
      out.closing_error = std::hypot(std::min(f0, 1.0 - f0), std::min(f1, 1.0 - f1));
    } else {
      const double c0 = frac_mul((*tn)[0], x0[0]) + frac_mul((*tn)[1], x0[1]) - x0[0];
      const double c1 = frac_mul((*tn)[2], x0[0]) + frac_mul((*tn)[3], x0[1]) - x0[1];
      out.closing_error = std::hypot(c0 - std::round(c0), c1 - std::round(c1));
    }
  } else {
    out.closing_error = torus_distance(apply(tm, x0, static_cast<long>(n)), x0);
  }

  out.start = x0;
  Point xi = x0;
  for (std::size_t i = 0; i < n; ++i) {
    out.eps_achieved = std::max(out.eps_achieved, torus_distance(xi, p.points[i]));
    xi = apply(tm, xi, 1);
  }
  return out;
}

double segment_spacing(const ToralAutomorphism& tm, double T, double delta, double fraction) {
  return fraction * delta / std::pow(std::abs(tm.lambda_u()), T);
}

LabeledOrbitEnsemble unstable_segment_ensemble(const ToralAutomorphism& tm, const Point& start,
                                               std::size_t count, double spacing, int past,
                                               int future, int bits) {
  if (bits < 1 || bits > 30) throw InvalidArgument("lattice bits must be in 1..30");
  if (past < 0 || future < 0) throw InvalidArgument("negative horizon");
  for (auto v : tm.entries()) {
    if (v > (1LL << 30) || v < -(1LL << 30)) throw InvalidArgument("matrix entries too large for the lattice");
  }
  const std::int64_t mod = std::int64_t{1} << bits;
  const auto md = static_cast<double>(mod);
  auto reduce = [mod](std::int64_t v) {
    v %= mod;
    return v < 0 ? v + mod : v;
  };
  auto step = [&](const Int4& m, std::array<std::int64_t, 2> p) {
    return std::array<std::int64_t, 2>{reduce(m[0] * p[0] + m[1] * p[1]),
                                       reduce(m[2] * p[0] + m[3] * p[1])};
  };

  LabeledOrbitEnsemble F;
  F.dim = 2;
  F.dt = 1.0;
  F.origin = static_cast<std::size_t>(past);
  const std::size_t len = static_cast<std::size_t>(past + future + 1);
  std::vector<double> flat(2 * len);
  for (std::size_t j = 0; j < count; ++j) {
    const Point q = wrap_unit(make_point(start[0] + static_cast<double>(j) * spacing * tm.e_u()[0],
                                         start[1] + static_cast<double>(j) * spacing * tm.e_u()[1]));
    const std::array<std::int64_t, 2> p0{reduce(std::llround(q[0] * md)), reduce(std::llround(q[1] * md))};
    auto p = p0;
    for (int s = 0; s <= future; ++s) {
      const std::size_t at = 2 * static_cast<std::size_t>(past + s);
      flat[at] = static_cast<double>(p[0]) / md;
      flat[at + 1] = static_cast<double>(p[1]) / md;
      p = step(tm.entries(), p);
    }
    p = p0;
    for (int s = 1; s <= past; ++s) {
      p = step(tm.inverse_entries(), p);
      const std::size_t at = 2 * static_cast<std::size_t>(past - s);
      flat[at] = static_cast<double>(p[0]) / md;
      flat[at + 1] = static_cast<double>(p[1]) / md;
    }
    F.add_orbit(flat);
  }
  return F;
}

Point perturbed_map(const ToralAutomorphism& tm, double eps, const Point& x) {
  const Eigen::Vector2d t = cover_image(tm, x);
  const double kick = eps / (2.0 * std::numbers::pi) * std::sin(2.0 * std::numbers::pi * x[0]);
  return wrap_unit(make_point(t[0] + kick, t[1] + kick));
}

LabeledOrbitEnsemble perturbed_segment_ensemble(const ToralAutomorphism& tm, double eps,
                                                const Point& start, std::size_t count,
                                                double spacing, int steps) {
  if (steps < 0) throw InvalidArgument("negative horizon");
  LabeledOrbitEnsemble F;
  F.dim = 2;
  F.dt = 1.0;
  std::vector<double> flat;
  for (std::size_t j = 0; j < count; ++j) {
    flat.clear();
    Point q = wrap_unit(make_point(start[0] + static_cast<double>(j) * spacing * tm.e_u()[0],
                                   start[1] + static_cast<double>(j) * spacing * tm.e_u()[1]));
    for (int s = 0; s <= steps; ++s) {
      flat.push_back(q[0]);
      flat.push_back(q[1]);
      q = perturbed_map(tm, eps, q);
    }
    F.add_orbit(flat);
  }
  return F;
}

}  // namespace aubry
