#include "aubry/action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace aubry {

Eigen::VectorXi BrokenPath::winding(std::size_t i) const {
  const Point a = knots[i], b = knots[i + 1];
  Eigen::VectorXi w(a.size());
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    w[c] = static_cast<int>(std::floor(b[c]) - std::floor(a[c]));
  }
  return w;
}

BrokenPath BrokenPath::straight(const Point& from, const Point& to, double duration,
                                std::size_t n_knots) {
  if (n_knots < 2) throw InvalidArgument("a broken path needs at least two knots");
  if (!(duration > 0.0)) throw InvalidArgument("path duration must be positive");
  BrokenPath p;
  p.duration = duration;
  p.knots.reserve(n_knots);
  for (std::size_t i = 0; i < n_knots; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n_knots - 1);
    p.knots.push_back((1.0 - s) * from + s * to);
  }
  return p;
}

BrokenPath BrokenPath::constant(const Point& at, double duration, std::size_t n_knots) {
  return straight(at, at, duration, n_knots);
}

BrokenPath BrokenPath::resampled(std::size_t n_knots) const {
  if (n_knots < 2) throw InvalidArgument("a broken path needs at least two knots");
  BrokenPath p;
  p.duration = duration;
  p.knots.reserve(n_knots);
  const double last = static_cast<double>(knots.size() - 1);
  for (std::size_t i = 0; i < n_knots; ++i) {
    const double u = last * static_cast<double>(i) / static_cast<double>(n_knots - 1);
    const auto j = std::min(static_cast<std::size_t>(u), knots.size() - 2);
    const double s = u - static_cast<double>(j);
    p.knots.push_back((1.0 - s) * knots[j] + s * knots[j + 1]);
  }
  p.knots.front() = knots.front();
  p.knots.back() = knots.back();
  return p;
}

BrokenPath BrokenPath::rescaled(double new_duration) const {
  BrokenPath p = *this;
  p.duration = new_duration;
  return p;
}

namespace {

using Nodes = Gauss3;

double segment_action(const MechanicalLagrangian& L, const Point& a, const Point& b, double h,
                      bool with_eta) {
  const Point d = b - a;
  double s = 0.5 * d.squaredNorm() / h;
  for (std::size_t g = 0; g < Nodes::nodes.size(); ++g) {
    const Point q = a + Nodes::nodes[g] * d;
    double term = -h * L.potential().value(q);
    if (with_eta) term += L.oneform().value(q).dot(d);
    s += Nodes::weights[g] * term;
  }
  return s;
}

// Gradient of the eta part sum_g w_g eta(q_g).d with respect to (a, b).
void eta_gradient(const MechanicalLagrangian& L, const Point& a, const Point& b, Point& ga,
                  Point& gb) {
  const Point d = b - a;
  ga.setZero(a.size());
  gb.setZero(a.size());
  for (std::size_t g = 0; g < Nodes::nodes.size(); ++g) {
    const double s = Nodes::nodes[g], w = Nodes::weights[g];
    const Point q = a + s * d;
    const Point e = L.oneform().value(q);
    const Point jt = L.oneform().jacobian(q).transpose() * d;
    ga += w * ((1.0 - s) * jt - e);
    gb += w * (s * jt + e);
  }
}

void segment_gradient(const MechanicalLagrangian& L, const Point& a, const Point& b, double h,
                      bool with_eta, Point& ga, Point& gb) {
  const Point d = b - a;
  ga = -d / h;
  gb = d / h;
  for (std::size_t g = 0; g < Nodes::nodes.size(); ++g) {
    const double s = Nodes::nodes[g], w = Nodes::weights[g];
    const Point gu = L.potential().gradient(a + s * d);
    ga -= w * h * (1.0 - s) * gu;
    gb -= w * h * s * gu;
  }
  if (with_eta) {
    Point ea, eb;
    eta_gradient(L, a, b, ea, eb);
    ga += ea;
    gb += eb;
  }
}

struct SegmentHessian {
  Mat aa, ab, bb;
};

SegmentHessian segment_hessian(const MechanicalLagrangian& L, const Point& a, const Point& b,
                               double h, bool with_eta) {
  const int dim = static_cast<int>(a.size());
  const Mat id = Mat::Identity(dim, dim);
  SegmentHessian H{id / h, -id / h, id / h};
  const Point d = b - a;
  for (std::size_t g = 0; g < Nodes::nodes.size(); ++g) {
    const double s = Nodes::nodes[g], w = Nodes::weights[g];
    const Mat hu = L.potential().hessian(a + s * d);
    H.aa -= w * h * (1.0 - s) * (1.0 - s) * hu;
    H.ab -= w * h * (1.0 - s) * s * hu;
    H.bb -= w * h * s * s * hu;
  }
  if (with_eta) {
    // The eta part is rarely used; central differences of its exact gradient.
    constexpr double eps = 1e-6;
    for (int c = 0; c < dim; ++c) {
      Point ap = a, am = a, bp = b, bm = b;
      ap[c] += eps;
      am[c] -= eps;
      bp[c] += eps;
      bm[c] -= eps;
      Point ga_p, gb_p, ga_m, gb_m;
      eta_gradient(L, ap, b, ga_p, gb_p);
      eta_gradient(L, am, b, ga_m, gb_m);
      H.aa.col(c) += (ga_p - ga_m) / (2 * eps);
      eta_gradient(L, a, bp, ga_p, gb_p);
      eta_gradient(L, a, bm, ga_m, gb_m);
      H.bb.col(c) += (gb_p - gb_m) / (2 * eps);
      H.ab.col(c) += (ga_p - ga_m) / (2 * eps);
    }
    H.aa = 0.5 * (H.aa + H.aa.transpose()).eval();
    H.bb = 0.5 * (H.bb + H.bb.transpose()).eval();
  }
  return H;
}

// Gradient with respect to every knot (endpoints included).
std::vector<Point> path_gradient(const MechanicalLagrangian& L, const BrokenPath& p,
                                 bool with_eta) {
  const std::size_t n = p.size();
  const double h = p.step();
  std::vector<Point> g(n, Point::Zero(p.dim()));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Point ga, gb;
    segment_gradient(L, p.knots[j], p.knots[j + 1], h, with_eta, ga, gb);
    g[j] += ga;
    g[j + 1] += gb;
  }
  return g;
}

double residual_of(const std::vector<Point>& g, double h) {
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) r = std::max(r, g[i].norm());
  return r / h;
}

double action_without_k(const MechanicalLagrangian& L, const BrokenPath& p, bool with_eta) {
  const double h = p.step();
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    s += segment_action(L, p.knots[j], p.knots[j + 1], h, with_eta);
  }
  return s;
}

}  // namespace

double action(const MechanicalLagrangian& L, const BrokenPath& p, double k) {
  if (p.size() < 2) throw InvalidArgument("a broken path needs at least two knots");
  if (p.dim() != L.dim()) throw DimMismatch("path vs Lagrangian");
  return action_without_k(L, p, !L.oneform().is_zero()) + k * p.duration;
}

double el_residual(const MechanicalLagrangian& L, const BrokenPath& p) {
  return residual_of(path_gradient(L, p, !L.oneform().is_zero()), p.step());
}

MinimizerResult minimize_path(const MechanicalLagrangian& L, BrokenPath path, double k,
                              const MinimizerOptions& opts) {
  if (path.size() < 2) throw InvalidArgument("a broken path needs at least two knots");
  if (path.dim() != L.dim()) throw DimMismatch("path vs Lagrangian");
  const bool with_eta = !L.oneform().is_zero();
  const int dim = L.dim();
  const std::size_t n = path.size();
  const double h = path.step();
  const auto m = static_cast<Eigen::Index>((n - 2) * dim);

  MinimizerResult out;
  double S = action_without_k(L, path, with_eta);
  std::vector<Point> g = path_gradient(L, path, with_eta);
  out.residual = residual_of(g, h);

  if (m == 0) {
    out.path = std::move(path);
    out.action = S + k * out.path.duration;
    out.converged = true;
    return out;
  }

  using SpMat = Eigen::SparseMatrix<double>;
  Eigen::SimplicialLDLT<SpMat> solver;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(3 * m * dim));

  auto var = [dim](std::size_t knot, int c) {
    return static_cast<Eigen::Index>((knot - 1) * dim + c);
  };

  double damping = 0.0;
  std::vector<double> history;
  for (int it = 0; it < opts.max_iterations && out.residual > opts.residual_tol; ++it) {
    out.iterations = it + 1;

    trip.clear();
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const SegmentHessian sh = segment_hessian(L, path.knots[j], path.knots[j + 1], h, with_eta);
      const bool ia = j >= 1, ib = j + 1 <= n - 2;
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
          if (ia) trip.emplace_back(var(j, r), var(j, c), sh.aa(r, c));
          if (ib) trip.emplace_back(var(j + 1, r), var(j + 1, c), sh.bb(r, c));
          if (ia && ib) {
            trip.emplace_back(var(j, r), var(j + 1, c), sh.ab(r, c));
            trip.emplace_back(var(j + 1, c), var(j, r), sh.ab(r, c));
          }
        }
      }
    }
    SpMat H(m, m);
    H.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      solver.analyzePattern(H);
      analyzed = true;
    }

    Eigen::VectorXd grad(m);
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (int c = 0; c < dim; ++c) grad[var(i, c)] = g[i][c];

    const double scale = 1.0 / h;
    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      SpMat Hd = H;
      if (damping > 0.0) {
        for (Eigen::Index i = 0; i < m; ++i) Hd.coeffRef(i, i) += damping;
      }
      solver.factorize(Hd);
      if (solver.info() != Eigen::Success || (solver.vectorD().array() <= 0.0).any()) {
        damping = std::max(2.0 * damping, 1e-6 * scale);
        continue;
      }
      Eigen::VectorXd step = solver.solve(-grad);
      double largest = 0.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        double s2 = 0.0;
        for (int c = 0; c < dim; ++c) s2 += step[var(i, c)] * step[var(i, c)];
        largest = std::max(largest, std::sqrt(s2));
      }
      if (largest > opts.max_step) step *= opts.max_step / largest;

      const double slope = grad.dot(step);
      double alpha = 1.0;
      for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
        BrokenPath trial = path;
        for (std::size_t i = 1; i + 1 < n; ++i)
          for (int c = 0; c < dim; ++c) trial.knots[i][c] += alpha * step[var(i, c)];
        const double St = action_without_k(L, trial, with_eta);
        if (St <= S + 1e-4 * alpha * slope || (St <= S && alpha * largest < 1e-12)) {
          path = std::move(trial);
          S = St;
          stepped = true;
          break;
        }
      }
      if (!stepped) {
        damping = std::max(10.0 * damping, 1e-4 * scale);
      } else if (alpha == 1.0) {
        damping *= 0.1;
        if (damping < 1e-10 * scale) damping = 0.0;
      }
    }
    if (!stepped) break;
    // Nearly flat directions (where a path dwells near a maximum of U) can
    // creep for hundreds of steps; stop once the window gain is negligible.
    history.push_back(S);
    if (history.size() > 10 && history[history.size() - 11] - S <= 1e-7 * (1.0 + std::abs(S))) {
      break;
    }
    g = path_gradient(L, path, with_eta);
    out.residual = residual_of(g, h);
  }

  out.converged = out.residual <= opts.residual_tol;
  out.action = S + k * path.duration;
  out.path = std::move(path);
  return out;
}

namespace {

std::vector<Eigen::VectorXi> winding_classes(int dim, int max_winding) {
  std::vector<Eigen::VectorXi> out;
  for (int a = -max_winding; a <= max_winding; ++a) {
    if (dim == 1) {
      Eigen::VectorXi w(1);
      w << a;
      out.push_back(w);
      continue;
    }
    for (int b = -max_winding; b <= max_winding; ++b) {
      Eigen::VectorXi w(2);
      w << a, b;
      out.push_back(w);
    }
  }
  // try the short classes first
  std::stable_sort(out.begin(), out.end(), [](const auto& u, const auto& v) {
    return u.squaredNorm() < v.squaredNorm();
  });
  return out;
}

Point nearest_lift(const Point& x, const Point& y) {
  return x + wrap_centered(Point(y - x));
}

}  // namespace

BrokenPath tonelli_minimizer(const MechanicalLagrangian& L, const Point& x, const Point& y,
                             double T, std::size_t n_knots, const MinimizerOptions& opts) {
  if (!(T > 0.0)) throw InvalidArgument("T must be positive");
  if (n_knots < 3) throw InvalidArgument("need at least three knots");
  if (x.size() != L.dim() || y.size() != L.dim()) throw DimMismatch("endpoints");

  const Point base = nearest_lift(x, y);
  std::optional<MinimizerResult> best;
  std::optional<MinimizerResult> best_any;
  for (const auto& w : winding_classes(L.dim(), opts.max_winding)) {
    const Point target = base + w.cast<double>();
    MinimizerResult r =
        minimize_path(L, BrokenPath::straight(x, target, T, n_knots), 0.0, opts);
    if (!best_any || r.residual < best_any->residual) best_any = r;
    if (r.converged && (!best || r.action < best->action)) best = std::move(r);
  }
  if (!best) {
    throw NoConvergence("no winding class reached the residual tolerance", best_any->path,
                        best_any->residual);
  }
  return best->path;
}

namespace {

struct PotentialContext {
  const MechanicalLagrangian& L;
  double k;
  const PotentialOptions& opts;
  double u_max;      // rigorous upper bound on U
  double eta_max;    // upper bound on |eta|
  Point peak;        // a global maximizer of U

  std::size_t knots_for(double T) const {
    const auto n = static_cast<std::size_t>(std::ceil(T / opts.knot_spacing)) + 1;
    return std::clamp(n, opts.min_knots, opts.max_knots);
  }

  // Valid lower bound on the discrete action of any path of duration T with
  // cover displacement D.
  double lower_bound(double T, double D) const {
    const double kstar = std::max(D * D / T, eta_max * eta_max * T);
    return 0.5 * kstar - eta_max * std::sqrt(T * kstar) + (k - u_max) * T;
  }

  BrokenPath via_peak(const Point& x, const Point& y, double T, std::size_t n) const {
    const Point mid = 0.5 * (x + y);
    const Point z = nearest_lift(mid, peak);
    const double d1 = (z - x).norm(), d2 = (y - z).norm();
    const double speed = 1.0;
    const double t1 = std::min(T / 3.0, d1 / speed), t2 = std::min(T / 3.0, d2 / speed);
    BrokenPath p;
    p.duration = T;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
      if (t < t1) p.knots.push_back(x + (t / t1) * (z - x));
      else if (t > T - t2) p.knots.push_back(z + ((t - (T - t2)) / t2) * (y - z));
      else p.knots.push_back(z);
    }
    p.knots.front() = x;
    p.knots.back() = y;
    return p;
  }
};

struct ClassState {
  Point target;
  std::optional<BrokenPath> last;  // warm start from the previous duration
};

MinimizerResult solve_at(const PotentialContext& ctx, const Point& x, ClassState& cls, double T) {
  const std::size_t n = ctx.knots_for(T);
  BrokenPath start = cls.last ? cls.last->resampled(n).rescaled(T)
                              : BrokenPath::straight(x, cls.target, T, n);
  MinimizerResult r = minimize_path(ctx.L, std::move(start), ctx.k, ctx.opts.minimizer);
  if (T >= 1.0 && ctx.L.dim() >= 1) {
    MinimizerResult alt =
        minimize_path(ctx.L, ctx.via_peak(x, cls.target, T, n), ctx.k, ctx.opts.minimizer);
    if (alt.action < r.action) r = std::move(alt);
  }
  cls.last = r.path;
  return r;
}

}  // namespace

ActionValue action_potential(const MechanicalLagrangian& L, double k, const Point& x,
                             const Point& y, const PotentialOptions& opts) {
  if (x.size() != L.dim() || y.size() != L.dim()) throw DimMismatch("endpoints");
  if (!(opts.t_min > 0.0 && opts.t_max > opts.t_min && opts.t_samples >= 2)) {
    throw InvalidArgument("bad duration grid");
  }

  ActionValue result;
  LoopSearchOptions lo = opts.loops;
  lo.t_min = opts.t_min;
  lo.t_max = opts.t_max;
  if (const auto loop = find_negative_loop(L, k, lo); loop.found) {
    result.neg_infinity = true;
    result.certificate = loop.loop;
    return result;
  }

  const int res = L.dim() == 1 ? 256 : 128;
  const FieldExtrema ext = scan_extrema(L.potential(), res);
  double lip = std::max(0.0, L.potential().lipschitz_bound());
  const double slack = lip * 0.5 * std::sqrt(static_cast<double>(L.dim())) / res;
  const PotentialContext ctx{L, k, opts, ext.max + slack, L.oneform().sup_bound(), ext.argmax};

  const Point xs = wrap_unit(x);
  const Point base = nearest_lift(xs, wrap_unit(y));
  std::vector<ClassState> classes;
  for (const auto& w : winding_classes(L.dim(), opts.minimizer.max_winding)) {
    classes.push_back({base + w.cast<double>(), std::nullopt});
  }

  double best = std::numeric_limits<double>::infinity();
  std::optional<BrokenPath> best_path;
  std::size_t best_class = 0;
  int best_index = -1;
  std::vector<double> grid(static_cast<std::size_t>(opts.t_samples));
  for (int i = 0; i < opts.t_samples; ++i) {
    grid[static_cast<std::size_t>(i)] =
        opts.t_min * std::pow(opts.t_max / opts.t_min,
                              static_cast<double>(i) / (opts.t_samples - 1));
  }

  std::vector<std::optional<MinimizerResult>> slot(classes.size());
  for (int ti = 0; ti < opts.t_samples; ++ti) {
    const double T = grid[static_cast<std::size_t>(ti)];
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const double D = (classes[c].target - xs).norm();
      if (ctx.lower_bound(T, D) < best) active.push_back(c);
      else classes[c].last.reset();
    }
    for (auto& s : slot) s.reset();
    parallel_for(active.size(), opts.threads, [&](std::size_t a) {
      const std::size_t c = active[a];
      slot[c] = solve_at(ctx, xs, classes[c], T);
    });
    for (std::size_t c : active) {
      if (slot[c] && slot[c]->action < best) {
        best = slot[c]->action;
        best_path = slot[c]->path;
        best_class = c;
        best_index = ti;
      }
    }
  }

  // Golden-section refinement on log T in the winning class. At the short end
  // the bracket is allowed to leave the grid, since Phi_k(x, y) may be reached
  // as T -> 0 for nearby endpoints.
  if (best_index >= 0 && opts.refine_steps > 0) {
    const auto bi = static_cast<std::size_t>(best_index);
    double lo_t = bi == 0 ? opts.t_min * 1e-3 : grid[bi - 1];
    double hi_t = bi + 1 < grid.size() ? grid[bi + 1] : grid[bi];
    double a = std::log(lo_t), b = std::log(hi_t);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    ClassState cls{classes[best_class].target, best_path};
    auto eval = [&](double logT) {
      ClassState c = cls;
      MinimizerResult r = solve_at(ctx, xs, c, std::exp(logT));
      if (r.action < best) {
        best = r.action;
        best_path = r.path;
      }
      return r.action;
    };
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    double f1 = eval(c1), f2 = eval(c2);
    for (int it = 0; it < opts.refine_steps; ++it) {
      if (f1 < f2) {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - phi * (b - a);
        f1 = eval(c1);
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + phi * (b - a);
        f2 = eval(c2);
      }
    }
  }

  result.value = best;
  result.minimizer = best_path;
  return result;
}

CriticalValue critical_value(const MechanicalLagrangian& L, const CriticalValueOptions& opts) {
  const FieldExtrema ext = scan_extrema(L.potential(), L.dim() == 1 ? 256 : 128);
  const double eta = L.oneform().sup_bound();
  double lip = std::max(0.0, L.potential().lipschitz_bound());
  const double slack = lip * 0.5 * std::sqrt(static_cast<double>(L.dim())) /
                       (L.dim() == 1 ? 256 : 128);

  // Below min U every constant loop is negative; above sup(U + |eta|^2/2) the
  // integrand k + L is pointwise nonnegative.
  double lo = ext.min - 1.0;
  double hi = ext.max + slack + 0.5 * eta * eta + 1e-6;

  CriticalValue cv;
  const auto at_lo = find_negative_loop(L, lo, opts.loops);
  if (!at_lo.found) throw BudgetExceeded("no negative loop below min U");
  cv.witness = at_lo.loop;
  if (find_negative_loop(L, hi, opts.loops).found) {
    throw BudgetExceeded("negative loop above the pointwise bound");
  }

  for (int it = 0; it < opts.max_bisections && hi - lo > opts.width; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto r = find_negative_loop(L, mid, opts.loops);
    if (r.found) {
      lo = mid;
      cv.witness = r.loop;
    } else {
      hi = mid;
    }
  }
  cv.lower = lo;
  cv.upper = hi;
  cv.value = 0.5 * (lo + hi);
  return cv;
}

double staticity_defect(const MechanicalLagrangian& L, double c, const Point& x, const Point& y,
                        const PotentialOptions& opts) {
  const ActionValue xy = action_potential(L, c, x, y, opts);
  const ActionValue yx = action_potential(L, c, y, x, opts);
  if (xy.neg_infinity || yx.neg_infinity) {
    throw BelowCritical("the potential is -infinity at k = " + std::to_string(c));
  }
  return xy.value + yx.value;
}

}  // namespace aubry
