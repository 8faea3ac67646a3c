#include <algorithm>
#include <cmath>
#include <random>

#include "aubry/action.hpp"

namespace aubry {

namespace {

// For a fixed loop shape with n knots the discrete action is
//   S(T) = K / T + E + (k - Ubar) T,
// so the best duration of a shape is available in closed form.
struct ShapeTerms {
  double K = 0.0;
  double E = 0.0;
  double Ubar = 0.0;
};

ShapeTerms shape_terms(const MechanicalLagrangian& L, const BrokenPath& p, bool with_eta) {
  ShapeTerms s;
  const auto segs = static_cast<double>(p.size() - 1);
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    const Point a = p.knots[j];
    const Point d = p.knots[j + 1] - a;
    s.K += 0.5 * segs * d.squaredNorm();
    for (std::size_t g = 0; g < Gauss3::nodes.size(); ++g) {
      const Point q = a + Gauss3::nodes[g] * d;
      s.Ubar += Gauss3::weights[g] * L.potential().value(q);
      if (with_eta) s.E += Gauss3::weights[g] * L.oneform().value(q).dot(d);
    }
  }
  s.Ubar /= segs;
  return s;
}

constexpr double kMaxDuration = 1e6;
constexpr double kMinDuration = 1e-4;

double best_duration(const ShapeTerms& s, double k) {
  const double a = k - s.Ubar;
  if (s.K <= 0.0) return 1.0;
  if (a <= 0.0) return kMaxDuration;
  return std::clamp(std::sqrt(s.K / a), kMinDuration, kMaxDuration);
}

struct Candidate {
  BrokenPath shape;  // duration is the optimal one
  double action;
};

class Search {
 public:
  Search(const MechanicalLagrangian& L, double k, const LoopSearchOptions& opts)
      : L_(L), k_(k), opts_(opts), with_eta_(!L.oneform().is_zero()) {}

  // Evaluates a shape at its best duration. Returns true when it is a witness.
  bool offer(BrokenPath shape) {
    if (result_.candidates >= opts_.budget) return false;
    ++result_.candidates;
    const ShapeTerms st = shape_terms(L_, shape, with_eta_);
    shape.duration = best_duration(st, k_);
    const double s = action(L_, shape, k_);
    if (!std::isfinite(s)) return false;
    if (s < -opts_.negative_tol * std::max(1.0, shape.duration)) {
      result_.found = true;
      result_.loop = std::move(shape);
      result_.action = s;
      return true;
    }
    keep(Candidate{std::move(shape), s});
    return false;
  }

  bool exhausted() const { return result_.candidates >= opts_.budget; }
  std::size_t remaining() const { return opts_.budget - result_.candidates; }
  const std::vector<Candidate>& best() const { return best_; }
  LoopSearchResult take() { return std::move(result_); }
  bool found() const { return result_.found; }

 private:
  void keep(Candidate c) {
    const std::size_t cap = std::max<std::size_t>(opts_.minimized_loops, 1);
    if (best_.size() == cap && c.action >= best_.back().action) return;
    auto pos = std::upper_bound(best_.begin(), best_.end(), c.action,
                                [](double v, const Candidate& x) { return v < x.action; });
    best_.insert(pos, std::move(c));
    if (best_.size() > cap) best_.pop_back();
  }

  const MechanicalLagrangian& L_;
  double k_;
  const LoopSearchOptions& opts_;
  bool with_eta_;
  LoopSearchResult result_;
  std::vector<Candidate> best_;
};

std::vector<Point> grid_points(int dim, int n) {
  std::vector<Point> pts;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) pts.push_back(make_point((i + 0.5) / n));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pts.push_back(make_point((i + 0.5) / n, (j + 0.5) / n));
  }
  return pts;
}

std::vector<Eigen::VectorXi> loop_windings(int dim, int w_max) {
  std::vector<Eigen::VectorXi> out;
  for (int a = -w_max; a <= w_max; ++a) {
    for (int b = (dim == 1 ? 0 : -w_max); b <= (dim == 1 ? 0 : w_max); ++b) {
      if (a == 0 && b == 0) continue;
      Eigen::VectorXi w(dim);
      w[0] = a;
      if (dim == 2) w[1] = b;
      out.push_back(w);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& u, const auto& v) {
    return u.squaredNorm() < v.squaredNorm();
  });
  return out;
}

BrokenPath through(const std::vector<Point>& waypoints, std::size_t per_leg) {
  BrokenPath p;
  p.duration = 1.0;
  for (std::size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
    for (std::size_t i = 0; i < per_leg; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(per_leg);
      p.knots.push_back((1.0 - s) * waypoints[leg] + s * waypoints[leg + 1]);
    }
  }
  p.knots.push_back(waypoints.back());
  return p;
}

}  // namespace

LoopSearchResult find_negative_loop(const MechanicalLagrangian& L, double k,
                                    const LoopSearchOptions& opts) {
  if (opts.budget == 0) throw InvalidArgument("loop search budget must be positive");
  const int dim = L.dim();
  Search search(L, k, opts);

  const FieldExtrema ext = scan_extrema(L.potential(), dim == 1 ? 256 : 96);

  // Constant loops: the (L+k)-action of a rest point is (k - U(x)) T.
  std::vector<Point> bases{ext.argmax};
  for (const Point& x : grid_points(dim, dim == 1 ? 64 : 16)) bases.push_back(x);
  for (const Point& x : bases) {
    if (search.offer(BrokenPath::constant(x, 1.0, 2))) return search.take();
  }

  // Straight loops winding once or twice around the torus.
  std::vector<Point> loop_bases{ext.argmax, ext.argmin};
  for (const Point& x : grid_points(dim, dim == 1 ? 8 : 4)) loop_bases.push_back(x);
  const auto windings = loop_windings(dim, 2);
  for (const Point& x : loop_bases) {
    for (const auto& w : windings) {
      if (search.offer(BrokenPath::straight(x, x + w.cast<double>(), 1.0, 16))) {
        return search.take();
      }
    }
  }

  // Random waypoint loops, leaving room for the polishing stage.
  const std::size_t reserve = 4 * opts.minimized_loops;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> wind(-2, 2);
  std::uniform_int_distribution<int> legs(2, 4);
  while (search.remaining() > reserve) {
    Point x0(dim), w(dim);
    for (int c = 0; c < dim; ++c) {
      x0[c] = unit(rng);
      w[c] = wind(rng);
    }
    const int m = legs(rng);
    std::vector<Point> pts{x0};
    for (int j = 1; j < m; ++j) {
      Point p = x0 + (static_cast<double>(j) / m) * w;
      for (int c = 0; c < dim; ++c) p[c] += unit(rng) - 0.5;
      pts.push_back(p);
    }
    pts.push_back(x0 + w);
    if (search.offer(through(pts, 8))) return search.take();
  }

  // Newton polish of the most promising shapes, alternating with the
  // closed-form duration update.
  MinimizerOptions mo;
  mo.max_iterations = 50;
  const auto seeds = search.best();
  for (const Candidate& c : seeds) {
    BrokenPath shape = c.shape.resampled(32);
    shape.duration = std::clamp(shape.duration, 1e-2, 1e3);
    for (int round = 0; round < 3 && !search.exhausted(); ++round) {
      shape = minimize_path(L, shape, k, mo).path;
      if (search.offer(shape)) return search.take();
      const ShapeTerms st = shape_terms(L, shape, !L.oneform().is_zero());
      shape.duration = std::clamp(best_duration(st, k), 1e-2, 1e3);
    }
  }
  return search.take();
}

}  // namespace aubry
