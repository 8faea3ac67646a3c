#include "aubry/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

namespace aubry {

double torus_metric(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int c = 0; c < dim; ++c) {
    const double d = wrap_centered(a[c] - b[c]);
    s += d * d;
  }
  return std::sqrt(s);
}

double euclidean_metric(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int c = 0; c < dim; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

void LabeledOrbitEnsemble::add_orbit(const std::vector<double>& flat) {
  const auto d = static_cast<std::size_t>(dim);
  if (dim < 1 || flat.size() % d != 0) throw InvalidArgument("orbit size is not a multiple of dim");
  const std::size_t len = flat.size() / d;
  if (length == 0) length = len;
  if (len != length) throw InvalidArgument("orbits must have equal length");
  coords.insert(coords.end(), flat.begin(), flat.end());
}

LabeledOrbitEnsemble LabeledOrbitEnsemble::subset(const std::vector<std::size_t>& which) const {
  LabeledOrbitEnsemble out;
  out.dim = dim;
  out.length = length;
  out.dt = dt;
  out.origin = origin;
  out.metric = metric;
  const std::size_t stride = length * static_cast<std::size_t>(dim);
  for (std::size_t o : which) {
    out.coords.insert(out.coords.end(), coords.begin() + static_cast<std::ptrdiff_t>(o * stride),
                      coords.begin() + static_cast<std::ptrdiff_t>((o + 1) * stride));
    if (!labels.empty()) {
      out.labels.insert(out.labels.end(), labels.begin() + static_cast<std::ptrdiff_t>(o * length),
                        labels.begin() + static_cast<std::ptrdiff_t>((o + 1) * length));
    }
  }
  return out;
}

LabeledOrbitEnsemble parse_ensemble_csv(const std::string& text) {
  std::map<std::pair<long, long>, std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int dim = -1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && dim < 0) continue;  // header
      throw ParseError("non-numeric ensemble row at line " + std::to_string(line_no));
    }
    if (vals.size() < 3) throw ParseError("ensemble rows need orbit, step and coordinates");
    const int d = static_cast<int>(vals.size()) - 2;
    if (dim < 0) dim = d;
    if (d != dim) throw ParseError("inconsistent column count at line " + std::to_string(line_no));
    rows[{static_cast<long>(vals[0]), static_cast<long>(vals[1])}] =
        std::vector<double>(vals.begin() + 2, vals.end());
  }
  if (rows.empty()) throw ParseError("empty ensemble");
  LabeledOrbitEnsemble F;
  F.dim = dim;
  long current = rows.begin()->first.first;
  std::vector<double> flat;
  long expected_step = 0;
  for (const auto& [key, x] : rows) {
    if (key.first != current) {
      F.add_orbit(flat);
      flat.clear();
      current = key.first;
      expected_step = 0;
    }
    if (key.second != expected_step++) throw ParseError("missing steps in orbit " + std::to_string(key.first));
    flat.insert(flat.end(), x.begin(), x.end());
  }
  F.add_orbit(flat);
  return F;
}

namespace {

std::size_t horizon_steps(const LabeledOrbitEnsemble& F, double T) {
  if (!(T >= 0.0) || F.dt <= 0.0) throw InvalidArgument("bad horizon");
  const auto k = static_cast<std::size_t>(std::floor(T / F.dt + 1e-9));
  if (F.origin + k >= F.length) {
    throw InvalidArgument("horizon T exceeds the orbit data");
  }
  return k;
}

// d_T over ensemble pairs, accumulated step by step; lower triangle storage.
class BowenDistances {
 public:
  BowenDistances(const LabeledOrbitEnsemble& F, int threads)
      : F_(F), n_(F.orbits()), threads_(threads), d_(n_ * (n_ - (n_ > 0)) / 2, 0.0), next_(F.origin) {}

  void advance_to(std::size_t step) {
    for (; next_ <= step; ++next_) {
      parallel_for(n_, threads_, [&](std::size_t i) {
        const double* xi = F_.at(i, next_);
        double* row = d_.data() + i * (i - (i > 0)) / 2;
        for (std::size_t j = 0; j < i; ++j) {
          row[j] = std::max(row[j], F_.metric(xi, F_.at(j, next_), F_.dim));
        }
      });
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i < j) std::swap(i, j);
    return d_[i * (i - 1) / 2 + j];
  }
  std::size_t size() const { return n_; }

  std::vector<std::vector<std::size_t>> neighbors(double delta) const {
    std::vector<std::vector<std::size_t>> nb(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      nb[i].push_back(i);
      for (std::size_t j = 0; j < i; ++j) {
        if ((*this)(i, j) <= delta) {
          nb[i].push_back(j);
          nb[j].push_back(i);
        }
      }
    }
    for (auto& v : nb) std::sort(v.begin(), v.end());
    return nb;
  }

 private:
  const LabeledOrbitEnsemble& F_;
  std::size_t n_;
  int threads_;
  std::vector<double> d_;
  std::size_t next_;
};

using Adjacency = std::vector<std::vector<std::size_t>>;

std::size_t greedy_cover(const Adjacency& nb) {
  const std::size_t n = nb.size();
  std::vector<bool> covered(n, false);
  // lazy greedy: stored gains only ever overestimate
  using Entry = std::pair<std::size_t, std::ptrdiff_t>;  // (gain, -index)
  std::priority_queue<Entry> heap;
  for (std::size_t i = 0; i < n; ++i) heap.push({nb[i].size(), -static_cast<std::ptrdiff_t>(i)});
  std::size_t left = n, chosen = 0;
  while (left > 0) {
    const auto [gain, neg] = heap.top();
    heap.pop();
    const auto i = static_cast<std::size_t>(-neg);
    std::size_t fresh = 0;
    for (std::size_t j : nb[i]) fresh += covered[j] ? 0 : 1;
    if (fresh == 0) continue;
    if (!heap.empty() && Entry{fresh, neg} < heap.top()) {
      heap.push({fresh, neg});
      continue;
    }
    for (std::size_t j : nb[i]) {
      if (!covered[j]) {
        covered[j] = true;
        --left;
      }
    }
    ++chosen;
    (void)gain;
  }
  return chosen;
}

std::size_t greedy_packing(const Adjacency& nb, const std::vector<std::size_t>& order) {
  std::vector<bool> blocked(nb.size(), false);
  std::size_t count = 0;
  for (std::size_t i : order) {
    if (blocked[i]) continue;
    ++count;
    for (std::size_t j : nb[i]) blocked[j] = true;
  }
  return count;
}

std::vector<std::size_t> index_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

std::size_t spanning_from(const Adjacency& nb) {
  if (nb.empty()) return 0;
  return std::min(greedy_cover(nb), greedy_packing(nb, index_order(nb.size())));
}

std::size_t separated_from(const Adjacency& nb) {
  if (nb.empty()) return 0;
  auto by_degree = index_order(nb.size());
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](std::size_t a, std::size_t b) { return nb[a].size() < nb[b].size(); });
  return std::max(greedy_packing(nb, index_order(nb.size())), greedy_packing(nb, by_degree));
}

double slope(const std::vector<std::pair<double, std::size_t>>& series) {
  const double n = static_cast<double>(series.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (const auto& [t, r] : series) {
    const double l = std::log(static_cast<double>(r));
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
  }
  const double den = n * stt - st * st;
  return den > 0.0 ? (n * stl - st * sl) / den : 0.0;
}

}  // namespace

std::size_t spanning_count(const LabeledOrbitEnsemble& F, double T, double delta, int threads) {
  BowenDistances d(F, threads);
  d.advance_to(F.origin + horizon_steps(F, T));
  return spanning_from(d.neighbors(delta));
}

std::size_t separated_count(const LabeledOrbitEnsemble& F, double T, double delta, int threads) {
  BowenDistances d(F, threads);
  d.advance_to(F.origin + horizon_steps(F, T));
  return separated_from(d.neighbors(delta));
}

EntropyEstimate estimate_entropy(const LabeledOrbitEnsemble& F, double T, double delta,
                                 int threads) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const std::size_t K = horizon_steps(F, T);
  EntropyEstimate e;
  e.T = T;
  e.delta = delta;
  BowenDistances d(F, threads);
  const std::size_t first = (K + 1) / 2;
  for (std::size_t k = first; k <= K; ++k) {
    d.advance_to(F.origin + k);
    e.series.emplace_back(static_cast<double>(k) * F.dt, spanning_from(d.neighbors(delta)));
  }
  const auto nb = d.neighbors(delta);
  e.r = e.series.back().second;
  e.s = separated_from(nb);
  e.bowen_rate = T > 0.0 ? std::log(static_cast<double>(e.r)) / T : 0.0;
  e.h_estimate = e.series.size() >= 2 ? slope(e.series) : e.bowen_rate;
  return e;
}

WeightedMeasure WeightedMeasure::uniform(std::size_t n) {
  if (n == 0) throw InvalidArgument("empty measure");
  return WeightedMeasure{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void WeightedMeasure::check() const {
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("negative atom weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument("weights do not sum to 1");
}

FinitePartition FinitePartition::trivial(std::size_t n) {
  return FinitePartition{std::vector<int>(n, 0), 1};
}

void FinitePartition::check(std::size_t atoms) const {
  if (labels.size() != atoms) throw DimMismatch("partition does not label every atom");
  for (int l : labels) {
    if (l < 0 || l >= cells) throw InvalidArgument("label outside 0..k-1");
  }
}

namespace {

double entropy_of(const std::vector<double>& mass) {
  double h = 0.0;
  for (double m : mass) {
    if (m > 0.0) h -= m * std::log(m);
  }
  return h;
}

}  // namespace

double partition_entropy(const WeightedMeasure& mu, const FinitePartition& P) {
  P.check(mu.weights.size());
  std::vector<double> mass(static_cast<std::size_t>(P.cells), 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < mu.weights.size(); ++a) {
    mass[static_cast<std::size_t>(P.labels[a])] += mu.weights[a];
    total += mu.weights[a];
  }
  // relative to the summed total, with the same order of operations as
  // conditional_entropy so that H(P | trivial) == H(P) bit for bit
  double h = 0.0;
  for (double m : mass) {
    if (m > 0.0) h -= m * std::log(m / total);
  }
  return h;
}

FinitePartition join(const FinitePartition& P, const FinitePartition& Q) {
  if (P.labels.size() != Q.labels.size()) throw DimMismatch("partitions on different atoms");
  std::map<std::pair<int, int>, int> ids;
  FinitePartition out;
  out.labels.reserve(P.labels.size());
  for (std::size_t a = 0; a < P.labels.size(); ++a) {
    const auto [it, fresh] = ids.try_emplace({P.labels[a], Q.labels[a]}, static_cast<int>(ids.size()));
    out.labels.push_back(it->second);
  }
  out.cells = static_cast<int>(ids.size());
  return out;
}

double conditional_entropy(const WeightedMeasure& mu, const FinitePartition& P,
                           const FinitePartition& Q) {
  P.check(mu.weights.size());
  Q.check(mu.weights.size());
  std::map<std::pair<int, int>, double> joint;
  std::vector<double> qmass(static_cast<std::size_t>(Q.cells), 0.0);
  for (std::size_t a = 0; a < mu.weights.size(); ++a) {
    joint[{P.labels[a], Q.labels[a]}] += mu.weights[a];
    qmass[static_cast<std::size_t>(Q.labels[a])] += mu.weights[a];
  }
  double h = 0.0;
  for (const auto& [key, m] : joint) {
    if (m > 0.0) h -= m * std::log(m / qmass[static_cast<std::size_t>(key.second)]);
  }
  return std::max(h, 0.0);
}

double refine_entropy(const WeightedMeasure& mu, const FinitePartition& P, const AtomMap& f, int N) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  P.check(mu.weights.size());
  if (f.size() != mu.weights.size()) throw DimMismatch("map does not cover every atom");
  std::vector<std::vector<int>> seqs(mu.weights.size());
  for (std::size_t a = 0; a < f.size(); ++a) {
    if (mu.weights[a] <= 0.0) continue;
    std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(a);
    for (int n = 0; n < N; ++n) {
      if (cur < 0) {
        throw HorizonExceeded("atom " + std::to_string(a) + " has only " + std::to_string(n) +
                              " iterates, need " + std::to_string(N));
      }
      seqs[a].push_back(P.labels[static_cast<std::size_t>(cur)]);
      cur = f[static_cast<std::size_t>(cur)];
    }
  }
  return refine_entropy(mu, seqs, N);
}

double refine_entropy(const WeightedMeasure& mu, const std::vector<std::vector<int>>& sequences,
                      int N) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (sequences.size() != mu.weights.size()) throw DimMismatch("one sequence per atom");
  std::map<std::vector<int>, double> hist;
  for (std::size_t a = 0; a < sequences.size(); ++a) {
    if (mu.weights[a] <= 0.0) continue;
    if (sequences[a].size() < static_cast<std::size_t>(N)) {
      throw HorizonExceeded("label sequence of atom " + std::to_string(a) + " is shorter than N");
    }
    hist[std::vector<int>(sequences[a].begin(), sequences[a].begin() + N)] += mu.weights[a];
  }
  std::vector<double> mass;
  mass.reserve(hist.size());
  for (const auto& [k, m] : hist) mass.push_back(m);
  return entropy_of(mass) / N;
}

std::vector<double> refine_entropy_profile(const WeightedMeasure& mu,
                                           const std::vector<std::vector<int>>& sequences,
                                           int N_max) {
  std::vector<double> out;
  for (int N = 1; N <= N_max; ++N) out.push_back(refine_entropy(mu, sequences, N));
  return out;
}

JensenBound jensen_bound(const std::vector<double>& a) {
  if (a.empty()) throw InvalidArgument("need at least one number");
  JensenBound b;
  double total = 0.0;
  for (double x : a) {
    if (!(x >= 0.0)) throw InvalidArgument("numbers must be nonnegative");
    if (x > 0.0) b.lhs -= x * std::log(x);
    total += x;
  }
  b.rhs = 1.0 + total * std::log(static_cast<double>(a.size()));
  return b;
}

std::vector<std::size_t> gamma_set(std::size_t x, const LabeledOrbitEnsemble& F, double eps,
                                   int horizon) {
  if (x >= F.orbits()) throw InvalidArgument("base orbit out of range");
  if (horizon < 0) throw InvalidArgument("negative horizon");
  const auto h = static_cast<std::size_t>(horizon);
  // two-sided horizon, truncated at the data
  const std::size_t lo = F.origin >= h ? F.origin - h : 0;
  const std::size_t hi = std::min(F.origin + h, F.length - 1);
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < F.orbits(); ++y) {
    bool close = true;
    for (std::size_t s = lo; s <= hi && close; ++s) {
      close = F.metric(F.at(x, s), F.at(y, s), F.dim) <= eps;
    }
    if (close) out.push_back(y);
  }
  return out;
}

double h_expansivity_probe(const LabeledOrbitEnsemble& F, double eps, int horizon, double delta,
                           const ProbeOptions& opts) {
  const std::size_t n = F.orbits();
  if (n == 0) return 0.0;
  const double T = opts.T > 0.0 ? opts.T : horizon * F.dt;
  std::vector<std::size_t> bases;
  if (opts.max_base_points == 0 || opts.max_base_points >= n) {
    bases = index_order(n);
  } else {
    for (std::size_t i = 0; i < opts.max_base_points; ++i) bases.push_back(i * n / opts.max_base_points);
  }
  std::vector<std::vector<std::size_t>> sets(bases.size());
  parallel_for(bases.size(), opts.threads,
               [&](std::size_t i) { sets[i] = gamma_set(bases[i], F, eps, horizon); });

  std::map<std::vector<std::size_t>, double> memo;
  double best = 0.0;
  for (const auto& g : sets) {
    auto it = memo.find(g);
    if (it == memo.end()) {
      const double h = g.size() <= 1 ? 0.0 : estimate_entropy(F.subset(g), T, delta, opts.threads).h_estimate;
      it = memo.emplace(g, h).first;
    }
    best = std::max(best, it->second);
  }
  return best;
}

InnerPartition build_inner_partition(const WeightedMeasure& mu, const FinitePartition& P,
                                     const PointCloud& atoms, double eps, int threads) {
  const std::size_t n = mu.weights.size();
  P.check(n);
  if (atoms.size() != n) throw DimMismatch("one point per atom");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");

  // distance from each atom to the complement of its cell
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  parallel_for(n, threads, [&](std::size_t a) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n; ++b) {
      if (P.labels[b] != P.labels[a]) g = std::min(g, atoms.metric(atoms.at(a), atoms.at(b), atoms.dim));
    }
    gap[a] = g;
  });

  InnerPartition out;
  out.partition.cells = P.cells + 1;
  out.partition.labels.assign(n, 0);
  out.radius.assign(static_cast<std::size_t>(P.cells), 0.0);
  out.deficit.assign(static_cast<std::size_t>(P.cells), 0.0);

  for (int c = 0; c < P.cells; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t a = 0; a < n; ++a) {
      if (P.labels[a] == c) members.push_back(a);
    }
    std::stable_sort(members.begin(), members.end(),
                     [&](std::size_t a, std::size_t b) { return gap[a] < gap[b]; });
    // widest r whose collar {gap < r} still has mass below eps
    double r = std::numeric_limits<double>::infinity();
    double collar = 0.0;
    std::size_t i = 0;
    while (i < members.size()) {
      const double g = gap[members[i]];
      if (std::isinf(g)) {
        r = g;
        break;
      }
      double block = 0.0;
      std::size_t j = i;
      while (j < members.size() && gap[members[j]] == g) block += mu.weights[members[j++]];
      // r = g keeps everything before this block in the collar
      if (collar + block >= eps) {
        r = g;
        break;
      }
      collar += block;
      i = j;
    }
    if (r <= 0.0) {
      throw NoValidRadius("cell " + std::to_string(c) + " needs r = 0; achieved deficit " +
                          std::to_string(collar));
    }
    const auto ci = static_cast<std::size_t>(c);
    out.radius[ci] = r;
    for (std::size_t a : members) {
      if (gap[a] >= r) {
        out.partition.labels[a] = c + 1;
      } else {
        out.deficit[ci] += mu.weights[a];
      }
    }
    out.remainder_mass += out.deficit[ci];
  }
  return out;
}

}  // namespace aubry
