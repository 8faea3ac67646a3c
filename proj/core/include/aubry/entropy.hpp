#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aubry/common.hpp"

namespace aubry {

/// Distance between two points given by `dim` coordinates each.
using Metric = std::function<double(const double*, const double*, int)>;

/// Euclidean distance on the flat torus R^dim / Z^dim.
double torus_metric(const double* a, const double* b, int dim);
double euclidean_metric(const double* a, const double* b, int dim);

/// Sampled orbits of equal length. Step `origin` is time 0, so two-sided data
/// keeps past samples before it.
struct LabeledOrbitEnsemble {
  int dim = 1;
  std::size_t length = 0;
  double dt = 1.0;
  std::size_t origin = 0;
  /// orbit-major: coords[((orbit * length) + step) * dim + c]
  std::vector<double> coords;
  /// empty, or one label per (orbit, step)
  std::vector<int> labels;
  Metric metric = torus_metric;

  std::size_t orbits() const { return length == 0 ? 0 : coords.size() / (length * static_cast<std::size_t>(dim)); }
  const double* at(std::size_t orbit, std::size_t step) const {
    return coords.data() + (orbit * length + step) * static_cast<std::size_t>(dim);
  }
  /// Appends an orbit; all orbits must have the same length.
  void add_orbit(const std::vector<double>& flat);
  /// Sub-ensemble of the given orbits, same time axis.
  LabeledOrbitEnsemble subset(const std::vector<std::size_t>& orbits) const;
};

/// CSV rows "orbit,step,x1[,x2...]"; orbits and steps must be complete.
LabeledOrbitEnsemble parse_ensemble_csv(const std::string& text);

/// Greedy (T, delta)-spanning set size among ensemble points: the smaller of a
/// greedy set cover and an index-order maximal separated set.
std::size_t spanning_count(const LabeledOrbitEnsemble& F, double T, double delta, int threads = 1);
/// Greedy (T, delta)-separated set size (d_T > delta): the larger of
/// index-order and min-degree-order maximal packings.
std::size_t separated_count(const LabeledOrbitEnsemble& F, double T, double delta, int threads = 1);

struct EntropyEstimate {
  double T = 0.0;
  double delta = 0.0;
  std::size_t r = 0;
  std::size_t s = 0;
  /// Least-squares slope of log r(t) over t in [T/2, T].
  double h_estimate = 0.0;
  /// log r(T) / T.
  double bowen_rate = 0.0;
  std::vector<std::pair<double, std::size_t>> series;  ///< (t, r(t))
};

EntropyEstimate estimate_entropy(const LabeledOrbitEnsemble& F, double T, double delta,
                                 int threads = 1);

/// Probability weights on atoms 0..n-1.
struct WeightedMeasure {
  std::vector<double> weights;

  static WeightedMeasure uniform(std::size_t n);
  /// Throws InvalidArgument unless weights are nonnegative and sum to 1 (1e-12).
  void check() const;
};

struct FinitePartition {
  std::vector<int> labels;
  int cells = 0;

  static FinitePartition trivial(std::size_t n);
  void check(std::size_t atoms) const;
};

double partition_entropy(const WeightedMeasure& mu, const FinitePartition& P);
FinitePartition join(const FinitePartition& P, const FinitePartition& Q);
/// H(P | Q) = H(P v Q) - H(Q).
double conditional_entropy(const WeightedMeasure& mu, const FinitePartition& P,
                           const FinitePartition& Q);

/// f[a] is the image atom of a, or -1 when the data ends.
using AtomMap = std::vector<std::ptrdiff_t>;

/// (1/N) H(P v f^-1 P v ... v f^-(N-1) P). Throws HorizonExceeded when some
/// charged atom has no N-1 successors.
double refine_entropy(const WeightedMeasure& mu, const FinitePartition& P, const AtomMap& f, int N);
/// Same quantity from explicit label sequences (one per atom, length >= N).
double refine_entropy(const WeightedMeasure& mu, const std::vector<std::vector<int>>& sequences,
                      int N);
/// Values for N = 1..N_max.
std::vector<double> refine_entropy_profile(const WeightedMeasure& mu,
                                           const std::vector<std::vector<int>>& sequences,
                                           int N_max);

struct JensenBound {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = -sum a log a, rhs = 1 + (sum a) log n.
JensenBound jensen_bound(const std::vector<double>& a);

/// Orbits y with d(f^n x, f^n y) <= eps for all |n| <= horizon.
std::vector<std::size_t> gamma_set(std::size_t x, const LabeledOrbitEnsemble& F, double eps,
                                   int horizon);

struct ProbeOptions {
  /// Horizon of the entropy estimate on each Gamma set; <= 0 means horizon * dt.
  double T = 0.0;
  /// Evenly spaced base points; 0 means all.
  std::size_t max_base_points = 64;
  int threads = 1;
};

/// Largest entropy estimate over base points x of the ensemble restricted to
/// Gamma_eps(x).
double h_expansivity_probe(const LabeledOrbitEnsemble& F, double eps, int horizon, double delta,
                           const ProbeOptions& opts = {});

/// Points with coordinates and a metric, for partition geometry.
struct PointCloud {
  int dim = 1;
  std::vector<double> coords;
  Metric metric = torus_metric;

  std::size_t size() const { return coords.size() / static_cast<std::size_t>(dim); }
  const double* at(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(dim); }
};

struct InnerPartition {
  /// label 0 is the remainder B_0, label i+1 the core of cell i
  FinitePartition partition;
  std::vector<double> radius;   ///< collar width per cell (inf when the core is everything)
  std::vector<double> deficit;  ///< mu(A_i \ B_i)
  double remainder_mass = 0.0;
};

/// Cores B_i = {x in A_i : d(x, A_i^c) >= r_i} with the widest collar r_i that
/// keeps mu(A_i \ B_i) < eps. Throws NoValidRadius when only r = 0 works.
InnerPartition build_inner_partition(const WeightedMeasure& mu, const FinitePartition& P,
                                     const PointCloud& atoms, double eps, int threads = 1);

}  // namespace aubry
