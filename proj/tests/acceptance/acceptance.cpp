// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
// Optional arguments pick a subset of criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "aubry/action.hpp"
#include "aubry/entropy.hpp"
#include "aubry/hyperbolic.hpp"
#include "aubry/lagrangian.hpp"
#include "aubry/perturbation.hpp"
#include "aubry/sft.hpp"
#include "aubry/suspension.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace aubry;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kLogPhi = std::log(std::numbers::phi);
const double kLambdaCat = (3.0 + std::sqrt(5.0)) / 2.0;

// max of U on a fine grid, independent of the critical value search
double grid_max(const MechanicalLagrangian& L) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100000; ++i) m = std::max(m, L.potential().value(make_point(i / 100000.0)));
  return m;
}

LabeledOrbitEnsemble cat_ensemble(std::size_t orbits, int past, int future) {
  const ToralAutomorphism tm;
  const double spacing = segment_spacing(tm, 10.0, 0.05);
  return unstable_segment_ensemble(tm, make_point(0.3141, 0.2718), orbits, spacing, past, future);
}

// ---------------------------------------------------------------------------

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = top_entropy(TransitionMatrix::golden_mean());
  const double f = top_entropy(TransitionMatrix::full(4));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double eg = std::abs(g - kLogPhi), ef = std::abs(f - std::log(4.0));
  return {eg <= 1e-9 && ef <= 1e-12 && secs < 1.0,
          fmt("golden err %.2e, full-4 err %.2e, %.3f s", eg, ef, secs)};
}

Outcome c2() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  int bad_oracle = 0, over = 0;
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const int m = size(rng);
    const auto a = random_essential_matrix(m, density(rng), rng);
    const auto cyc = shortest_cycle(a);
    const int p = oracle::shortest_period(a);
    if (static_cast<int>(cyc.period()) != p || !a.legal_cycle(cyc.cycle)) ++bad_oracle;
    const double bound = 1.0 + a.size() * std::exp(1.0 - oracle::entropy(a));
    worst = std::max(worst, p / bound);
    if (p > bound) ++over;
  }
  return {bad_oracle == 0 && over == 0,
          fmt("1000 matrices: %d oracle mismatches, %d over the bound, max period/bound %.3f", bad_oracle,
              over, worst)};
}

Outcome c3() {
  const std::vector<std::pair<std::string, TransitionMatrix>> ys{
      {"golden", TransitionMatrix::golden_mean()},
      {"A", TransitionMatrix(3, {1, 1, 0, 0, 1, 1, 1, 0, 1})},
      {"B", TransitionMatrix(3, {1, 1, 0, 0, 0, 1, 1, 1, 1})}};
  double worst_gap = std::numeric_limits<double>::infinity();
  std::size_t cycles = 0, illegal = 0;
  for (const auto& [name, a] : ys) {
    const MatrixWordSource y(a);
    const double hy = oracle::entropy(a);
    for (int n = 1; n <= 6; ++n) {
      const auto r = block_recode(y, n);
      worst_gap = std::min(worst_gap, top_entropy(r.matrix) - n * hy);
      const auto legal = y.words(n);
      const std::set<Word> words(legal.begin(), legal.end());
      auto check = [&](const PeriodicOrbit& z) {
        const auto w = project_cycle(z, r).cycle;
        ++cycles;
        // every cyclic n-window, over enough laps to wrap a short period
        Word lap;
        while (lap.size() < w.size() + static_cast<std::size_t>(n)) lap.insert(lap.end(), w.begin(), w.end());
        for (std::size_t i = 0; i < w.size(); ++i) {
          if (!words.count(Word(lap.begin() + static_cast<std::ptrdiff_t>(i),
                                lap.begin() + static_cast<std::ptrdiff_t>(i) + n))) {
            ++illegal;
            return;
          }
        }
      };
      check(shortest_cycle(r.matrix));
      const int m = r.matrix.size();
      for (int u = 0; u < m; ++u) {
        if (r.matrix(u, u)) check(PeriodicOrbit{{u}});
        for (int v : r.matrix.successors(u)) {
          if (v > u && r.matrix(v, u)) check(PeriodicOrbit{{u, v}});
        }
      }
    }
  }
  return {worst_gap >= -1e-9 && illegal == 0,
          fmt("min h(Z)-n h(Y) %.2e; %zu projected cycles, %zu illegal", worst_gap, cycles, illegal)};
}

Outcome c4() {
  const auto pend = cosine_lagrangian({0.0, 1.0});
  const auto two = cosine_lagrangian({0.0, 1.0, 0.5});
  const MechanicalLagrangian free_l(std::make_shared<FourierSeries>(1));
  const double cp = critical_value(pend).value;
  const double cf = critical_value(free_l).value;
  const double ct = critical_value(two).value;
  const double ut = grid_max(two);
  const double e1 = std::abs(cp - grid_max(pend)), e2 = std::abs(cf), e3 = std::abs(ct - ut);
  return {e1 <= 1e-2 && e2 <= 1e-2 && e3 <= 1e-2,
          fmt("pendulum c=%.5f, free c=%.5f, two-harmonic c=%.5f vs max U %.5f", cp, cf, ct, ut)};
}

Outcome c5() {
  const double tol = 1e-2;
  Outcome out;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& [name, L] : {std::pair{"pendulum", cosine_lagrangian({0.0, 1.0})},
                                std::pair{"double-well", cosine_lagrangian({0.0, 0.5, 1.0})}}) {
    const double c = critical_value(L).value;
    const double k = c + tol;
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(make_point(u(rng)));
    PotentialOptions po;
    po.threads = 0;
    std::vector<double> phi(100);
    int infinite = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 10; ++j) {
        const auto v = action_potential(L, k, pts[i], pts[j], po);
        if (!v.finite()) ++infinite;
        phi[i * 10 + j] = v.finite() ? v.value : -std::numeric_limits<double>::infinity();
      }
    }
    double diag = std::numeric_limits<double>::infinity(), slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 10; ++i) diag = std::min(diag, phi[i * 11]);
    for (std::size_t x = 0; x < 10; ++x)
      for (std::size_t y = 0; y < 10; ++y)
        for (std::size_t z = 0; z < 10; ++z)
          slack = std::min(slack, phi[x * 10 + y] + phi[y * 10 + z] + 2 * tol - phi[x * 10 + z]);
    const bool ok = infinite == 0 && diag >= -tol && slack >= 0.0;
    out.pass = out.pass && ok;
    out.detail += fmt("%s%s: k=%.4f, min Phi(x,x) %.2e, min triangle slack %.2e", out.detail.empty() ? "" : "; ",
                      name, k, diag, slack);
  }
  return out;
}

Outcome c6() {
  const auto L = cosine_lagrangian({0.0, 1.0});
  const PhaseState s0{make_point(0.5), make_point(2.0)};
  const auto tr = el_flow(L, s0, 10.0, 1e-3);
  const double e0 = energy(L, s0);
  double drift = 0.0;
  for (const auto& s : tr.states) drift = std::max(drift, std::abs(energy(L, s) - e0));
  return {drift <= 1e-7, fmt("separatrix E=%.3f, max drift %.2e over %zu steps", e0, drift, tr.states.size())};
}

Outcome c7() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 64);
  std::uniform_real_distribution<double> u(0.0, 1.0), scale(-6.0, 6.0);
  int violations = 0, mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> a(static_cast<std::size_t>(len(rng)));
    const double s = std::pow(10.0, scale(rng));
    for (auto& x : a) x = u(rng) < 0.2 ? 0.0 : s * u(rng);
    const auto b = jensen_bound(a);
    long double lhs = 0.0L, sum = 0.0L;
    for (double x : a) {
      if (x > 0.0) lhs -= static_cast<long double>(x) * std::log(static_cast<long double>(x));
      sum += x;
    }
    const long double rhs = 1.0L + sum * std::log(static_cast<long double>(a.size()));
    if (std::abs(static_cast<long double>(b.lhs) - lhs) > 1e-12L * (1.0L + std::abs(lhs))) ++mismatches;
    if (std::abs(static_cast<long double>(b.rhs) - rhs) > 1e-12L * (1.0L + std::abs(rhs))) ++mismatches;
    if (b.lhs > b.rhs) ++violations;
  }
  double uniform_err = 0.0;
  for (int n = 1; n <= 64; ++n) {
    const auto b = jensen_bound(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
    uniform_err = std::max(uniform_err, std::abs(b.lhs - std::log(static_cast<double>(n))));
  }
  return {violations == 0 && mismatches == 0 && uniform_err <= 1e-12,
          fmt("10^4 vectors: %d violations, %d oracle mismatches; uniform case err %.2e", violations, mismatches,
              uniform_err)};
}

Outcome c8() {
  // sandwich on every ensemble used here
  std::mt19937_64 rng(88);
  std::vector<LabeledOrbitEnsemble> ens;
  for (int e = 0; e < 4; ++e) {
    LabeledOrbitEnsemble F;
    F.dim = 1;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
      std::vector<double> orbit;
      double x = u(rng);
      for (int s = 0; s < 12; ++s, x = std::fmod((e + 2) * x, 1.0)) orbit.push_back(x);
      F.add_orbit(orbit);
    }
    ens.push_back(std::move(F));
  }
  const auto cat = cat_ensemble(1000, 0, 10);
  ens.push_back(cat);
  int sandwich_fail = 0;
  for (const auto& F : ens) {
    for (double d : {0.02, 0.05, 0.1}) {
      const auto r = spanning_count(F, 10.0, d, 0), s = separated_count(F, 10.0, d, 0);
      if (!(r <= s && s <= spanning_count(F, 10.0, d / 2, 0))) ++sandwich_fail;
    }
  }
  const double h = estimate_entropy(cat, 10.0, 0.05, 0).h_estimate;
  const double target = std::log(kLambdaCat);

  const auto g = TransitionMatrix::golden_mean();
  const auto nu = parry_measure(g);
  WeightedMeasure mu;
  std::vector<std::vector<int>> seqs;
  for (const auto& w : MatrixWordSource(g).words(14)) {
    double m = nu.p[w[0]];
    for (std::size_t i = 1; i < w.size(); ++i) m *= nu.P(w[i - 1], w[i]);
    mu.weights.push_back(m);
    seqs.push_back(w);
  }
  const double hr = refine_entropy(mu, seqs, 14);
  return {sandwich_fail == 0 && std::abs(h - target) <= 0.15 && std::abs(hr - kLogPhi) <= 0.02,
          fmt("sandwich failures %d; cat-map h=%.4f vs %.4f; Parry refine N=14 %.4f vs %.4f", sandwich_fail, h,
              target, hr, kLogPhi)};
}

Outcome c9() {
  std::mt19937_64 rng(99);
  // exact identities on random measures and partitions
  int exact_fail = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t K = 10 + rng() % 200;
    WeightedMeasure mu;
    double total = 0.0;
    for (std::size_t i = 0; i < K; ++i) total += mu.weights.emplace_back(static_cast<double>(rng() % 1000 + 1));
    for (auto& w : mu.weights) w /= total;
    const int cells = 2 + static_cast<int>(rng() % 6);
    FinitePartition A{std::vector<int>(K), cells};
    for (auto& l : A.labels) l = static_cast<int>(rng() % static_cast<unsigned>(cells));
    if (conditional_entropy(mu, A, A) != 0.0) ++exact_fail;
    if (conditional_entropy(mu, A, FinitePartition::trivial(K)) != partition_entropy(mu, A)) ++exact_fail;
  }

  // chain inequality over a periodic golden-mean orbit, cyclic shift map
  const std::size_t K = 4096;
  std::vector<int> seq(K);
  int s = 0;
  for (auto& x : seq) x = s = (s == 1) ? 0 : static_cast<int>(rng() & 1);
  seq.back() = 0;  // the wrap stays legal
  AtomMap f(K);
  for (std::size_t i = 0; i < K; ++i) f[i] = static_cast<std::ptrdiff_t>((i + 1) % K);
  const auto mu = WeightedMeasure::uniform(K);
  auto random_partition = [&](int cells) {
    std::vector<int> table(8);
    for (auto& t : table) t = static_cast<int>(rng() % static_cast<unsigned>(cells));
    FinitePartition P{std::vector<int>(K), cells};
    for (std::size_t i = 0; i < K; ++i) {
      P.labels[i] = table[static_cast<std::size_t>(seq[i] * 4 + seq[(i + 1) % K] * 2 + seq[(i + 2) % K])];
    }
    return P;
  };
  int chain_fail = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    const auto A = random_partition(2 + t % 4), B = random_partition(2 + (t / 4) % 4);
    const int N = 1 + t % 10;
    const double gap = refine_entropy(mu, B, f, N) + conditional_entropy(mu, A, B) - refine_entropy(mu, A, f, N);
    slack = std::min(slack, gap);
    if (gap < -1e-12) ++chain_fail;
  }
  return {exact_fail == 0 && chain_fail == 0,
          fmt("%d exact-identity failures; 100 chain pairs, %d failures, min slack %.2e", exact_fail, chain_fail,
              slack)};
}

Outcome c10() {
  const auto t0 = std::chrono::steady_clock::now();
  const ToralAutomorphism tm;
  const double lu = kLambdaCat, ls = 1.0 / kLambdaCat;
  const double Q = 1.0 / (1.0 - 1.0 / lu) + 1.0 / (1.0 - ls);
  const double delta = 1e-4;
  int over = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(i));
    const auto p = random_pseudo_orbit(tm, 10000, delta, rng);
    const double eps = shadow(tm, p).eps_achieved;
    worst = std::max(worst, eps / delta);
    if (eps > Q * delta) ++over;
  }

  // periodic pseudo-orbits around the periodic points (T^N - I)^{-1}(1, 2)
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> e(-5e-5, 5e-5);
  double closing = 0.0;
  int not_exact = 0, periodic_over = 0;
  for (int N = 1; N <= 20; ++N) {
    Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
    for (int i = 0; i < N; ++i) M = tm.matrix() * M;
    M -= Eigen::Matrix2d::Identity();
    const Eigen::Vector2d k = M.inverse() * Eigen::Vector2d(1.0, 2.0);
    const Point x = wrap_unit(make_point(k[0], k[1]));
    std::vector<Point> base;
    for (int i = 0; i < N; ++i) {
      const Point y = apply(tm, x, i);
      base.push_back(wrap_unit(make_point(y[0] + e(rng), y[1] + e(rng))));
    }
    const double d = max_jump(tm, base, true);
    const auto s = periodic_shadow(tm, PseudoOrbit::make(tm, base, d, true));
    closing = std::max(closing, s.closing_error);
    if (s.eps_achieved > Q * d) ++periodic_over;
    // integer check of T^N r = r mod den, independent of the library
    bool exact = s.denominator > 0;
    if (exact) {
      const Eigen::Matrix<long double, 2, 1> r(s.numerator[0], s.numerator[1]);
      const Eigen::Matrix<long double, 2, 1> c = M.cast<long double>() * r;
      const auto den = static_cast<long double>(s.denominator);
      exact = std::fmod(c[0], den) == 0.0L && std::fmod(c[1], den) == 0.0L;
    }
    if (!exact) ++not_exact;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {over == 0 && periodic_over == 0 && closing <= 1e-12 && not_exact == 0 && secs < 60.0,
          fmt("Q=%.4f; 1000 shadows: %d over Q delta, max eps/delta %.4f; periodic N<=20: max closing %.1e, "
              "%d inexact, %d over; %.1f s",
              Q, over, worst, closing, not_exact, periodic_over, secs)};
}

Outcome c11() {
  const auto F = cat_ensemble(1000, 30, 30);
  ProbeOptions po;
  po.T = 10.0;
  po.threads = 0;
  const double h_small = h_expansivity_probe(F, 0.01, 30, 0.05, po);
  const double h_diam = h_expansivity_probe(F, std::sqrt(0.5), 30, 0.05, po);
  const double h8 = estimate_entropy(cat_ensemble(1000, 0, 10), 10.0, 0.05, 0).h_estimate;
  return {h_small <= 0.05 && std::abs(h_diam - h8) <= 1e-12,
          fmt("eps=0.01: %.4f; eps=diameter: %.6f vs criterion-8 estimate %.6f", h_small, h_diam, h8)};
}

Outcome c12() {
  struct Base {
    std::string name;
    MechanicalLagrangian L;
    std::vector<double> cores;
  };
  const std::vector<Base> bases{{"pendulum", cosine_lagrangian({0.0, 1.0}), {0.0, 0.25}},
                                {"double-well", cosine_lagrangian({0.0, 0.5, 1.0}), {0.0, 0.5}}};
  int runs = 0, not_monotone = 0;
  double worst_rise = -std::numeric_limits<double>::infinity(), worst_residual = 0.0;
  for (const auto& b : bases) {
    const double c = critical_value(b.L).value;
    // a rotating orbit over one lap
    const auto tr = el_flow(b.L, {make_point(0.0), make_point(2.5)}, 3.0, 1e-3);
    Trajectory loop = tr;
    double unwrapped = 0.0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
      unwrapped += wrap_centered(tr.states[i].x[0] - tr.states[i - 1].x[0]);
      if (unwrapped >= 1.0) {
        loop.states.resize(i);
        break;
      }
    }
    const auto rest = el_flow(b.L, {make_point(0.0), make_point(0.0)}, 1.0, 1e-3);
    for (double eps : {0.05, 0.2, 0.5}) {
      for (int k : {2, 3, 4}) {
        for (double at : b.cores) {
          CanalPotential cp;
          cp.dim = 1;
          cp.core = {make_point(at)};
          cp.eps = eps;
          cp.k = k;
          const double cpert = critical_value(perturb(b.L, cp)).value;
          ++runs;
          worst_rise = std::max(worst_rise, cpert - c);
          if (cpert > c + 2e-2) ++not_monotone;
          if (at == 0.0) worst_residual = std::max(worst_residual, core_force_residual(b.L, cp, rest));
        }
        worst_residual = std::max(worst_residual, core_force_residual(b.L, canal_along(loop, {1, 0}, eps, k), loop));
      }
    }
  }
  return {not_monotone == 0 && worst_residual <= 1e-8,
          fmt("%d canal runs, %d above c+2e-2, max c(L+phi)-c(L) %.2e; max core residual %.1e", runs, not_monotone,
              worst_rise, worst_residual)};
}

Outcome c13() {
  const ToralAutomorphism tm;
  const double spacing = segment_spacing(tm, 10.0, 0.05);
  const Point p = make_point(0.3141, 0.2718);
  const double base = estimate_entropy(cat_ensemble(1000, 0, 10), 10.0, 0.05, 0).h_estimate;
  double top = -std::numeric_limits<double>::infinity();
  std::string levels;
  for (int n = 0; n < 5; ++n) {
    const double eps = 0.1 / std::pow(2.0, n);
    const double h = estimate_entropy(perturbed_segment_ensemble(tm, eps, p, 1000, spacing, 10), 10.0, 0.05, 0)
                         .h_estimate;
    top = std::max(top, h);
    levels += fmt("%s%.4f", levels.empty() ? "" : " ", h);
  }
  return {top <= base + 0.05, fmt("base %.4f; levels eps=0.1/2^n: %s; max %.4f", base, levels.c_str(), top)};
}

Outcome c14() {
  const std::vector<std::vector<std::string>> cmds{
      {"aubry", "shadow", "--len", "2000", "--count", "16", "--seed", "5", "--series"},
      {"aubry", "entropy-estimate", "--orbits", "500", "--T", "8", "--seed", "5"},
      {"aubry", "sft-shortest-cycle", "--random", "50", "--seed", "5", "--series"},
      {"aubry", "suspend-integrate", "--golden", "--mc", "--samples", "20000", "--seed", "5"},
      {"aubry", "hexpansivity", "--orbits", "300", "--horizon", "10", "--seed", "5"}};
  int differ = 0;
  for (const auto& base : cmds) {
    std::vector<std::string> outs;
    for (const char* threads : {"1", "1", "8", "8"}) {
      auto args = base;
      args.insert(args.end(), {"--threads", threads});
      std::ostringstream out, err;
      if (cli::run(args, out, err) != 0) return {false, base[1] + " failed: " + err.str()};
      outs.push_back(out.str());
    }
    for (const auto& o : outs) differ += o != outs.front();
  }
  return {differ == 0, fmt("%zu commands x (2 runs x threads {1, 8}): %d differing outputs", cmds.size(), differ)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
    double limit = std::numeric_limits<double>::infinity();  // seconds
  };
  const std::vector<Criterion> all{
      {1, "SFT entropy", c1, 1},
      {2, "shortest cycle period bound", c2, 30},
      {3, "block recoding", c3, 10},
      {4, "critical values", c4, 300},
      {5, "action potential", c5, 600},
      {6, "energy conservation", c6},
      {7, "entropy of weights bound", c7},
      {8, "entropy estimators", c8, 120},
      {9, "conditional entropy", c9},
      {10, "shadowing", c10, 60},
      {11, "h-expansivity probe", c11},
      {12, "canal monotonicity", c12},
      {13, "perturbed family", c13},
      {14, "CLI determinism", c14},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.limit);
    }
    std::printf("%s criterion %2d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
