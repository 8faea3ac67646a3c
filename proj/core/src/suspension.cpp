#include "aubry/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace aubry {

double CeilingFunction::operator()(const SymbolWindow& w) const {
  if (!w.covers(-radius) || !w.covers(radius)) {
    throw WindowExhausted("ceiling needs radius " + std::to_string(radius) + " around the center");
  }
  const double v = eval(w);
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("ceiling must be positive");
  return v;
}

CeilingFunction constant_ceiling(double c) {
  if (!(c > 0.0)) throw InvalidArgument("ceiling must be positive");
  return CeilingFunction{[c](const SymbolWindow&) { return c; }, 0, c, c, 0.0};
}

CeilingFunction symbol_ceiling(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("empty ceiling table");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo > 0.0)) throw InvalidArgument("ceiling must be positive");
  const double mn = *lo, mx = *hi;
  // two windows at d_a distance < 1 share the center symbol
  const double lip = (mx - mn) / 2.0;
  return CeilingFunction{[v = std::move(values)](const SymbolWindow& w) {
                           const int s = w.at(0);
                           if (s < 0 || s >= static_cast<int>(v.size())) {
                             throw InvalidArgument("symbol outside the ceiling table");
                           }
                           return v[static_cast<std::size_t>(s)];
                         },
                         0, mn, mx, lip};
}

SymbolWindow shift(const SymbolWindow& w, int k) {
  SymbolWindow out = w;
  out.center += k;
  if (out.center < 0 || out.center >= static_cast<int>(w.symbols.size())) {
    throw WindowExhausted("shift moves the center outside the window");
  }
  return out;
}

SymbolWindow periodic_window(const Word& cycle, int offset, int radius) {
  if (cycle.empty()) throw InvalidArgument("empty cycle");
  const int n = static_cast<int>(cycle.size());
  SymbolWindow w;
  w.center = radius;
  w.symbols.resize(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) {
    const int j = ((offset + i) % n + n) % n;
    w.symbols[static_cast<std::size_t>(i + radius)] = cycle[static_cast<std::size_t>(j)];
  }
  return w;
}

SuspensionPoint suspend_flow(const SuspensionPoint& pt, double t, const CeilingFunction& tau) {
  if (!std::isfinite(t)) throw InvalidArgument("non-finite flow time");
  SymbolWindow w = pt.base;
  double tw = tau(w);
  if (!(pt.height >= 0.0 && pt.height < tw)) throw InvalidArgument("height outside [0, tau)");
  double s = pt.height + t;
  while (s >= tw) {
    s -= tw;
    w = shift(w, 1);
    tw = tau(w);
  }
  while (s < 0.0) {
    w = shift(w, -1);
    tw = tau(w);
    s += tw;
  }
  // s + tw can round up to tw itself
  if (s >= tw) s = std::nextafter(tw, 0.0);
  return SuspensionPoint{std::move(w), s};
}

MarkovMeasure markov_measure(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() == 0) throw InvalidArgument("P must be square");
  const auto m = P.rows();
  Eigen::MatrixXd sys = P.transpose() - Eigen::MatrixXd::Identity(m, m);
  sys.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[m - 1] = 1.0;
  Eigen::VectorXd p = sys.fullPivLu().solve(rhs);
  return MarkovMeasure{P, p};
}

MarkovMeasure parry_measure(const TransitionMatrix& a) {
  const int m = a.size();
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = a(i, j) ? 1.0 : 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < m; ++i) {
    if (es.eigenvalues()[i].real() > es.eigenvalues()[k].real()) k = i;
  }
  const double lambda = es.eigenvalues()[k].real();
  Eigen::VectorXd v = es.eigenvectors().col(k).real().cwiseAbs();
  if (!(lambda > 0.0) || v.minCoeff() <= 1e-300) {
    throw InvalidArgument("Parry measure needs an irreducible matrix");
  }
  // polish the right eigenvector
  for (int it = 0; it < 50; ++it) {
    v = (A * v + v) / (lambda + 1.0);
    v /= v.maxCoeff();
  }
  Eigen::MatrixXd P(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) P(i, j) = A(i, j) * v[j] / (lambda * v[i]);
    P.row(i) /= P.row(i).sum();
  }
  return markov_measure(P);
}

void validate(const SymbolicMeasure& nu, const TransitionMatrix* a) {
  if (const auto* mk = std::get_if<MarkovMeasure>(&nu)) {
    const auto m = mk->P.rows();
    if (mk->P.cols() != m || mk->p.size() != m) throw NonInvariant("shape mismatch");
    if (a && a->size() != m) throw NonInvariant("alphabet size differs from the matrix");
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mk->p[i] < 0.0) throw NonInvariant("negative stationary weight");
      if (std::abs(mk->P.row(i).sum() - 1.0) > 1e-12) throw NonInvariant("P is not stochastic");
      for (Eigen::Index j = 0; j < m; ++j) {
        if (mk->P(i, j) < 0.0) throw NonInvariant("negative transition probability");
        if (a && mk->P(i, j) > 0.0 && !(*a)(static_cast<int>(i), static_cast<int>(j))) {
          throw NonInvariant("P charges a forbidden transition");
        }
      }
    }
    if (std::abs(mk->p.sum() - 1.0) > 1e-12) throw NonInvariant("p does not sum to 1");
    const double err = (mk->P.transpose() * mk->p - mk->p).cwiseAbs().maxCoeff();
    if (err > 1e-12) throw NonInvariant("p is not stationary (residual " + std::to_string(err) + ")");
    return;
  }
  const auto& em = std::get<EmpiricalMeasure>(nu);
  if (em.orbits.size() != em.weights.size() || em.orbits.empty()) {
    throw NonInvariant("need one weight per orbit");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < em.orbits.size(); ++i) {
    if (em.weights[i] < 0.0) throw NonInvariant("negative orbit weight");
    if (em.orbits[i].cycle.empty()) throw NonInvariant("empty orbit");
    if (a && !a->legal_cycle(em.orbits[i].cycle)) throw NonInvariant("orbit is not legal");
    total += em.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw NonInvariant("orbit weights do not sum to 1");
}

FlowIntegrator::FlowIntegrator(SymbolicMeasure nu, CeilingFunction tau, LiftOptions opts)
    : nu_(std::move(nu)), tau_(std::move(tau)), opts_(opts) {
  validate(nu_);
  if (!(tau_.min > 0.0) || tau_.max < tau_.min) throw InvalidArgument("bad ceiling bounds");
  for (const auto& atom : atoms(tau_.radius)) mean_tau_ += atom.weight * tau_(atom.window);
}

std::vector<FlowIntegrator::Atom> FlowIntegrator::atoms(int radius) const {
  std::vector<Atom> out;
  if (const auto* mk = std::get_if<MarkovMeasure>(&nu_)) {
    const auto m = static_cast<int>(mk->P.rows());
    const auto len = static_cast<std::size_t>(2 * radius + 1);
    Word w;
    auto extend = [&](auto&& self, double weight) -> void {
      if (w.size() == len) {
        out.push_back({SymbolWindow{w, radius}, weight});
        return;
      }
      for (int s = 0; s < m; ++s) {
        const double q = w.empty() ? mk->p[s] : mk->P(w.back(), s);
        if (q <= 0.0) continue;
        w.push_back(s);
        self(self, weight * q);
        w.pop_back();
      }
    };
    extend(extend, 1.0);
    return out;
  }
  const auto& em = std::get<EmpiricalMeasure>(nu_);
  for (std::size_t k = 0; k < em.orbits.size(); ++k) {
    const auto& cyc = em.orbits[k].cycle;
    const double wk = em.weights[k] / static_cast<double>(cyc.size());
    for (std::size_t j = 0; j < cyc.size(); ++j) {
      out.push_back({periodic_window(cyc, static_cast<int>(j), radius), wk});
    }
  }
  return out;
}

namespace {

int flow_radius(const LiftOptions& o, const CeilingFunction& tau, double t) {
  return o.observable_radius + tau.radius + static_cast<int>(std::ceil(std::abs(t) / tau.min)) + 1;
}

}  // namespace

double FlowIntegrator::exact(const FlowObservable& f, double t) const {
  const int R = flow_radius(opts_, tau_, t);
  double total = 0.0;
  std::vector<double> cuts;
  for (const auto& atom : atoms(R)) {
    const SymbolWindow& w = atom.window;
    const double tw = tau_(w);
    // s where s + t meets a roof or floor: g(s) = f(S_t(w, s)) is smooth in between
    cuts.assign({0.0, tw});
    if (t >= 0.0) {
      double c = tw;
      SymbolWindow v = w;
      while (c - t < tw) {
        if (c - t > 0.0) cuts.push_back(c - t);
        v = shift(v, 1);
        c += tau_(v);
      }
    } else {
      double d = 0.0;
      SymbolWindow v = w;
      while (-t - d > 0.0) {
        if (-t - d < tw) cuts.push_back(-t - d);
        v = shift(v, -1);
        d += tau_(v);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double inner = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (b - a <= 0.0) continue;
      for (std::size_t g = 0; g < Gauss8::nodes.size(); ++g) {
        double s = a + (b - a) * Gauss8::nodes[g];
        if (s >= tw) s = std::nextafter(tw, 0.0);
        const SuspensionPoint q = suspend_flow({w, s}, t, tau_);
        inner += (b - a) * Gauss8::weights[g] * f(q.base, q.height);
      }
    }
    total += atom.weight * inner;
  }
  return total / mean_tau_;
}

double FlowIntegrator::sampled(const FlowObservable& f, double t) const {
  constexpr std::size_t kChunks = 64;
  const int R = flow_radius(opts_, tau_, t);
  const std::size_t per_chunk = (opts_.samples + kChunks - 1) / kChunks;
  std::vector<double> sums(kChunks, 0.0);

  std::vector<double> cum;
  if (const auto* em = std::get_if<EmpiricalMeasure>(&nu_)) {
    double c = 0.0;
    for (double w : em->weights) cum.push_back(c += w);
  }

  parallel_for(kChunks, opts_.threads, [&](std::size_t chunk) {
    std::seed_seq seq{opts_.seed, static_cast<std::uint64_t>(chunk)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto pick = [&](auto row_prob, int m) {
      const double u = unit(rng);
      double c = 0.0;
      for (int s = 0; s < m; ++s) {
        c += row_prob(s);
        if (u < c) return s;
      }
      for (int s = m - 1; s >= 0; --s) {
        if (row_prob(s) > 0.0) return s;
      }
      return 0;
    };
    SymbolWindow w;
    w.center = R;
    w.symbols.resize(static_cast<std::size_t>(2 * R + 1));
    double sum = 0.0;
    std::size_t accepted = 0;
    while (accepted < per_chunk) {
      if (const auto* mk = std::get_if<MarkovMeasure>(&nu_)) {
        const auto m = static_cast<int>(mk->P.rows());
        w.symbols[0] = pick([&](int s) { return mk->p[s]; }, m);
        for (std::size_t i = 1; i < w.symbols.size(); ++i) {
          const int prev = w.symbols[i - 1];
          w.symbols[i] = pick([&](int s) { return mk->P(prev, s); }, m);
        }
      } else {
        const auto& em = std::get<EmpiricalMeasure>(nu_);
        const double u = unit(rng) * cum.back();
        const auto k = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(),
                                     static_cast<std::ptrdiff_t>(cum.size()) - 1));
        const auto& cyc = em.orbits[k].cycle;
        const int off = static_cast<int>(unit(rng) * static_cast<double>(cyc.size()));
        w = periodic_window(cyc, std::min(off, static_cast<int>(cyc.size()) - 1), R);
      }
      const double tw = tau_(w);
      if (unit(rng) * tau_.max >= tw) continue;
      double s = unit(rng) * tw;
      if (s >= tw) s = std::nextafter(tw, 0.0);
      const SuspensionPoint q = suspend_flow({w, s}, t, tau_);
      sum += f(q.base, q.height);
      ++accepted;
    }
    sums[chunk] = sum;
  });
  double total = 0.0;
  for (double s : sums) total += s;
  return total / static_cast<double>(per_chunk * kChunks);
}

double FlowIntegrator::integrate(const FlowObservable& f, double t) const {
  return opts_.monte_carlo ? sampled(f, t) : exact(f, t);
}

FlowIntegrator lift_measure(const SymbolicMeasure& nu, const CeilingFunction& tau,
                            const LiftOptions& opts) {
  return FlowIntegrator(nu, tau, opts);
}

double orbit_weight(const PeriodicOrbit& w, const FlowObservable& cost,
                    const CeilingFunction& tau) {
  if (w.cycle.empty()) throw InvalidArgument("empty orbit");
  constexpr int kRadius = 64;
  constexpr int kPanels = 4;
  double total = 0.0;
  for (std::size_t j = 0; j < w.cycle.size(); ++j) {
    const SymbolWindow win = periodic_window(w.cycle, static_cast<int>(j), kRadius);
    const double tw = tau(win);
    const double h = tw / kPanels;
    for (int p = 0; p < kPanels; ++p) {
      for (std::size_t g = 0; g < Gauss8::nodes.size(); ++g) {
        total += h * Gauss8::weights[g] * cost(win, (p + Gauss8::nodes[g]) * h);
      }
    }
  }
  return total;
}

}  // namespace aubry
