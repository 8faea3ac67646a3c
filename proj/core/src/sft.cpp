#include "aubry/sft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace aubry {

std::string to_string(const Word& w) {
  const bool digits = std::all_of(w.begin(), w.end(), [](int s) { return s >= 0 && s < 10; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!digits && i > 0) out += ' ';
    out += std::to_string(w[i]);
  }
  return out;
}

TransitionMatrix::TransitionMatrix(int m, std::vector<std::uint8_t> bits)
    : m_(m), bits_(std::move(bits)) {
  if (m < 1) throw InvalidArgument("matrix needs at least one symbol");
  if (bits_.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m)) {
    throw InvalidArgument("expected " + std::to_string(m * m) + " entries");
  }
  bool any = false;
  succ_.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      auto& b = bits_[static_cast<std::size_t>(i * m + j)];
      if (b > 1) throw InvalidArgument("entries must be 0 or 1");
      if (b) {
        succ_[static_cast<std::size_t>(i)].push_back(j);
        any = true;
      }
    }
  }
  if (!any) throw InvalidArgument("no allowed transition");
}

TransitionMatrix TransitionMatrix::full(int m) {
  return TransitionMatrix(m, std::vector<std::uint8_t>(static_cast<std::size_t>(m * m), 1));
}

TransitionMatrix TransitionMatrix::golden_mean() { return TransitionMatrix(2, {1, 1, 1, 0}); }

TransitionMatrix TransitionMatrix::cycle(int m) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(m * m), 0);
  for (int i = 0; i < m; ++i) bits[static_cast<std::size_t>(i * m + (i + 1) % m)] = 1;
  return TransitionMatrix(m, std::move(bits));
}

bool TransitionMatrix::legal(const Word& w) const {
  for (int s : w) {
    if (s < 0 || s >= m_) return false;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!(*this)(w[i], w[i + 1])) return false;
  }
  return true;
}

bool TransitionMatrix::legal_cycle(const Word& w) const {
  return !w.empty() && legal(w) && (*this)(w.back(), w.front());
}

std::vector<int> TransitionMatrix::essential_symbols() const {
  std::vector<bool> alive(static_cast<std::size_t>(m_), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < m_; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      bool out = false, in = false;
      for (int j = 0; j < m_; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        out = out || (*this)(i, j);
        in = in || (*this)(j, i);
      }
      if (!out || !in) {
        alive[static_cast<std::size_t>(i)] = false;
        changed = true;
      }
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < m_; ++i) {
    if (alive[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  return keep;
}

bool TransitionMatrix::is_essential() const {
  return essential_symbols().size() == static_cast<std::size_t>(m_);
}

TransitionMatrix restrict_to(const TransitionMatrix& a, const std::vector<int>& symbols) {
  if (symbols.empty()) throw ZeroShift("empty symbol set");
  const int k = static_cast<int>(symbols.size());
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(k * k), 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      bits[static_cast<std::size_t>(i * k + j)] =
          a(symbols[static_cast<std::size_t>(i)], symbols[static_cast<std::size_t>(j)]) ? 1 : 0;
  bool any = std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
  if (!any) throw ZeroShift("restriction has no transitions");
  return TransitionMatrix(k, std::move(bits));
}

TransitionMatrix essential_part(const TransitionMatrix& a) {
  const auto keep = a.essential_symbols();
  if (keep.empty()) throw ZeroShift("essential part is empty");
  return restrict_to(a, keep);
}

namespace {

// Tarjan's algorithm; components listed in reverse topological order.
std::vector<std::vector<int>> strong_components(const TransitionMatrix& a) {
  const int m = a.size();
  std::vector<int> index(static_cast<std::size_t>(m), -1), low(static_cast<std::size_t>(m), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(m), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < m; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = a.successors(f.v);
      if (f.next < succ.size()) {
        const int w = succ[f.next++];
        const auto wi = static_cast<std::size_t>(w);
        if (index[wi] < 0) {
          index[wi] = low[wi] = counter++;
          stack.push_back(w);
          on_stack[wi] = true;
          call.push_back({w, 0});
        } else if (on_stack[wi]) {
          low[static_cast<std::size_t>(f.v)] = std::min(low[static_cast<std::size_t>(f.v)], index[wi]);
        }
        continue;
      }
      const int v = f.v;
      const auto vi = static_cast<std::size_t>(v);
      call.pop_back();
      if (!call.empty()) {
        const auto pi = static_cast<std::size_t>(call.back().v);
        low[pi] = std::min(low[pi], low[vi]);
      }
      if (low[vi] == index[vi]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

// Spectral radius of an irreducible component.
double component_radius(const TransitionMatrix& a, const std::vector<int>& comp) {
  const std::size_t k = comp.size();
  std::vector<int> local(static_cast<std::size_t>(a.size()), -1);
  for (std::size_t i = 0; i < k; ++i) local[static_cast<std::size_t>(comp[i])] = static_cast<int>(i);
  std::vector<std::vector<int>> succ(k);
  for (std::size_t i = 0; i < k; ++i)
    for (int j : a.successors(comp[i]))
      if (local[static_cast<std::size_t>(j)] >= 0) succ[i].push_back(local[static_cast<std::size_t>(j)]);

  // B = A_C + I is primitive, so the iterates stay positive and the
  // Collatz-Wielandt quotients bracket rho(B) = rho(A_C) + 1.
  std::vector<double> v(k, 1.0), w(k);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 1000000; ++it) {
    for (std::size_t i = 0; i < k; ++i) {
      double s = v[i];
      for (int j : succ[i]) s += v[static_cast<std::size_t>(j)];
      w[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double q = w[i] / v[i];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      norm = std::max(norm, w[i]);
    }
    for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / norm;
    if (hi - lo <= 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi) - 1.0;
}

}  // namespace

double top_entropy(const TransitionMatrix& a) {
  if (a.essential_symbols().empty()) throw ZeroShift("essential part is empty");
  double rho = 0.0;
  for (const auto& comp : strong_components(a)) {
    // a singleton without a self-loop carries no cycle
    if (comp.size() == 1 && !a(comp[0], comp[0])) continue;
    rho = std::max(rho, component_radius(a, comp));
  }
  if (rho < 1.0) rho = 1.0;  // any cycle forces rho >= 1
  return std::log(rho);
}

std::uint64_t WordCount::as_u64() const {
  if (exceeds_u64) throw InvalidArgument("word count exceeds 64 bits");
  return value.convert_to<std::uint64_t>();
}

WordCount count_words(const TransitionMatrix& a, int n) {
  if (n < 1) throw InvalidArgument("word length must be at least 1");
  const auto m = static_cast<std::size_t>(a.size());
  // c[i] = number of legal words of the current length starting at i
  std::vector<BigInt> c(m, BigInt(1)), next(m);
  for (int len = 1; len < n; ++len) {
    for (std::size_t i = 0; i < m; ++i) {
      BigInt s = 0;
      for (int j : a.successors(static_cast<int>(i))) s += c[static_cast<std::size_t>(j)];
      next[i] = std::move(s);
    }
    std::swap(c, next);
  }
  WordCount out;
  out.value = std::accumulate(c.begin(), c.end(), BigInt(0));
  out.exceeds_u64 = out.value > BigInt(std::numeric_limits<std::uint64_t>::max());
  return out;
}

std::vector<double> cylinder_constants(const TransitionMatrix& a, int n_max) {
  const double h = top_entropy(a);
  std::vector<double> k;
  for (int n = 1; n <= n_max; ++n) {
    const double count = count_words(a, n).value.convert_to<double>();
    k.push_back(count * std::exp(-n * h));
  }
  return k;
}

PeriodicOrbit shortest_cycle(const TransitionMatrix& a, int threads) {
  const int m = a.size();
  std::vector<Word> best_from(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t s) {
    const int start = static_cast<int>(s);
    std::vector<int> parent(static_cast<std::size_t>(m), -2);
    std::queue<int> q;
    q.push(start);
    parent[s] = -1;
    int closing = -1;
    while (!q.empty() && closing < 0) {
      const int v = q.front();
      q.pop();
      for (int w : a.successors(v)) {
        if (w == start) {
          closing = v;
          break;
        }
        if (parent[static_cast<std::size_t>(w)] == -2) {
          parent[static_cast<std::size_t>(w)] = v;
          q.push(w);
        }
      }
    }
    if (closing < 0) return;
    Word cyc;
    for (int v = closing; v != -1; v = parent[static_cast<std::size_t>(v)]) cyc.push_back(v);
    std::reverse(cyc.begin(), cyc.end());
    best_from[s] = std::move(cyc);
  });

  PeriodicOrbit out;
  for (auto& c : best_from) {
    if (!c.empty() && (out.cycle.empty() || c.size() < out.cycle.size())) out.cycle = c;
  }
  if (out.cycle.empty()) throw NoCycle("transition graph is acyclic");
  out.minimal = true;
  return out;
}

double bq_bound(const TransitionMatrix& a) {
  return 1.0 + a.size() * std::exp(1.0 - top_entropy(a));
}

std::vector<Word> MatrixWordSource::words(int n) const {
  if (n < 1) throw InvalidArgument("word length must be at least 1");
  std::vector<Word> out;
  Word w;
  // depth-first in increasing symbol order yields lexicographic output
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == n) {
      out.push_back(w);
      return;
    }
    if (w.empty()) {
      for (int s = 0; s < a_.size(); ++s) {
        w.push_back(s);
        self(self);
        w.pop_back();
      }
      return;
    }
    for (int s : a_.successors(w.back())) {
      w.push_back(s);
      self(self);
      w.pop_back();
    }
  };
  extend(extend);
  return out;
}

ListWordSource::ListWordSource(std::vector<Word> words) : list_(std::move(words)) {
  for (const auto& w : list_) {
    for (int s : w) {
      if (s < 0) throw InvalidArgument("negative symbol in word list");
      alphabet_ = std::max(alphabet_, s + 1);
    }
  }
}

std::vector<Word> ListWordSource::words(int n) const {
  if (n < 1) throw InvalidArgument("word length must be at least 1");
  std::set<Word> found;
  for (const auto& w : list_) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= w.size(); ++i) {
      found.emplace(w.begin() + static_cast<std::ptrdiff_t>(i),
                    w.begin() + static_cast<std::ptrdiff_t>(i) + n);
    }
  }
  return {found.begin(), found.end()};
}

bool ListWordSource::legal(const Word& w) const {
  if (w.empty()) return true;
  return std::any_of(list_.begin(), list_.end(), [&](const Word& v) {
    return std::search(v.begin(), v.end(), w.begin(), w.end()) != v.end();
  });
}

Recoding block_recode(const WordSource& y, int n) {
  if (n < 1) throw InvalidArgument("block length must be at least 1");
  auto symbols = y.words(n);
  if (symbols.empty()) throw EmptyRecode("no legal words of length " + std::to_string(n));
  const std::size_t k = symbols.size();
  std::vector<std::uint8_t> bits(k * k, 0);
  Word uv(2 * static_cast<std::size_t>(n));
  bool any = false;
  for (std::size_t i = 0; i < k; ++i) {
    std::copy(symbols[i].begin(), symbols[i].end(), uv.begin());
    for (std::size_t j = 0; j < k; ++j) {
      std::copy(symbols[j].begin(), symbols[j].end(), uv.begin() + n);
      if (y.legal(uv)) {
        bits[i * k + j] = 1;
        any = true;
      }
    }
  }
  if (!any) throw EmptyRecode("no legal words of length " + std::to_string(2 * n));
  return Recoding{TransitionMatrix(static_cast<int>(k), std::move(bits)), std::move(symbols), n};
}

PeriodicOrbit project_cycle(const PeriodicOrbit& z, const Recoding& r) {
  if (z.cycle.empty()) throw InvalidArgument("empty cycle");
  const int k = r.matrix.size();
  for (int s : z.cycle) {
    if (s < 0 || s >= k) throw InvalidArgument("symbol outside the recoded alphabet");
  }
  if (!r.matrix.legal_cycle(z.cycle)) {
    throw IllegalConcatenation("cycle " + to_string(z.cycle) + " is not legal in Z^(n)");
  }
  Word flat;
  for (int s : z.cycle) {
    const auto& w = r.symbols[static_cast<std::size_t>(s)];
    flat.insert(flat.end(), w.begin(), w.end());
  }
  const std::size_t len = flat.size();
  const auto n = static_cast<std::size_t>(r.n);
  Word window(n);
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < n; ++j) window[j] = flat[(i + j) % len];
    if (!std::binary_search(r.symbols.begin(), r.symbols.end(), window)) {
      throw IllegalConcatenation("window " + to_string(window) + " at " + std::to_string(i) +
                                 " is not a legal word");
    }
  }
  // primitive period
  std::size_t p = 1;
  for (; p < len; ++p) {
    if (len % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < len && periodic; ++i) periodic = flat[i] == flat[i - p];
    if (periodic) break;
  }
  flat.resize(p);
  return PeriodicOrbit{std::move(flat), false};
}

double d_a_distance(const SymbolWindow& u, const SymbolWindow& w, double a) {
  if (!(a > 1.0)) throw InvalidArgument("d_a needs a > 1");
  const int r = u.radius();
  if (r != w.radius() || r < 0) throw WindowMismatch("windows have different radii");
  if (u.at(0) != w.at(0)) return a;
  for (int k = 1; k <= r; ++k) {
    if (u.at(k) != w.at(k) || u.at(-k) != w.at(-k)) return std::pow(a, -(k - 1));
  }
  return 0.0;
}

TransitionMatrix random_essential_matrix(int m, double density, std::mt19937_64& rng) {
  if (m < 1) throw InvalidArgument("alphabet size must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must be in (0, 1]");
  std::bernoulli_distribution bit(density);
  for (;;) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(m * m));
    for (auto& b : bits) b = bit(rng) ? 1 : 0;
    if (std::find(bits.begin(), bits.end(), 1) == bits.end()) continue;
    try {
      return essential_part(TransitionMatrix(m, std::move(bits)));
    } catch (const ZeroShift&) {
    }
  }
}

}  // namespace aubry
