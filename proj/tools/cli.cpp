#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "aubry/action.hpp"
#include "aubry/config.hpp"
#include "aubry/entropy.hpp"
#include "aubry/hyperbolic.hpp"
#include "aubry/perturbation.hpp"
#include "aubry/sft.hpp"
#include "aubry/suspension.hpp"

namespace aubry::cli {

namespace {

using json = nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = 0;
  bool series = false;
  bool dump_config = false;

  Config cfg;
  std::string base_dir = ".";
  int workers() const { return resolve_threads(threads); }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct Output {
  json record = json::object();
  Table series;
};

struct Command {
  CLI::App* app = nullptr;
  std::function<Output()> run;
};

// ---------------------------------------------------------------- helpers

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw CLI::ValidationError("expected a comma-separated list of numbers: " + text);
  return out;
}

Point parse_point(const std::string& text, int dim) {
  const auto v = parse_list(text);
  if (static_cast<int>(v.size()) != dim) {
    throw CLI::ValidationError("expected " + std::to_string(dim) + " coordinates: " + text);
  }
  return dim == 1 ? make_point(v[0]) : make_point(v[0], v[1]);
}

json point_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------- matrices

struct MatrixArgs {
  std::string path;
  bool golden = false;
  int full = 0;

  void add(CLI::App* app) {
    app->add_option("--matrix", path, "0/1 transition matrix file");
    app->add_flag("--golden", golden, "golden-mean shift");
    app->add_option("--full", full, "full shift on M symbols (0 = unset)")->check(CLI::NonNegativeNumber);
  }
  bool given() const { return !path.empty() || golden || full > 0; }
  TransitionMatrix get() const {
    if ((!path.empty()) + golden + (full > 0) != 1) {
      throw CLI::ValidationError("give exactly one of --matrix, --golden, --full");
    }
    if (golden) return TransitionMatrix::golden_mean();
    if (full > 0) return TransitionMatrix::full(full);
    return load_matrix(path);
  }
};

json word_json(const Word& w) { return json(w); }

// ---------------------------------------------------------------- commands

Command sft_entropy(CLI::App& root, Common&) {
  auto* app = root.add_subcommand("sft-entropy", "topological entropy of a subshift of finite type");
  auto m = std::make_shared<MatrixArgs>();
  auto n_max = std::make_shared<int>(12);
  m->add(app);
  app->add_option("--words-max", *n_max, "longest word length in the series")->check(CLI::PositiveNumber);
  return {app, [m, n_max] {
            const auto a = m->get();
            Output o;
            o.record["M"] = a.size();
            o.record["h"] = top_entropy(a);
            o.series.columns = {"n", "words", "K_n"};
            const auto K = cylinder_constants(a, *n_max);
            for (int n = 1; n <= *n_max; ++n) {
              o.series.rows.push_back({n, count_words(a, n).value.str(), K[static_cast<std::size_t>(n - 1)]});
            }
            return o;
          }};
}

Command sft_shortest_cycle(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("sft-shortest-cycle", "minimum-period cycle and its period bound");
  struct Args {
    MatrixArgs m;
    int random = 0;
    int size = 12;
    double density = 0.3;
  };
  auto a = std::make_shared<Args>();
  a->m.add(app);
  app->add_option("--random", a->random, "check this many random essential matrices instead");
  app->add_option("--size", a->size, "largest alphabet for --random")->check(CLI::Range(1, 64));
  app->add_option("--density", a->density, "probability of an allowed transition for --random");
  return {app, [a, &common] {
            Output o;
            if (a->random <= 0) {
              const auto A = a->m.get();
              const auto cyc = shortest_cycle(A, common.workers());
              const double bound = bq_bound(A);
              o.record["M"] = A.size();
              o.record["h"] = top_entropy(A);
              o.record["period"] = cyc.period();
              o.record["cycle"] = word_json(cyc.cycle);
              o.record["bound"] = bound;
              o.record["within_bound"] = static_cast<double>(cyc.period()) <= bound;
              return o;
            }
            const auto count = static_cast<std::size_t>(a->random);
            std::vector<std::vector<json>> rows(count);
            std::vector<double> ratio(count);
            parallel_for(count, common.workers(), [&](std::size_t i) {
              auto rng = stream(common.seed, i);
              std::uniform_int_distribution<int> size(1, a->size);
              const auto A = random_essential_matrix(size(rng), a->density, rng);
              const auto cyc = shortest_cycle(A);
              const double bound = bq_bound(A);
              ratio[i] = static_cast<double>(cyc.period()) / bound;
              rows[i] = {i, A.size(), top_entropy(A), cyc.period(), bound};
            });
            std::size_t violations = 0;
            for (double r : ratio) violations += r > 1.0 ? 1 : 0;
            o.record["count"] = count;
            o.record["max_ratio"] = *std::max_element(ratio.begin(), ratio.end());
            o.record["violations"] = violations;
            o.series.columns = {"index", "M", "h", "period", "bound"};
            o.series.rows = std::move(rows);
            return o;
          }};
}

Command sft_recode(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("sft-recode", "n-block recoding Z^(n) and a projected cycle");
  struct Args {
    MatrixArgs m;
    std::string words;
    int n = 2;
  };
  auto a = std::make_shared<Args>();
  a->m.add(app);
  app->add_option("--words", a->words, "legal-word list instead of a matrix");
  app->add_option("--n", a->n, "block length")->check(CLI::PositiveNumber);
  return {app, [a, &common] {
            std::unique_ptr<WordSource> src;
            std::optional<double> hy;
            if (!a->words.empty()) {
              if (a->m.given()) throw CLI::ValidationError("give either --words or a matrix");
              src = std::make_unique<ListWordSource>(load_words(a->words));
            } else {
              const auto A = a->m.get();
              hy = top_entropy(A);
              src = std::make_unique<MatrixWordSource>(A);
            }
            const auto r = block_recode(*src, a->n);
            const double hz = top_entropy(r.matrix);
            const auto z = shortest_cycle(r.matrix, common.workers());
            const auto y = project_cycle(z, r);
            Output o;
            o.record["n"] = a->n;
            o.record["symbols"] = r.symbols.size();
            if (hy) {
              o.record["h_Y"] = *hy;
              o.record["n_h_Y"] = a->n * *hy;
            }
            o.record["h_Z"] = hz;
            o.record["cycle"] = word_json(z.cycle);
            o.record["projected"] = word_json(y.cycle);
            o.series.columns = {"index", "word"};
            for (std::size_t i = 0; i < r.symbols.size(); ++i) o.series.rows.push_back({i, to_string(r.symbols[i])});
            return o;
          }};
}

LagrangianSpec require_lagrangian(const Common& common) {
  if (common.config_path.empty()) throw CLI::ValidationError("--config with a [lagrangian] section is required");
  return lagrangian_spec(common.cfg);
}

Command critical(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("critical-value", "critical value c(L) by bisection on negative loops");
  auto opts = std::make_shared<CriticalValueOptions>();
  app->add_option("--width", opts->width, "final bracket width");
  app->add_option("--budget", opts->loops.budget, "loop candidates per level");
  return {app, [opts, &common] {
            const auto L = require_lagrangian(common).build();
            auto o2 = *opts;
            o2.loops.seed = common.seed;
            const auto c = critical_value(L, o2);
            Output o;
            o.record["c"] = c.value;
            o.record["lower"] = c.lower;
            o.record["upper"] = c.upper;
            o.record["witness_duration"] = c.witness.duration;
            return o;
          }};
}

Command potential(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("action-potential", "action potential Phi_k(x, y)");
  struct Args {
    double k = 0.0;
    std::string x = "0";
    std::string y = "0";
    int grid = 16;
  };
  auto a = std::make_shared<Args>();
  app->add_option("--k", a->k, "energy level")->required();
  app->add_option("--x", a->x, "start point, comma-separated");
  app->add_option("--y", a->y, "end point, comma-separated");
  app->add_option("--grid", a->grid, "end points along the first axis for --series")->check(CLI::PositiveNumber);
  return {app, [a, &common] {
            const auto L = require_lagrangian(common).build();
            PotentialOptions po;
            po.threads = common.workers();
            po.loops.seed = common.seed;
            const Point x = parse_point(a->x, L.dim());
            const Point y = parse_point(a->y, L.dim());
            auto value = [&](const Point& to) -> std::pair<json, std::string> {
              const auto v = action_potential(L, a->k, x, to, po);
              if (v.neg_infinity) return {json("-inf"), "neg_infinity"};
              return {json(v.value), "finite"};
            };
            Output o;
            o.record["k"] = a->k;
            o.record["x"] = point_json(x);
            o.record["y"] = point_json(y);
            const auto [phi, status] = value(y);
            o.record["phi"] = phi;
            o.record["status"] = status;
            if (common.series) {
              o.series.columns = {"k", "x", "y", "phi", "status"};
              for (int i = 0; i < a->grid; ++i) {
                Point to = y;
                to[0] = static_cast<double>(i) / a->grid;
                const auto [p, st] = value(to);
                o.series.rows.push_back({a->k, point_json(x), point_json(to), p, st});
              }
            }
            return o;
          }};
}

Command suspend(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("suspend-integrate", "integral of an observable against the lifted flow measure");
  struct Args {
    MatrixArgs m;
    std::string ceiling;
    std::string observable = "height";
    double time = 0.0;
    bool mc = false;
    std::size_t samples = 200000;
    int steps = 10;
  };
  auto a = std::make_shared<Args>();
  a->m.add(app);
  app->add_option("--ceiling", a->ceiling, "roof value per symbol, comma-separated (default 1)");
  app->add_option("--observable", a->observable, "height | cos | symbol:K");
  app->add_option("--time", a->time, "flow time t");
  app->add_flag("--mc", a->mc, "Monte-Carlo integration");
  app->add_option("--samples", a->samples, "Monte-Carlo samples");
  app->add_option("--steps", a->steps, "time samples in [0, t] for --series")->check(CLI::PositiveNumber);
  return {app, [a, &common] {
            const auto A = a->m.get();
            const auto tau = a->ceiling.empty() ? constant_ceiling(1.0) : symbol_ceiling(parse_list(a->ceiling));
            FlowObservable f;
            if (a->observable == "height") {
              f = [](const SymbolWindow&, double s) { return s; };
            } else if (a->observable == "cos") {
              f = [](const SymbolWindow&, double s) { return std::cos(2.0 * std::numbers::pi * s); };
            } else if (a->observable.rfind("symbol:", 0) == 0) {
              const int k = std::stoi(a->observable.substr(7));
              f = [k](const SymbolWindow& w, double) { return w.at(0) == k ? 1.0 : 0.0; };
            } else {
              throw CLI::ValidationError("unknown observable " + a->observable);
            }
            LiftOptions lo;
            lo.monte_carlo = a->mc;
            lo.samples = a->samples;
            lo.seed = common.seed;
            lo.threads = common.workers();
            const auto flow = lift_measure(parry_measure(A), tau, lo);
            Output o;
            o.record["mode"] = a->mc ? "monte-carlo" : "exact";
            o.record["time"] = a->time;
            o.record["mean_ceiling"] = flow.mean_ceiling();
            o.record["integral"] = flow.integrate(f, a->time);
            if (common.series) {
              o.series.columns = {"t", "integral"};
              for (int i = 0; i <= a->steps; ++i) {
                const double t = a->time * i / a->steps;
                o.series.rows.push_back({t, flow.integrate(f, t)});
              }
            }
            return o;
          }};
}

struct EnsembleArgs {
  std::string ensemble;
  std::size_t orbits = 1000;
  std::string start;
  double perturb = 0.0;
  double T = 10.0;
  double delta = 0.05;

  void add(CLI::App* app) {
    app->add_option("--ensemble", ensemble, "CSV ensemble (orbit,step,coords...); default: cat-map lattice orbits");
    app->add_option("--orbits", orbits, "cat-map orbits");
    app->add_option("--start", start, "first cat-map point x,y (default: drawn from --seed)");
    app->add_option("--perturb", perturb, "use the perturbed cat map with this amplitude");
    app->add_option("--T", T, "horizon");
    app->add_option("--delta", delta, "resolution");
  }

  LabeledOrbitEnsemble get(const Common& common, int horizon) const {
    if (!ensemble.empty()) return parse_ensemble_csv(read_text(ensemble));
    const ToralAutomorphism tm;
    Point p;
    if (start.empty()) {
      auto rng = stream(common.seed, 0);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double x0 = u(rng);
      p = make_point(x0, u(rng));
    } else {
      p = parse_point(start, 2);
    }
    const double spacing = segment_spacing(tm, T, delta);
    const int steps = std::max(horizon, static_cast<int>(std::ceil(T)));
    if (perturb != 0.0) return perturbed_segment_ensemble(tm, perturb, p, orbits, spacing, steps);
    return unstable_segment_ensemble(tm, p, orbits, spacing, horizon, steps);
  }
};

Command entropy_estimate(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("entropy-estimate", "(T, delta) spanning and separated set entropy estimate");
  auto a = std::make_shared<EnsembleArgs>();
  a->add(app);
  return {app, [a, &common] {
            const auto F = a->get(common, 0);
            const auto e = estimate_entropy(F, a->T, a->delta, common.workers());
            Output o;
            o.record["T"] = e.T;
            o.record["delta"] = e.delta;
            o.record["r"] = e.r;
            o.record["s"] = e.s;
            o.record["h_estimate"] = e.h_estimate;
            o.record["bowen_rate"] = e.bowen_rate;
            o.record["orbits"] = F.orbits();
            o.series.columns = {"t", "r"};
            for (const auto& [t, r] : e.series) o.series.rows.push_back({t, r});
            return o;
          }};
}

Command hexpansivity(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("hexpansivity", "entropy of the eps-indistinguishability sets Gamma_eps(x)");
  struct Args {
    EnsembleArgs e;
    double eps = 0.01;
    int horizon = 30;
    std::size_t bases = 64;
  };
  auto a = std::make_shared<Args>();
  a->e.add(app);
  app->add_option("--eps", a->eps, "closeness scale");
  app->add_option("--horizon", a->horizon, "two-sided horizon")->check(CLI::NonNegativeNumber);
  app->add_option("--bases", a->bases, "base points (0 = all)");
  return {app, [a, &common] {
            const auto F = a->e.get(common, a->horizon);
            ProbeOptions po;
            po.T = a->e.T;
            po.max_base_points = a->bases;
            po.threads = common.workers();
            Output o;
            o.record["eps"] = a->eps;
            o.record["horizon"] = a->horizon;
            o.record["T"] = a->e.T;
            o.record["delta"] = a->e.delta;
            o.record["h"] = h_expansivity_probe(F, a->eps, a->horizon, a->e.delta, po);
            return o;
          }};
}

Command shadow_cmd(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("shadow", "shadow random pseudo-orbits of a hyperbolic toral automorphism");
  struct Args {
    bool matrix_default = false;
    std::string automorphism;
    double delta = 1e-4;
    std::size_t len = 10000;
    std::size_t count = 1;
  };
  auto a = std::make_shared<Args>();
  app->add_flag("--matrix-default", a->matrix_default, "use [[2,1],[1,1]] (the default)");
  app->add_option("--automorphism", a->automorphism, "integer matrix a,b,c,d (row-major)");
  app->add_option("--delta", a->delta, "jump bound");
  app->add_option("--len", a->len, "pseudo-orbit length")->check(CLI::PositiveNumber);
  app->add_option("--count", a->count, "number of pseudo-orbits")->check(CLI::PositiveNumber);
  return {app, [a, &common] {
            std::array<std::int64_t, 4> m{2, 1, 1, 1};
            if (!a->automorphism.empty()) {
              if (a->matrix_default) throw CLI::ValidationError("--matrix-default conflicts with --automorphism");
              const auto v = parse_list(a->automorphism);
              if (v.size() != 4) throw CLI::ValidationError("--automorphism needs 4 integers");
              for (std::size_t i = 0; i < 4; ++i) m[i] = std::llround(v[i]);
            }
            const ToralAutomorphism tm(m);
            std::vector<double> eps(a->count);
            parallel_for(a->count, common.workers(), [&](std::size_t i) {
              auto rng = stream(common.seed, i);
              eps[i] = shadow(tm, random_pseudo_orbit(tm, a->len, a->delta, rng)).eps_achieved;
            });
            Output o;
            o.record["Q"] = tm.Q();
            o.record["delta"] = a->delta;
            o.record["eps_achieved"] = *std::max_element(eps.begin(), eps.end());
            o.record["length"] = a->len;
            o.record["count"] = a->count;
            o.record["within_bound"] = *std::max_element(eps.begin(), eps.end()) <= tm.Q() * a->delta;
            o.series.columns = {"index", "eps_achieved"};
            for (std::size_t i = 0; i < a->count; ++i) o.series.rows.push_back({i, eps[i]});
            return o;
          }};
}

Command canal_cmd(CLI::App& root, Common& common) {
  auto* app = root.add_subcommand("canal-experiment", "critical value before and after a canal perturbation");
  auto opts = std::make_shared<LocalizationOptions>();
  app->add_option("--tol", opts->tol, "monotonicity tolerance");
  app->add_option("--neighborhood", opts->neighborhood, "core neighbourhood radius for localization");
  return {app, [opts, &common] {
            const auto spec = require_lagrangian(common);
            const auto cp = canal_spec(common.cfg, spec.dim, common.base_dir);
            auto o2 = *opts;
            o2.critical.loops.seed = common.seed;
            const auto rep = experiment_localization(spec.build(), cp, o2);
            Output o;
            o.record["eps"] = cp.eps;
            o.record["k"] = cp.k;
            o.record["c_base"] = rep.c_base;
            o.record["c_perturbed"] = rep.c_perturbed;
            o.record["monotone"] = rep.monotone;
            o.record["on_core_action"] = rep.on_core_action;
            o.record["off_core_action"] = rep.off_core_action;
            o.record["witness_core_distance"] = rep.witness_core_distance;
            o.record["localized"] = rep.localized;
            return o;
          }};
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "config file; [<subcommand>] keys set options");
  app->add_option("--out", c.out_path, "write results here instead of stdout");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--threads", c.threads, "worker threads (0 = hardware)");
  app->add_flag("--series", c.series, "emit the data series");
  app->add_flag("--dump-config", c.dump_config, "print the effective config and exit");
}

// ---------------------------------------------------------------- output

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + csv_cell(x);
    return s;
  }
  return v.dump();
}

std::string render(const Output& o, const Common& c) {
  std::ostringstream out;
  if (c.format == "csv") {
    if (c.series) {
      for (std::size_t i = 0; i < o.series.columns.size(); ++i) out << (i ? "," : "") << o.series.columns[i];
      out << '\n';
      for (const auto& row : o.series.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
      }
    } else {
      std::string head, vals;
      for (const auto& [k, v] : o.record.items()) {
        head += (head.empty() ? "" : ",") + k;
        vals += (vals.empty() ? "" : ",") + csv_cell(v);
      }
      out << head << '\n' << vals << '\n';
    }
    return out.str();
  }
  json j = o.record;
  if (c.series) {
    json rows = json::array();
    for (const auto& row : o.series.rows) {
      json r = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) r[o.series.columns[i]] = row[i];
      rows.push_back(std::move(r));
    }
    j["series"] = std::move(rows);
  }
  out << j.dump(2) << '\n';
  return out.str();
}

// ---------------------------------------------------------------- config

const std::set<std::string> kNotConfigurable{"help", "config", "out", "format", "dump-config"};
const std::set<std::string> kPathKeys{"matrix", "ensemble", "words"};

std::string option_value(const CLI::Option* opt) {
  if (opt->count() > 0) {
    std::string s;
    for (const auto& r : opt->results()) s += (s.empty() ? "" : ",") + r;
    if (opt->get_expected_min() == 0 && (s.empty() || s == "1")) s = "true";
    return s;
  }
  if (opt->get_expected_min() == 0) return "false";
  return opt->get_default_str();
}

std::string dump_config(const CLI::App* sub, const Common& c) {
  Config cfg = c.cfg;
  cfg.erase(sub->get_name());
  Config section;
  for (const CLI::Option* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || kNotConfigurable.count(names.front())) continue;
    std::string v = option_value(opt);
    if (v.empty()) continue;
    if (kPathKeys.count(names.front())) v = std::filesystem::absolute(v).lexically_normal().string();
    section.put(boost::property_tree::ptree::path_type(names.front(), '\0'), v);
  }
  if (!section.empty()) cfg.add_child(boost::property_tree::ptree::path_type(sub->get_name(), '\0'), section);
  return format_config(cfg);
}

// [<subcommand>] keys become --key=value arguments placed before the user's.
std::vector<std::string> inject(const std::vector<std::string>& args, Common& common) {
  if (args.size() < 2 || args[1].rfind("-", 0) == 0) return args;
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  common.cfg = load_config(path);
  common.base_dir = std::filesystem::path(path).parent_path().string();
  if (common.base_dir.empty()) common.base_dir = ".";
  std::vector<std::string> out{args[0], args[1]};
  if (auto sec = common.cfg.get_child_optional(boost::property_tree::ptree::path_type(args[1], '\0'))) {
    for (const auto& [key, node] : *sec) {
      std::string v = node.data();
      if (kPathKeys.count(key) && !v.empty() && std::filesystem::path(v).is_relative()) {
        v = (std::filesystem::path(common.base_dir) / v).lexically_normal().string();
      }
      out.push_back("--" + key + "=" + v);
    }
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  Common common;
  CLI::App app{"Numerical experiments on Lagrangian action, symbolic dynamics and entropy", "aubry"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<Command> commands{sft_entropy(app, common), sft_shortest_cycle(app, common),
                                sft_recode(app, common),  critical(app, common),
                                potential(app, common),   suspend(app, common),
                                entropy_estimate(app, common), hexpansivity(app, common),
                                shadow_cmd(app, common),  canal_cmd(app, common)};
  for (auto& c : commands) add_common(c.app, common);

  try {
    std::vector<std::string> args = inject(raw, common);
    std::reverse(args.begin(), args.end());
    args.pop_back();  // program name
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 1;
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      std::string text;
      if (common.dump_config) {
        text = dump_config(c.app, common);
      } else {
        text = render(c.run(), common);
      }
      if (common.out_path.empty()) {
        out << text;
      } else {
        std::ofstream f(common.out_path);
        if (!f) throw ParseError("cannot write " + common.out_path);
        f << text;
      }
      return 0;
    } catch (const CLI::Error& e) {
      err << e.what() << '\n' << c.app->help();
      return 2;
    } catch (const Error& e) {
      err << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace aubry::cli
