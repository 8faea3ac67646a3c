#include "aubry/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace aubry {

namespace pt = boost::property_tree;

Config parse_config(const std::string& text) {
  // The ini reader only knows whole-line ';' comments.
  std::istringstream in(text);
  std::ostringstream clean;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of(";#");
    if (cut != std::string::npos) line.erase(cut);
    clean << line << '\n';
  }
  Config cfg;
  std::istringstream src(clean.str());
  try {
    pt::read_ini(src, cfg);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message() + " at line " + std::to_string(e.line()));
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string format_config(const Config& cfg) {
  std::ostringstream out;
  pt::write_ini(out, cfg);
  return out.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Integrator parse_integrator(const std::string& name) {
  if (name == "auto") return Integrator::Auto;
  if (name == "verlet") return Integrator::Verlet;
  if (name == "yoshida4") return Integrator::Yoshida4;
  if (name == "rk4") return Integrator::RungeKutta4;
  throw ParseError("unknown integrator '" + name + "'");
}

std::string integrator_name(Integrator m) {
  switch (m) {
    case Integrator::Verlet: return "verlet";
    case Integrator::Yoshida4: return "yoshida4";
    case Integrator::RungeKutta4: return "rk4";
    default: return "auto";
  }
}

namespace {

double parse_number(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw ParseError("bad number '" + s + "' for " + key);
  }
  return v;
}

std::vector<FourierTerm> parse_table(const Config& section, int dim, const std::string& name) {
  static const std::regex key_re(R"(^(cos|sin)\(\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\)$)");
  std::vector<FourierTerm> terms;
  for (const auto& [key, node] : section) {
    std::smatch m;
    if (!std::regex_match(key, m, key_re)) {
      throw ParseError("bad coefficient key '" + key + "' in [" + name + "]");
    }
    const bool pair = m[3].matched;
    if (pair != (dim == 2)) {
      throw ParseError("key '" + key + "' does not match dim " + std::to_string(dim));
    }
    std::array<int, 2> k{std::stoi(m[2]), pair ? std::stoi(m[3]) : 0};
    const double c = parse_number(key, node.get_value<std::string>());
    auto it = std::find_if(terms.begin(), terms.end(),
                           [&](const FourierTerm& t) { return t.k == k; });
    if (it == terms.end()) {
      terms.push_back({k, 0.0, 0.0});
      it = terms.end() - 1;
    }
    (m[1] == "cos" ? it->cos_coef : it->sin_coef) = c;
  }
  std::erase_if(terms, [](const FourierTerm& t) { return t.cos_coef == 0.0 && t.sin_coef == 0.0; });
  return terms;
}

void write_table(const std::vector<FourierTerm>& terms, int dim, Config& section) {
  auto key = [dim](const char* f, const FourierTerm& t) {
    std::string s = std::string(f) + "(" + std::to_string(t.k[0]);
    if (dim == 2) s += "," + std::to_string(t.k[1]);
    return s + ")";
  };
  for (const auto& t : terms) {
    if (t.cos_coef != 0.0) section.push_back({key("cos", t), Config(format_double(t.cos_coef))});
    if (t.sin_coef != 0.0) section.push_back({key("sin", t), Config(format_double(t.sin_coef))});
  }
}

bool same_terms(const std::vector<FourierTerm>& a, const std::vector<FourierTerm>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const FourierTerm& x, const FourierTerm& y) {
                      return x.k == y.k && x.cos_coef == y.cos_coef && x.sin_coef == y.sin_coef;
                    });
}

}  // namespace

double get_number(const Config& section, const std::string& key, double fallback) {
  const auto v = section.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
  return v ? parse_number(key, *v) : fallback;
}

int get_integer(const Config& section, const std::string& key, int fallback) {
  const auto v = section.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
  if (!v) return fallback;
  int out = 0;
  const char* end = v->data() + v->size();
  const auto r = std::from_chars(v->data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) throw ParseError("bad integer '" + *v + "' for " + key);
  return out;
}

LagrangianSpec lagrangian_spec(const Config& cfg) {
  LagrangianSpec spec;
  const auto head = cfg.get_child_optional("lagrangian");
  if (!head) throw ParseError("missing [lagrangian] section");
  try {
    spec.dim = get_integer(*head, "dim", 1);
    spec.integrator = parse_integrator(head->get<std::string>("integrator", "auto"));
    spec.dt = parse_number("dt", head->get<std::string>("dt", "0.001"));
  } catch (const pt::ptree_bad_data& e) {
    throw ParseError(e.what());
  }
  if (spec.dim != 1 && spec.dim != 2) throw ParseError("dim must be 1 or 2");
  if (!(spec.dt > 0.0)) throw ParseError("dt must be positive");

  if (const auto it = cfg.find("potential"); it != cfg.not_found()) {
    spec.potential = parse_table(it->second, spec.dim, "potential");
  }
  bool any_eta = false;
  std::vector<std::vector<FourierTerm>> eta(static_cast<std::size_t>(spec.dim));
  for (int j = 0; j < spec.dim; ++j) {
    const std::string name = "oneform." + std::to_string(j);
    if (const auto it = cfg.find(name); it != cfg.not_found()) {
      eta[static_cast<std::size_t>(j)] = parse_table(it->second, spec.dim, name);
      any_eta = any_eta || !eta[static_cast<std::size_t>(j)].empty();
    }
  }
  if (any_eta) spec.oneform = std::move(eta);
  return spec;
}

void write_lagrangian_spec(const LagrangianSpec& spec, Config& cfg) {
  Config head;
  head.put("dim", spec.dim);
  head.put("integrator", integrator_name(spec.integrator));
  head.put("dt", format_double(spec.dt));
  cfg.put_child(pt::path("lagrangian", '/'), head);

  Config pot;
  write_table(spec.potential, spec.dim, pot);
  // an empty section would be written back as a bare key
  if (!pot.empty()) cfg.put_child(pt::path("potential", '/'), pot);
  for (std::size_t j = 0; j < spec.oneform.size(); ++j) {
    Config comp;
    write_table(spec.oneform[j], spec.dim, comp);
    if (!comp.empty()) cfg.put_child(pt::path("oneform." + std::to_string(j), '/'), comp);
  }
}

MechanicalLagrangian LagrangianSpec::build() const {
  auto U = std::make_shared<FourierSeries>(dim, potential);
  if (oneform.empty()) return MechanicalLagrangian(U);
  std::vector<FourierSeries> comps;
  for (const auto& c : oneform) comps.emplace_back(dim, c);
  return MechanicalLagrangian(U, OneForm(std::move(comps)));
}

bool operator==(const LagrangianSpec& a, const LagrangianSpec& b) {
  if (a.dim != b.dim || a.integrator != b.integrator || a.dt != b.dt) return false;
  if (!same_terms(a.potential, b.potential) || a.oneform.size() != b.oneform.size()) return false;
  for (std::size_t j = 0; j < a.oneform.size(); ++j) {
    if (!same_terms(a.oneform[j], b.oneform[j])) return false;
  }
  return true;
}

}  // namespace aubry
