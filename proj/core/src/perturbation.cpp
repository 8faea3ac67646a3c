#include "aubry/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace aubry {

namespace {

using Piece = CanalField::Piece;

std::vector<Piece> pieces_of(const CanalPotential& cp) {
  std::vector<Piece> out;
  const std::size_t m = cp.core.size();
  Point shift = Point::Zero(cp.dim);
  for (int c = 0; c < cp.dim; ++c) shift[c] = cp.winding[static_cast<std::size_t>(c)];
  auto add = [&](const Point& a, const Point& b) {
    // short pieces keep the 3^dim lifts of x sufficient
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a).norm() / 0.5)));
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(Piece{a + (b - a) * (static_cast<double>(i) / static_cast<double>(n)),
                     a + (b - a) * (static_cast<double>(i + 1) / static_cast<double>(n))});
    }
  };
  for (std::size_t i = 0; i + 1 < m; ++i) add(cp.core[i], cp.core[i + 1]);
  if (m > 1 || shift.norm() > 0.0) {
    add(cp.core[m - 1], cp.core[0] + shift);
  } else {
    out.push_back(Piece{cp.core[0], cp.core[0]});
  }
  return out;
}

double distance_to(const std::vector<Piece>& pieces, int dim, const Point& x, Point* nearest) {
  double best = std::numeric_limits<double>::infinity();
  const int lifts = dim == 1 ? 3 : 9;
  for (const auto& pc : pieces) {
    const Point base = pc.a + wrap_centered(Point(x - pc.a));
    const Point dir = pc.b - pc.a;
    const double len2 = dir.squaredNorm();
    for (int l = 0; l < lifts; ++l) {
      Point y = base;
      y[0] += l % 3 - 1;
      if (dim == 2) y[1] += l / 3 - 1;
      const double t = len2 > 0.0 ? std::clamp((y - pc.a).dot(dir) / len2, 0.0, 1.0) : 0.0;
      const Point c = pc.a + t * dir;
      const double d = (y - c).norm();
      if (d < best) {
        best = d;
        if (nearest) *nearest = x - (y - c);
      }
    }
  }
  return best;
}

double profile(const CanalPotential& cp, double d) {
  return cp.eps * std::pow(std::min(d, cp.plateau), cp.k);
}

}  // namespace

void CanalPotential::check() const {
  if (dim != 1 && dim != 2) throw InvalidArgument("canal dimension must be 1 or 2");
  if (core.empty()) throw InvalidArgument("empty canal core");
  for (const auto& p : core) {
    if (p.size() != dim) throw DimMismatch("core vertex has the wrong dimension");
  }
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (k < 2) throw InvalidArgument("exponent k must be at least 2");
  if (!(plateau > 0.0)) throw InvalidArgument("plateau must be positive");
}

double CanalPotential::distance(const Point& x, Point* nearest) const {
  check();
  if (x.size() != dim) throw DimMismatch("point and canal dimensions differ");
  return distance_to(pieces_of(*this), dim, x, nearest);
}

double canal(const CanalPotential& cp, const Point& x) { return profile(cp, cp.distance(x)); }

CanalField::CanalField(CanalPotential cp) : cp_(std::move(cp)) {
  cp_.check();
  pieces_ = pieces_of(cp_);
}

double CanalField::value(const Point& x) const {
  return profile(cp_, distance_to(pieces_, cp_.dim, x, nullptr));
}

Point CanalField::gradient(const Point& x) const {
  Point nearest;
  const double d = distance_to(pieces_, cp_.dim, x, &nearest);
  if (d <= 0.0 || d >= cp_.plateau) return Point::Zero(cp_.dim);
  return cp_.eps * cp_.k * std::pow(d, cp_.k - 2) * (x - nearest);
}

double CanalField::lipschitz_bound() const {
  const double r = std::min(cp_.plateau, 0.5 * std::sqrt(static_cast<double>(cp_.dim)));
  return cp_.eps * cp_.k * std::pow(r, cp_.k - 1);
}

MechanicalLagrangian perturb(const MechanicalLagrangian& L, const CanalPotential& cp) {
  if (cp.dim != L.dim()) throw DimMismatch("canal and Lagrangian dimensions differ");
  auto phi = std::make_shared<const CanalField>(cp);
  std::vector<std::pair<double, std::shared_ptr<const ScalarField>>> parts{
      {1.0, L.potential_ptr()}, {-1.0, phi}};
  return MechanicalLagrangian(std::make_shared<const LinearCombinationField>(std::move(parts)),
                              L.oneform());
}

double core_force_residual(const MechanicalLagrangian& L, const CanalPotential& cp,
                           const Trajectory& gamma) {
  const MechanicalLagrangian Lp = perturb(L, cp);
  double r = 0.0;
  for (const auto& s : gamma.states) {
    r = std::max(r, (Lp.acceleration(s.x, s.v) - L.acceleration(s.x, s.v)).norm());
  }
  return r;
}

CanalPotential canal_along(const Trajectory& gamma, std::array<int, 2> winding, double eps, int k,
                           double plateau) {
  if (gamma.states.empty()) throw InvalidArgument("empty trajectory");
  CanalPotential cp;
  cp.dim = static_cast<int>(gamma.states.front().x.size());
  cp.eps = eps;
  cp.k = k;
  cp.plateau = plateau;
  cp.winding = winding;
  // unwrap into the cover so consecutive vertices are close
  Point prev = gamma.states.front().x;
  cp.core.push_back(prev);
  for (std::size_t i = 1; i < gamma.states.size(); ++i) {
    prev = prev + wrap_centered(Point(gamma.states[i].x - wrap_unit(prev)));
    cp.core.push_back(prev);
  }
  cp.check();
  return cp;
}

LocalizationReport experiment_localization(const MechanicalLagrangian& L, const CanalPotential& cp,
                                           const LocalizationOptions& opts) {
  cp.check();
  const MechanicalLagrangian Lp = perturb(L, cp);
  LocalizationReport rep;
  const CriticalValue base = critical_value(L, opts.critical);
  const CriticalValue pert = critical_value(Lp, opts.critical);
  rep.c_base = base.value;
  rep.c_perturbed = pert.value;
  rep.monotone = pert.value <= base.value + opts.tol;

  // rest measures: (L + phi + c)(x, 0) = c - (U - phi)(x)
  const auto pieces = pieces_of(cp);
  auto rest = [&](const Point& x) { return rep.c_perturbed - Lp.potential().value(x); };
  rep.on_core_action = std::numeric_limits<double>::infinity();
  for (const auto& pc : pieces) {
    for (double t : {0.0, 0.5}) rep.on_core_action = std::min(rep.on_core_action, rest(wrap_unit(Point(pc.a + t * (pc.b - pc.a)))));
  }
  rep.off_core_action = std::numeric_limits<double>::infinity();
  const int g = std::max(2, opts.grid);
  const int total = cp.dim == 1 ? g : g * g;
  for (int i = 0; i < total; ++i) {
    const Point x = cp.dim == 1 ? make_point((i + 0.5) / g) : make_point((i % g + 0.5) / g, (i / g + 0.5) / g);
    if (distance_to(pieces, cp.dim, x, nullptr) > opts.neighborhood) {
      rep.off_core_action = std::min(rep.off_core_action, rest(x));
    }
  }

  for (std::size_t i = 0; i < pert.witness.size(); ++i) {
    rep.witness_core_distance = std::max(
        rep.witness_core_distance, distance_to(pieces, cp.dim, pert.witness.torus_knot(i), nullptr));
  }
  rep.localized = !pert.witness.knots.empty() && rep.witness_core_distance <= opts.neighborhood;
  return rep;
}

std::vector<Point> parse_polyline(const std::string& text, int dim) {
  std::vector<Point> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::vector<double> v;
    double d;
    while (row >> d) v.push_back(d);
    if (!row.eof()) throw ParseError("bad polyline row " + std::to_string(no));
    if (v.empty()) continue;
    if (static_cast<int>(v.size()) != dim) {
      throw ParseError("polyline row " + std::to_string(no) + " needs " + std::to_string(dim) + " values");
    }
    out.push_back(dim == 1 ? make_point(v[0]) : make_point(v[0], v[1]));
  }
  if (out.empty()) throw ParseError("empty polyline");
  return out;
}

CanalPotential canal_spec(const Config& cfg, int dim, const std::string& base_dir) {
  CanalPotential cp;
  cp.dim = dim;
  const auto sec = cfg.get_child_optional("canal");
  if (!sec) throw ParseError("missing [canal] section");
  try {
    cp.eps = get_number(*sec, "eps", cp.eps);
    cp.k = get_integer(*sec, "k", cp.k);
    if (auto p = sec->get_optional<std::string>("plateau"); p && *p != "inf") cp.plateau = get_number(*sec, "plateau", 0.0);
    if (auto w = sec->get_optional<std::string>("winding")) {
      std::istringstream in(*w);
      for (int c = 0; c < dim; ++c) {
        if (!(in >> cp.winding[static_cast<std::size_t>(c)])) throw ParseError("winding needs dim integers");
      }
    }
  } catch (const boost::property_tree::ptree_error& e) {
    throw ParseError(e.what());
  }
  if (auto file = sec->get_optional<std::string>("core_file")) {
    std::filesystem::path p(*file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    cp.core = parse_polyline(buf.str(), dim);
  } else if (auto core = sec->get_optional<std::string>("core")) {
    std::string text = *core;
    std::replace(text.begin(), text.end(), '|', '\n');
    cp.core = parse_polyline(text, dim);
  } else {
    throw ParseError("[canal] needs core or core_file");
  }
  try {
    cp.check();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return cp;
}

void write_canal_spec(const CanalPotential& cp, Config& cfg) {
  cfg.put("canal.eps", format_double(cp.eps));
  cfg.put("canal.k", cp.k);
  cfg.put("canal.plateau", std::isinf(cp.plateau) ? std::string("inf") : format_double(cp.plateau));
  std::string w, core;
  for (int c = 0; c < cp.dim; ++c) {
    w += (c ? " " : "") + std::to_string(cp.winding[static_cast<std::size_t>(c)]);
  }
  for (std::size_t i = 0; i < cp.core.size(); ++i) {
    if (i) core += " | ";
    for (int c = 0; c < cp.dim; ++c) core += (c ? " " : "") + format_double(cp.core[i][c]);
  }
  cfg.put("canal.winding", w);
  cfg.put("canal.core", core);
}

}  // namespace aubry
