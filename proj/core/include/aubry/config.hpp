#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "aubry/fields.hpp"
#include "aubry/lagrangian.hpp"

namespace aubry {

/// Flat key=value text with [section] headers; ';' and '#' start comments.
using Config = boost::property_tree::ptree;

Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string format_config(const Config& cfg);

/// Declarative form of a MechanicalLagrangian.
///
///   [lagrangian]
///   dim = 1
///   integrator = auto        ; auto | verlet | yoshida4 | rk4
///   dt = 0.001
///   [potential]
///   cos(1) = 1               ; 2D keys take an index pair: cos(1,0)
///   [oneform.0]
///   cos(0) = 0.5
struct LagrangianSpec {
  int dim = 1;
  std::vector<FourierTerm> potential;
  /// One coefficient table per component; empty means eta = 0.
  std::vector<std::vector<FourierTerm>> oneform;
  Integrator integrator = Integrator::Auto;
  double dt = 1e-3;

  MechanicalLagrangian build() const;
  friend bool operator==(const LagrangianSpec&, const LagrangianSpec&);
};

LagrangianSpec lagrangian_spec(const Config& cfg);
void write_lagrangian_spec(const LagrangianSpec& spec, Config& cfg);

Integrator parse_integrator(const std::string& name);
std::string integrator_name(Integrator m);

/// Strict readers for a key of `section`: the whole value must parse, else
/// ParseError. A missing key gives the fallback.
double get_number(const Config& section, const std::string& key, double fallback);
int get_integer(const Config& section, const std::string& key, int fallback);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace aubry
