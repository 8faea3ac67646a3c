#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace aubry {

/// A point or vector on T^1 / T^2 (or its universal cover). Size is 1 or 2.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;
/// Small square matrix acting on Point.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

inline Point make_point(double x) {
  Point p(1);
  p << x;
  return p;
}
inline Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

/// Base class of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define AUBRY_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    explicit Name(const std::string& what)  \
        : Error(#Name ": " + what) {}       \
  }

AUBRY_DEFINE_ERROR(InvalidArgument);
AUBRY_DEFINE_ERROR(NonFiniteState);
AUBRY_DEFINE_ERROR(InvalidBound);
AUBRY_DEFINE_ERROR(BudgetExceeded);
AUBRY_DEFINE_ERROR(ZeroShift);
AUBRY_DEFINE_ERROR(NoCycle);
AUBRY_DEFINE_ERROR(EmptyRecode);
AUBRY_DEFINE_ERROR(IllegalConcatenation);
AUBRY_DEFINE_ERROR(WindowMismatch);
AUBRY_DEFINE_ERROR(WindowExhausted);
AUBRY_DEFINE_ERROR(NonInvariant);
AUBRY_DEFINE_ERROR(HorizonExceeded);
AUBRY_DEFINE_ERROR(NoValidRadius);
AUBRY_DEFINE_ERROR(OutOfLocalChart);
AUBRY_DEFINE_ERROR(ThresholdExceeded);
AUBRY_DEFINE_ERROR(HypothesisViolated);
AUBRY_DEFINE_ERROR(DimMismatch);
AUBRY_DEFINE_ERROR(ParseError);

#undef AUBRY_DEFINE_ERROR

// Torus helpers. Coordinates are reduced to [0,1), displacements to [-1/2,1/2).

double wrap_unit(double x);
double wrap_centered(double d);
Point wrap_unit(const Point& x);
Point wrap_centered(const Point& d);
double torus_distance(const Point& a, const Point& b);

/// Three-point Gauss-Legendre rule on [0,1].
struct Gauss3 {
  static constexpr std::array<double, 3> nodes{
      0.1127016653792583114820734, 0.5, 0.8872983346207416885179266};
  static constexpr std::array<double, 3> weights{
      5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
};

/// Eight-point Gauss-Legendre rule on [0,1]; exact for polynomials of degree 15.
struct Gauss8 {
  static const std::array<double, 8> nodes;
  static const std::array<double, 8> weights;
};

/// Resolves a requested thread count; values <= 0 mean hardware parallelism.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Callers write into
/// index-addressed slots, so results never depend on the thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace aubry
