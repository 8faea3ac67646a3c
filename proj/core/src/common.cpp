#include "aubry/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace aubry {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  // floor can leave r == 1.0 for tiny negative x
  return r >= 1.0 ? 0.0 : r;
}

double wrap_centered(double d) {
  return d - std::floor(d + 0.5);
}

Point wrap_unit(const Point& x) {
  Point r(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) r[i] = wrap_unit(x[i]);
  return r;
}

Point wrap_centered(const Point& d) {
  Point r(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) r[i] = wrap_centered(d[i]);
  return r;
}

double torus_distance(const Point& a, const Point& b) {
  return wrap_centered(Point(b - a)).norm();
}

const std::array<double, 8> Gauss8::nodes = [] {
  constexpr std::array<double, 4> x{0.1834346424956498049394761,
                                    0.5255324099163289858177390,
                                    0.7966664774136267395915539,
                                    0.9602898564975362316835609};
  std::array<double, 8> n{};
  for (int i = 0; i < 4; ++i) {
    n[3 - i] = 0.5 - 0.5 * x[i];
    n[4 + i] = 0.5 + 0.5 * x[i];
  }
  return n;
}();

const std::array<double, 8> Gauss8::weights = [] {
  constexpr std::array<double, 4> w{0.3626837833783619829651504,
                                    0.3137066458778872873379622,
                                    0.2223810344533744705443560,
                                    0.1012285362903762591525314};
  std::array<double, 8> r{};
  for (int i = 0; i < 4; ++i) {
    r[3 - i] = 0.5 * w[i];
    r[4 + i] = 0.5 * w[i];
  }
  return r;
}();

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;

  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // keep the lowest failing index so the reported error is reproducible
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace aubry
