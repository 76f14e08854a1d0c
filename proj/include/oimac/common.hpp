#pragma once

// Shared constants, error types, and small helpers used across the library.
// Internal unit convention: information in nats, intensities in linear scale.
// Bits and dB appear only at the reporting boundary (see report.hpp / CLI).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace oimac {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kE = 2.71828182845904523536;
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// e/(2*pi): recurring factor in the average-power bounds.
inline constexpr double kEOver2Pi = kE / (2.0 * kPi);

// sqrt(2*pi*e): recurring factor in the peak-power bounds.
inline double sqrt_2pi_e() { return std::sqrt(2.0 * kPi * kE); }

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// Raised when a numeric routine exhausts its budget without meeting tolerance.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double best, double error_bound)
      : std::runtime_error(what), best_value(best), error_estimate(error_bound) {}
  double best_value;
  double error_estimate;
};

// Raised when a claimed probability density fails its normalization check.
class inconsistent_density_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// x*ln(x) with the measure-theoretic convention 0*ln(0) = 0.
inline double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Binary entropy in nats; p in [0,1].
inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
  return -xlnx(p) - xlnx(1.0 - p);
}

// Maps f over [0, n) with results stored by index, so the output is identical
// regardless of thread count. Used for embarrassingly parallel grid sweeps.
inline void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& f) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = hw == 0 ? 1 : std::min<std::size_t>(hw, n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace oimac
