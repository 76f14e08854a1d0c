#pragma once

// Core numeric machinery: Gaussian tail function, integer digamma, bracketed
// root finding, golden-section maximization, adaptive Gauss-Legendre panel
// quadrature (with a differential-entropy front end), and a deterministic RNG
// for Monte Carlo cross-checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "oimac/common.hpp"

namespace oimac {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

// Gaussian upper-tail probability Q(x) = P(N(0,1) > x).
// Clamped into the open interval (0,1): true values beyond |x| ~ 38.5 are not
// representable in double, so the nearest representable positive value is used.
inline double q_function(double x) {
  if (!std::isfinite(x)) throw std::domain_error("q_function: non-finite argument");
  double v = 0.5 * std::erfc(x / std::sqrt(2.0));
  if (v <= 0.0) return std::numeric_limits<double>::denorm_min();
  if (v >= 1.0) return std::nextafter(1.0, 0.0);
  return v;
}

// Standard normal pdf with scale sigma.
inline double gauss_pdf(double x, double sigma) {
  double t = x / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * kPi));
}

// P(alpha <= N(0,1) <= beta), evaluated to avoid cancellation for intervals far
// in either tail (uses whichever of Q / erf is well-conditioned).
inline double gauss_interval_prob(double alpha, double beta) {
  if (alpha > beta) return 0.0;
  if (alpha >= 0.0) return q_function(alpha) - q_function(beta);
  if (beta <= 0.0) return q_function(-beta) - q_function(-alpha);
  // Interval straddles 0: erf is accurate near the origin.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return 0.5 * (std::erf(beta * inv_sqrt2) - std::erf(alpha * inv_sqrt2));
}

// Digamma at positive integers: psi(1) = -gamma, psi(k) = -gamma + H_{k-1}.
inline double digamma_int(long k) {
  if (k < 1) throw std::domain_error("digamma_int: argument must be a positive integer");
  double h = 0.0;
  for (long j = 1; j < k; ++j) h += 1.0 / static_cast<double>(j);
  return h - kEulerGamma;
}

// ln(n!) by direct summation (exact enough for the factorial ranges used here).
inline double ln_factorial(long n) {
  if (n < 0) throw std::domain_error("ln_factorial: negative argument");
  double s = 0.0;
  for (long j = 2; j <= n; ++j) s += std::log(static_cast<double>(j));
  return s;
}

// ---------------------------------------------------------------------------
// Root finding and 1-D maximization
// ---------------------------------------------------------------------------

// Bisection on a sign change; returns the bracket midpoint once the bracket
// width is <= tol. Throws if [lo,hi] does not bracket a root.
template <typename F>
double bisect_root(F&& f, double lo, double hi, double tol) {
  if (!(lo < hi) || !(tol > 0.0)) throw std::domain_error("bisect_root: bad bracket or tol");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::domain_error("bisect_root: endpoints do not bracket a root");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // hit fp resolution
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct MaxResult {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section maximization hardened with a coarse pre-scan (>= 33 points)
// so that on a non-unimodal objective the best probe wins. All probes,
// including pre-scan points, compete for the returned maximum.
template <typename F>
MaxResult golden_max(F&& f, double lo, double hi, double xtol, int prescan_points = 33) {
  if (!(lo < hi) || !(xtol > 0.0)) throw std::domain_error("golden_max: bad bracket or tol");
  prescan_points = std::max(prescan_points, 33);

  MaxResult best{lo, -std::numeric_limits<double>::infinity()};
  auto probe = [&](double x) {
    double v = f(x);
    if (v > best.value) best = {x, v};
    return v;
  };

  int ibest = 0;
  std::vector<double> xs(prescan_points);
  for (int i = 0; i < prescan_points; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (prescan_points - 1);
    double v = probe(xs[i]);
    if (v >= best.value) ibest = i;  // best is updated inside probe
  }
  double a = xs[std::max(ibest - 1, 0)];
  double b = xs[std::min(ibest + 1, prescan_points - 1)];

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = probe(c), fd = probe(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = probe(d);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Legendre panel quadrature
// ---------------------------------------------------------------------------

struct QuadratureSpec {
  double abs_tol = 1e-6;    // absolute tolerance, nats (for entropy integrals)
  double rel_tol = 1e-8;    // relative tolerance (normalization checks)
  double tail_sigma = 8.0;  // Gaussian support truncation, in noise std devs
  int max_panels = 1 << 18;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::domain_error("QuadratureSpec: tolerances must be positive");
    if (!(tail_sigma >= 6.0)) throw std::domain_error("QuadratureSpec: tail_sigma must be >= 6");
    if (max_panels < 16) throw std::domain_error("QuadratureSpec: max_panels must be >= 16");
  }
};

namespace detail {

// Positive half of the symmetric Gauss-Legendre rules on [-1,1].
struct GlPoint {
  double x, w;
};
inline constexpr std::array<GlPoint, 8> kGl16Half{{{0.0950125098376374402, 0.189450610455068496},
                                                   {0.281603550779258913, 0.182603415044923589},
                                                   {0.458016777657227386, 0.169156519395002538},
                                                   {0.617876244402643748, 0.149595988816576732},
                                                   {0.755404408355003034, 0.124628971255533872},
                                                   {0.865631202387831744, 0.0951585116824927848},
                                                   {0.944575023073232576, 0.0622535239386478929},
                                                   {0.989400934991649933, 0.0271524594117540949}}};
inline constexpr std::array<GlPoint, 12> kGl24Half{{{0.0640568928626056261, 0.127938195346752157},
                                                    {0.191118867473616309, 0.125837456346828296},
                                                    {0.315042679696163374, 0.121670472927803391},
                                                    {0.433793507626045138, 0.115505668053725601},
                                                    {0.545421471388839536, 0.107444270115965635},
                                                    {0.648093651936975569, 0.0976186521041138883},
                                                    {0.740124191578554364, 0.0861901615319532759},
                                                    {0.820001985973902922, 0.0733464814110803057},
                                                    {0.886415527004401034, 0.0592985849154367807},
                                                    {0.938274552002732759, 0.0442774388174198062},
                                                    {0.974728555971309498, 0.0285313886289336632},
                                                    {0.99518721999702136, 0.0123412297999871995}}};

template <std::size_t M, typename F>
double gl_panel(const std::array<GlPoint, M>& half, F&& f, double a, double b) {
  double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& p : half) s += p.w * (f(mid - rad * p.x) + f(mid + rad * p.x));
  return s * rad;
}

}  // namespace detail

// Fixed 16-point Gauss-Legendre panel (for smooth inner kernels).
template <typename F>
double gl16(F&& f, double a, double b) {
  return detail::gl_panel(detail::kGl16Half, f, a, b);
}

// Fixed 24-point Gauss-Legendre panel (workhorse of the adaptive scheme).
template <typename F>
double gl24(F&& f, double a, double b) {
  return detail::gl_panel(detail::kGl24Half, f, a, b);
}

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// Vector-valued adaptive bisection quadrature over a union of intervals.
// A panel is accepted when every component's |GL24(panel) - GL24(halves)|
// is within its proportional share of that component's tolerance. Panels are
// seeded at the interval boundaries (callers pass density breakpoints there).
template <int N, typename F>
std::array<IntegralResult, N> integrate_adaptive_vec(F&& f, const std::vector<Interval>& segments,
                                                     const std::array<double, N>& tol,
                                                     int max_panels, int initial_per_unit = 64) {
  double total_len = 0.0;
  for (const auto& s : segments) {
    if (!(s.hi >= s.lo) || !std::isfinite(s.lo) || !std::isfinite(s.hi))
      throw std::domain_error("integrate_adaptive_vec: bad segment");
    total_len += s.length();
  }
  std::array<IntegralResult, N> out{};
  if (total_len <= 0.0) return out;

  auto gl24_vec = [&](double a, double b) {
    double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    std::array<double, N> s{};
    for (const auto& p : detail::kGl24Half) {
      auto f1 = f(mid - rad * p.x);
      auto f2 = f(mid + rad * p.x);
      for (int c = 0; c < N; ++c) s[c] += p.w * (f1[c] + f2[c]);
    }
    for (int c = 0; c < N; ++c) s[c] *= rad;
    return s;
  };

  struct Panel {
    double a, b;
    std::array<double, N> est;
  };
  std::vector<Panel> stack;
  // Seed: split each segment so that no initial panel exceeds total/initial_per_unit.
  double max_init = total_len / static_cast<double>(std::max(initial_per_unit, 1));
  for (const auto& s : segments) {
    if (s.length() <= 0.0) continue;
    int chunks = std::max(1, static_cast<int>(std::ceil(s.length() / max_init)));
    chunks = std::min(chunks, 4096);
    double step = s.length() / chunks;
    for (int i = 0; i < chunks; ++i) {
      double a = s.lo + i * step;
      double b = (i + 1 == chunks) ? s.hi : a + step;
      stack.push_back({a, b, gl24_vec(a, b)});
    }
  }

  const double min_width = total_len * 1e-13;
  int panels = 0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    double m = 0.5 * (p.a + p.b);
    auto left = gl24_vec(p.a, m);
    auto right = gl24_vec(m, p.b);
    double share = (p.b - p.a) / total_len;
    bool ok = true;
    std::array<double, N> err{};
    for (int c = 0; c < N; ++c) {
      err[c] = std::abs(p.est[c] - left[c] - right[c]);
      if (err[c] > tol[c] * share) ok = false;
    }
    if (ok || (p.b - p.a) <= min_width || m <= p.a || m >= p.b) {
      ++panels;
      for (int c = 0; c < N; ++c) {
        out[c].value += left[c] + right[c];
        out[c].error_estimate += err[c];
      }
      if (panels > max_panels) {
        throw convergence_error("integrate_adaptive_vec: panel budget exhausted", out[0].value,
                                out[0].error_estimate);
      }
    } else {
      if (static_cast<int>(stack.size()) + panels > 8 * max_panels)
        throw convergence_error("integrate_adaptive_vec: refinement diverged", out[0].value,
                                out[0].error_estimate);
      stack.push_back({p.a, m, left});
      stack.push_back({m, p.b, right});
    }
  }
  for (int c = 0; c < N; ++c) out[c].panels = panels;
  return out;
}

// Scalar adaptive quadrature over a union of intervals.
template <typename F>
IntegralResult integrate_adaptive(F&& f, const std::vector<Interval>& segments, double abs_tol,
                                  int max_panels = 1 << 18, int initial_per_unit = 64) {
  auto vec = [&](double x) { return std::array<double, 1>{f(x)}; };
  auto r = integrate_adaptive_vec<1>(vec, segments, std::array<double, 1>{abs_tol}, max_panels,
                                     initial_per_unit);
  return r[0];
}

// Differential entropy -integral p ln p over the given support intervals.
// Also integrates p itself on the same panels and rejects densities whose mass
// differs from 1 by more than 10 * rel_tol.
template <typename F>
double entropy_quadrature(F&& density, const std::vector<Interval>& support,
                          const QuadratureSpec& spec = {}) {
  spec.validate();
  auto integrand = [&](double x) {
    double p = density(x);
    if (p < 0.0) p = 0.0;  // guard closure round-off; real negativity is caught below
    return std::array<double, 2>{p, -xlnx(p)};
  };
  auto r = integrate_adaptive_vec<2>(integrand, support,
                                     std::array<double, 2>{spec.rel_tol, spec.abs_tol},
                                     spec.max_panels);
  double mass = r[0].value;
  if (std::abs(mass - 1.0) > 10.0 * spec.rel_tol)
    throw inconsistent_density_error("entropy_quadrature: density mass " + std::to_string(mass) +
                                     " differs from 1 beyond 10*rel_tol");
  return r[1].value;
}

// ---------------------------------------------------------------------------
// Deterministic RNG (explicit Box-Muller; identical stream on every platform)
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on the open interval (0,1).
  double uniform01() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * kPi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
};

}  // namespace oimac
