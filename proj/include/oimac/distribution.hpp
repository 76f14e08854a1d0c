#pragma once

// Channel-input distribution objects: point masses, exponential / uniform /
// Erlang densities, the atom-plus-exponential capacity-achieving mixture of
// the additive-exponential-noise channel, geometrically spaced discrete pmfs,
// max-mass discrete laws for peak-limited channels, and exact-where-possible
// convolution. Piecewise-constant continuous parts keep a closed-form step
// representation so later entropy/output integrals stay exact per piece.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oimac/common.hpp"
#include "oimac/numerics.hpp"

namespace oimac {

struct Atom {
  double x = 0.0;
  double mass = 0.0;
};

// Piecewise-constant density: heights[i] on [edges[i], edges[i+1]).
struct StepDensity {
  std::vector<double> edges;    // strictly increasing, size >= 2
  std::vector<double> heights;  // size == edges.size() - 1, entries >= 0

  double at(double x) const {
    if (edges.empty() || x < edges.front() || x >= edges.back()) return 0.0;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t i = static_cast<std::size_t>(it - edges.begin());
    if (i == 0 || i > heights.size()) return 0.0;
    return heights[i - 1];
  }

  double mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i) s += heights[i] * (edges[i + 1] - edges[i]);
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i)
      s += heights[i] * 0.5 * (edges[i + 1] * edges[i + 1] - edges[i] * edges[i]);
    return s;
  }

  // Exact differential-entropy contribution -sum h ln h * len (only meaningful
  // when this is a full normalized density).
  double exact_entropy() const {
    double s = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i)
      s -= xlnx(heights[i]) * (edges[i + 1] - edges[i]);
    return s;
  }
};

namespace detail {

inline StepDensity step_scale_shift(const StepDensity& s, double shift, double weight) {
  StepDensity out = s;
  for (auto& e : out.edges) e += shift;
  for (auto& h : out.heights) h *= weight;
  return out;
}

// Sum of step densities on the union of their edge grids (exact).
inline StepDensity step_sum(const std::vector<StepDensity>& parts) {
  std::vector<double> edges;
  for (const auto& p : parts) edges.insert(edges.end(), p.edges.begin(), p.edges.end());
  std::sort(edges.begin(), edges.end());
  double span = edges.empty() ? 0.0 : edges.back() - edges.front();
  double tol = std::max(span, 1.0) * 1e-12;
  std::vector<double> uniq;
  for (double e : edges)
    if (uniq.empty() || e - uniq.back() > tol) uniq.push_back(e);
  StepDensity out;
  out.edges = uniq;
  if (uniq.size() < 2) {
    out.edges = {0.0, 0.0};
    out.heights = {};
    return out;
  }
  out.heights.resize(uniq.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    double mid = 0.5 * (uniq[i] + uniq[i + 1]);
    double h = 0.0;
    for (const auto& p : parts) h += p.at(mid);
    out.heights[i] = h;
  }
  return out;
}

inline void sort_and_merge_atoms(std::vector<Atom>& atoms, double merge_tol) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.x - merged.back().x <= merge_tol) {
      double total = merged.back().mass + a.mass;
      merged.back().x = (merged.back().x * merged.back().mass + a.x * a.mass) / total;
      merged.back().mass = total;
    } else {
      merged.push_back(a);
    }
  }
  atoms = std::move(merged);
}

}  // namespace detail

class InputDistribution {
 public:
  std::vector<Atom> atoms;                // sorted by location
  std::function<double(double)> density;  // continuous part; empty if none
  std::optional<StepDensity> steps;       // set when density is exactly piecewise constant
  Interval support{0.0, 0.0};
  double continuous_mass = 0.0;
  double mean = 0.0;
  std::function<double(Rng&)> sampler;
  std::string family;

  bool has_continuous() const { return static_cast<bool>(density); }

  double atom_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
  }

  // Support split at density breakpoints (step edges), zero-height gaps removed.
  std::vector<Interval> support_intervals() const {
    std::vector<Interval> out;
    if (!has_continuous()) return out;
    if (steps) {
      for (std::size_t i = 0; i < steps->heights.size(); ++i) {
        if (steps->heights[i] <= 0.0) continue;
        if (!out.empty() && out.back().hi == steps->edges[i])
          out.back().hi = steps->edges[i + 1];
        else
          out.push_back({steps->edges[i], steps->edges[i + 1]});
      }
    } else {
      out.push_back(support);
    }
    return out;
  }

  // Consistency check used by tests: masses, normalization, mean, support.
  void validate() const {
    double am = 0.0;
    for (const auto& a : atoms) {
      if (!(a.mass > 0.0) || a.mass > 1.0 + 1e-12)
        throw inconsistent_density_error("atom mass outside (0,1]");
      if (a.x < support.lo - 1e-12 || a.x > support.hi + 1e-12)
        throw inconsistent_density_error("atom outside support");
      am += a.mass;
    }
    double cm = 0.0, cmean = 0.0;
    if (has_continuous()) {
      auto segs = support_intervals();
      auto f = [&](double x) {
        double p = density(x);
        return std::array<double, 2>{p, x * p};
      };
      double scale = std::max(1.0, std::abs(support.hi) + std::abs(support.lo));
      auto r = integrate_adaptive_vec<2>(f, segs,
                                         std::array<double, 2>{1e-12, 1e-12 * scale}, 1 << 18);
      cm = r[0].value;
      cmean = r[1].value;
    }
    if (std::abs(am + cm - 1.0) > 1e-9)
      throw inconsistent_density_error("total mass " + std::to_string(am + cm) + " != 1");
    if (std::abs(cm - continuous_mass) > 1e-9)
      throw inconsistent_density_error("continuous_mass field inconsistent");
    double m = cmean;
    for (const auto& a : atoms) m += a.x * a.mass;
    double mtol = 1e-9 * std::max(1.0, std::abs(mean));
    if (std::abs(m - mean) > mtol)
      throw inconsistent_density_error("mean field " + std::to_string(mean) +
                                       " inconsistent with components " + std::to_string(m));
  }
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline InputDistribution make_point_mass(double x) {
  InputDistribution d;
  d.atoms = {{x, 1.0}};
  d.support = {x, x};
  d.mean = x;
  d.sampler = [x](Rng&) { return x; };
  d.family = "point";
  return d;
}

// Exponential density with the given mean; support truncated where the tail
// mass drops below ~1e-16 so downstream quadrature sees a finite interval.
inline InputDistribution make_exponential(double mean) {
  if (!(mean > 0.0)) throw std::domain_error("make_exponential: mean must be positive");
  InputDistribution d;
  double hi = mean * 37.0;
  d.density = [mean](double x) { return x < 0.0 ? 0.0 : std::exp(-x / mean) / mean; };
  d.support = {0.0, hi};
  d.continuous_mass = 1.0;
  d.mean = mean;
  d.sampler = [mean](Rng& rng) { return -mean * std::log(rng.uniform01()); };
  d.family = "exponential";
  return d;
}

inline InputDistribution make_uniform(double peak) {
  if (!(peak > 0.0)) throw std::domain_error("make_uniform: peak must be positive");
  InputDistribution d;
  d.steps = StepDensity{{0.0, peak}, {1.0 / peak}};
  StepDensity s = *d.steps;
  d.density = [s](double x) { return s.at(x); };
  d.support = {0.0, peak};
  d.continuous_mass = 1.0;
  d.mean = 0.5 * peak;
  d.sampler = [peak](Rng& rng) { return peak * rng.uniform01(); };
  d.family = "uniform";
  return d;
}

// Erlang (Gamma with integer shape): sum of `shape` i.i.d. exponentials of the
// given per-stage mean. Total mean = shape * stage_mean.
inline InputDistribution make_erlang(long shape, double stage_mean) {
  if (shape < 1) throw std::domain_error("make_erlang: shape must be a positive integer");
  if (!(stage_mean > 0.0)) throw std::domain_error("make_erlang: stage mean must be positive");
  if (shape == 1) return make_exponential(stage_mean);
  InputDistribution d;
  double lognorm = -static_cast<double>(shape) * std::log(stage_mean) - ln_factorial(shape - 1);
  d.density = [shape, stage_mean, lognorm](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(lognorm + (shape - 1) * std::log(x) - x / stage_mean);
  };
  // Find t with upper-tail mass of Gamma(shape, 1) below ~1e-16.
  double t = 40.0 + 10.0 * static_cast<double>(shape);
  auto log_tail = [shape](double tt) {
    // log of e^-t * sum_{j<K} t^j/j!; dominated by the last term for tt >> K
    double best = -std::numeric_limits<double>::infinity();
    for (long j = 0; j < shape; ++j)
      best = std::max(best, -tt + j * std::log(tt) - ln_factorial(j));
    return best + std::log(static_cast<double>(shape));  // crude union bound
  };
  while (log_tail(t) > std::log(1e-16)) t *= 1.25;
  d.support = {0.0, stage_mean * t};
  d.continuous_mass = 1.0;
  d.mean = static_cast<double>(shape) * stage_mean;
  d.sampler = [shape, stage_mean](Rng& rng) {
    double s = 0.0;
    for (long j = 0; j < shape; ++j) s -= stage_mean * std::log(rng.uniform01());
    return s;
  };
  d.family = "erlang";
  return d;
}

// Capacity-achieving input of the additive exponential-noise channel with
// signal mean es and noise mean en: an atom at 0 of mass en/(es+en) plus the
// density es/(es+en)^2 * exp(-x/(es+en)). Its mean is es, and adding
// independent exponential(en) noise yields exponential(es+en) output.
inline InputDistribution make_aen_mix(double es, double en) {
  if (!(es > 0.0) || !(en > 0.0)) throw std::domain_error("make_aen_mix: means must be positive");
  InputDistribution d;
  double s = es + en;
  d.atoms = {{0.0, en / s}};
  d.density = [es, s](double x) { return x < 0.0 ? 0.0 : es / (s * s) * std::exp(-x / s); };
  d.support = {0.0, 37.0 * s};
  d.continuous_mass = es / s;
  d.mean = es;
  double atom_p = en / s;
  d.sampler = [atom_p, s](Rng& rng) {
    if (rng.uniform01() < atom_p) return 0.0;
    return -s * std::log(rng.uniform01());
  };
  d.family = "aen_mix";
  return d;
}

// Geometric pmf on the lattice {0, ell, 2*ell, ...} parameterized so that the
// un-truncated mean equals `mean` for every spacing ell:
// P(X = m*ell) = (ell/(ell+mean)) * (mean/(ell+mean))^m.
// Atoms are kept until the retained mass reaches 1 - 1e-12, then renormalized.
inline InputDistribution make_geometric_spaced(double mean, double ell) {
  if (!(mean > 0.0) || !(ell > 0.0))
    throw std::domain_error("make_geometric_spaced: parameters must be positive");
  double q = mean / (ell + mean);
  long last = static_cast<long>(std::ceil(std::log(1e-12) / std::log(q))) - 1;
  last = std::max<long>(last, 0);
  InputDistribution d;
  d.atoms.reserve(static_cast<std::size_t>(last) + 1);
  double p = 1.0 - q;
  double retained = 1.0 - std::pow(q, static_cast<double>(last) + 1.0);
  double m = 0.0;
  for (long k = 0; k <= last; ++k) {
    double mass = p / retained;
    d.atoms.push_back({static_cast<double>(k) * ell, mass});
    m += d.atoms.back().x * mass;
    p *= q;
  }
  d.support = {0.0, d.atoms.back().x};
  d.mean = m;
  std::vector<double> cum(d.atoms.size());
  double c = 0.0;
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    c += d.atoms[i].mass;
    cum[i] = c;
  }
  auto atoms_copy = d.atoms;
  d.sampler = [cum, atoms_copy](Rng& rng) {
    double u = rng.uniform01();
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    std::size_t i = std::min(static_cast<std::size_t>(it - cum.begin()), atoms_copy.size() - 1);
    return atoms_copy[i].x;
  };
  d.family = "geometric";
  return d;
}

enum class MaxMassStyle { symmetric_pm, shifted_nonneg };

// Max-differential-entropy-achieving discrete input for a peak-limited channel
// with uniform noise. With n = ceil(a) and masses (n-m)/(n(n+1)):
//   symmetric_pm : atoms at +/-(a - m*spacing), the unit-noise geometry when
//                  spacing = 2 (noise on [-1,1], |X| <= a);
//   shifted_nonneg: atoms at (a-m)*spacing and m*spacing, i.e. the nonnegative
//                  version on [0, a*spacing] used for the two-user corners.
// Coincident atoms (integer a) are merged; for integer a the symmetric style
// collapses to n+1 equiprobable atoms of mass 1/(n+1).
inline InputDistribution make_maxmass_discrete(double a, double spacing, MaxMassStyle style) {
  if (!(a > 0.0) || !(spacing > 0.0))
    throw std::domain_error("make_maxmass_discrete: a and spacing must be positive");
  long n = static_cast<long>(std::ceil(a - 1e-12));
  n = std::max<long>(n, 1);
  double denom = static_cast<double>(n) * static_cast<double>(n + 1);
  std::vector<Atom> atoms;
  for (long m = 0; m < n; ++m) {
    double mass = static_cast<double>(n - m) / denom;
    if (style == MaxMassStyle::symmetric_pm) {
      double loc = a - static_cast<double>(m) * spacing;
      atoms.push_back({loc, mass});
      atoms.push_back({-loc, mass});
    } else {
      atoms.push_back({(a - static_cast<double>(m)) * spacing, mass});
      atoms.push_back({static_cast<double>(m) * spacing, mass});
    }
  }
  detail::sort_and_merge_atoms(atoms, 1e-9 * spacing);
  InputDistribution d;
  d.atoms = atoms;
  d.support = {atoms.front().x, atoms.back().x};
  double mu = 0.0;
  for (const auto& at : atoms) mu += at.x * at.mass;
  d.mean = mu;
  std::vector<double> cum(atoms.size());
  double c = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    c += atoms[i].mass;
    cum[i] = c;
  }
  d.sampler = [cum, atoms](Rng& rng) {
    double u = rng.uniform01();
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    std::size_t i = std::min(static_cast<std::size_t>(it - cum.begin()), atoms.size() - 1);
    return atoms[i].x;
  };
  d.family = "maxmass";
  return d;
}

// Differential entropy of Erlang(shape, stage_mean), closed form:
// h = K + ln((K-1)! E) + (1-K) psi(K) with the standard psi convention.
inline double erlang_entropy(long shape, double stage_mean) {
  if (shape < 1 || !(stage_mean > 0.0)) throw std::domain_error("erlang_entropy: bad parameters");
  return static_cast<double>(shape) + ln_factorial(shape - 1) + std::log(stage_mean) +
         (1.0 - static_cast<double>(shape)) * digamma_int(shape);
}

// ---------------------------------------------------------------------------
// Convolution (law of the sum of independent inputs)
// ---------------------------------------------------------------------------

inline InputDistribution density_convolve(const InputDistribution& d1,
                                          const InputDistribution& d2) {
  InputDistribution out;
  out.support = {d1.support.lo + d2.support.lo, d1.support.hi + d2.support.hi};
  out.mean = d1.mean + d2.mean;
  out.family = d1.family + "+" + d2.family;

  // Discrete x discrete part.
  for (const auto& a1 : d1.atoms)
    for (const auto& a2 : d2.atoms) out.atoms.push_back({a1.x + a2.x, a1.mass * a2.mass});
  double span = std::max(1.0, out.support.hi - out.support.lo);
  detail::sort_and_merge_atoms(out.atoms, 1e-9 * span * 1e-3);

  bool both_cont = d1.has_continuous() && d2.has_continuous();
  bool steps_ok = !both_cont && (!d1.has_continuous() || d1.steps.has_value()) &&
                  (!d2.has_continuous() || d2.steps.has_value());

  if (steps_ok && (d1.has_continuous() || d2.has_continuous())) {
    // Atom (x) step convolution stays an exact step density.
    std::vector<StepDensity> parts;
    if (d1.steps)
      for (const auto& a2 : d2.atoms)
        parts.push_back(detail::step_scale_shift(*d1.steps, a2.x, a2.mass));
    if (d2.steps)
      for (const auto& a1 : d1.atoms)
        parts.push_back(detail::step_scale_shift(*d2.steps, a1.x, a1.mass));
    out.steps = detail::step_sum(parts);
    StepDensity s = *out.steps;
    out.density = [s](double x) { return s.at(x); };
  } else if (d1.has_continuous() || d2.has_continuous()) {
    // General case: shifted-copy terms for atom x continuous, plus an
    // on-demand quadrature closure for continuous x continuous.
    auto f1 = d1.density;
    auto f2 = d2.density;
    auto atoms1 = d1.atoms;
    auto atoms2 = d2.atoms;
    Interval s1 = d1.support, s2 = d2.support;
    std::vector<double> brk1, brk2;  // integration breakpoints of each density
    if (d1.steps)
      brk1 = d1.steps->edges;
    else
      brk1 = {s1.lo, s1.hi};
    if (d2.steps)
      brk2 = d2.steps->edges;
    else
      brk2 = {s2.lo, s2.hi};
    out.density = [f1, f2, atoms1, atoms2, s1, s2, brk1, brk2, both_cont](double x) {
      double v = 0.0;
      if (f2)
        for (const auto& a : atoms1) v += a.mass * f2(x - a.x);
      if (f1)
        for (const auto& a : atoms2) v += a.mass * f1(x - a.x);
      if (both_cont) {
        double lo = std::max(s1.lo, x - s2.hi);
        double hi = std::min(s1.hi, x - s2.lo);
        if (hi > lo) {
          std::vector<double> cuts{lo, hi};
          for (double b : brk1)
            if (b > lo && b < hi) cuts.push_back(b);
          for (double b : brk2) {
            double t = x - b;
            if (t > lo && t < hi) cuts.push_back(t);
          }
          std::sort(cuts.begin(), cuts.end());
          std::vector<Interval> segs;
          for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i]) segs.push_back({cuts[i], cuts[i + 1]});
          auto integrand = [&](double t) { return f1(t) * f2(x - t); };
          v += integrate_adaptive(integrand, segs, 1e-11, 4096, 2).value;
        }
      }
      return v;
    };
  }

  double am = out.atom_mass();
  out.continuous_mass = out.has_continuous() ? 1.0 - am : 0.0;
  if (d1.sampler && d2.sampler) {
    auto sp1 = d1.sampler, sp2 = d2.sampler;
    out.sampler = [sp1, sp2](Rng& rng) { return sp1(rng) + sp2(rng); };
  }
  return out;
}

}  // namespace oimac
