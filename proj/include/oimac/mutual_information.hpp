#pragma once

// Mutual information of additive-noise channels Y = X + Z for the input
// objects in distribution.hpp:
//   mi_awgn          - Z Gaussian; I = h(Y) - 0.5 ln(2 pi e sigma^2), h(Y) by
//                      adaptive quadrature of the exact output density.
//   mi_uniform_noise - Z uniform; output density is closed-form piecewise
//                      constant for discrete inputs (integrated per piece).
//   mc_mi_estimate   - seeded Monte Carlo estimate of I using the same output
//                      density machinery, for cross-validation.

#include <string>
#include <vector>

#include "oimac/common.hpp"
#include "oimac/distribution.hpp"
#include "oimac/numerics.hpp"

namespace oimac {

struct MiResult {
  double value = 0.0;  // nats
  std::string method;
  double est_error = 0.0;
};

// A numerically evaluated achievable rate next to its closed-form counterpart.
struct LowerBoundPair {
  MiResult numeric;
  double closed_form = 0.0;
};

// Exact-as-possible output density of X + N(0, sigma^2):
//   atoms        -> windowed Gaussian-kernel sum,
//   step density -> closed-form normal-interval probabilities per piece,
//   general part -> adaptive convolution integral over the kernel window.
class GaussOutputDensity {
 public:
  GaussOutputDensity(const InputDistribution& dist, double sigma, QuadratureSpec spec = {})
      : sigma_(sigma), spec_(spec), dist_(dist) {
    if (!(sigma > 0.0)) throw std::domain_error("GaussOutputDensity: sigma must be positive");
    spec_.validate();
    window_ = (spec_.tail_sigma + 2.0) * sigma_;
    for (const auto& a : dist_.atoms) {
      axs_.push_back(a.x);
      ams_.push_back(a.mass);
    }
    generic_ = dist_.has_continuous() && !dist_.steps.has_value();
    if (generic_) cont_segments_ = dist_.support_intervals();
  }

  double operator()(double y) const {
    double v = 0.0;
    if (!axs_.empty()) {
      auto lo = std::lower_bound(axs_.begin(), axs_.end(), y - window_);
      auto hi = std::upper_bound(axs_.begin(), axs_.end(), y + window_);
      for (auto it = lo; it != hi; ++it)
        v += ams_[static_cast<std::size_t>(it - axs_.begin())] * gauss_pdf(y - *it, sigma_);
    }
    if (dist_.steps) {
      const auto& s = *dist_.steps;
      for (std::size_t i = 0; i < s.heights.size(); ++i) {
        if (s.heights[i] <= 0.0) continue;
        v += s.heights[i] *
             gauss_interval_prob((s.edges[i] - y) / sigma_, (s.edges[i + 1] - y) / sigma_);
      }
    } else if (generic_) {
      std::vector<Interval> segs;
      for (const auto& seg : cont_segments_) {
        double a = std::max(seg.lo, y - window_);
        double b = std::min(seg.hi, y + window_);
        if (b > a) segs.push_back({a, b});
      }
      if (!segs.empty()) {
        auto f = [&](double x) { return dist_.density(x) * gauss_pdf(y - x, sigma_); };
        v += integrate_adaptive(f, segs, 1e-14 / sigma_, 2048, 4).value;
      }
    }
    return v;
  }

  // Output-side integration range: support widened by tail_sigma noise widths,
  // seeded with breakpoints at atoms and step edges so the adaptive quadrature
  // starts aligned with the density's features.
  std::vector<Interval> entropy_segments() const {
    double lo = dist_.support.lo - spec_.tail_sigma * sigma_;
    double hi = dist_.support.hi + spec_.tail_sigma * sigma_;
    std::vector<double> cuts{lo, hi};
    auto add_cuts = [&](const std::vector<double>& pts) {
      std::size_t stride = std::max<std::size_t>(1, pts.size() / 8192);
      for (std::size_t i = 0; i < pts.size(); i += stride)
        if (pts[i] > lo && pts[i] < hi) cuts.push_back(pts[i]);
    };
    add_cuts(axs_);
    if (dist_.steps) add_cuts(dist_.steps->edges);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Interval> segs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) segs.push_back({cuts[i], cuts[i + 1]});
    return segs;
  }

  double sigma() const { return sigma_; }

 private:
  double sigma_;
  QuadratureSpec spec_;
  InputDistribution dist_;
  std::vector<double> axs_, ams_;
  std::vector<Interval> cont_segments_;
  double window_ = 0.0;
  bool generic_ = false;
};

// I(X; X+Z), Z ~ N(0, sigma^2). est_error is the standing 4x quadrature
// tolerance heuristic for differenced entropies.
inline MiResult mi_awgn(const InputDistribution& dist, double sigma,
                        const QuadratureSpec& spec = {}) {
  GaussOutputDensity py(dist, sigma, spec);
  double h_y = entropy_quadrature(py, py.entropy_segments(), spec);
  double h_z = 0.5 * std::log(2.0 * kPi * kE * sigma * sigma);
  return {h_y - h_z, "quadrature", 4.0 * spec.abs_tol};
}

// I(X; X+Z), Z ~ Uniform[-half_width, half_width]; X discrete, or mixed with a
// piecewise-constant continuous part (bounded support in both cases).
// For discrete X the output density is piecewise constant and its entropy is
// summed in closed form; the mixed case integrates the exact piecewise-affine
// output density per piece.
inline MiResult mi_uniform_noise(const InputDistribution& dist, double half_width,
                                 const QuadratureSpec& spec = {}) {
  if (!(half_width > 0.0)) throw std::domain_error("mi_uniform_noise: half_width must be > 0");
  if (dist.has_continuous() && !dist.steps.has_value())
    throw std::domain_error(
        "mi_uniform_noise: continuous input parts must be piecewise constant");
  const double w = half_width, inv2w = 0.5 / half_width;

  if (!dist.has_continuous()) {
    // Event sweep: each atom contributes a rectangle of height mass/(2w).
    struct Event {
      double x;
      double dh;
    };
    std::vector<Event> ev;
    ev.reserve(2 * dist.atoms.size());
    for (const auto& a : dist.atoms) {
      ev.push_back({a.x - w, a.mass * inv2w});
      ev.push_back({a.x + w, -a.mass * inv2w});
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
    double h_y = 0.0, mass = 0.0, level = 0.0, prev = ev.front().x;
    for (const auto& e : ev) {
      if (e.x > prev && level > 0.0) {
        h_y -= xlnx(level) * (e.x - prev);
        mass += level * (e.x - prev);
      }
      level += e.dh;
      prev = e.x;
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw inconsistent_density_error("mi_uniform_noise: output mass != 1");
    return {h_y - std::log(2.0 * w), "exact-piecewise", 1e-12 * (1.0 + std::abs(h_y))};
  }

  // Mixed case: p_Y(y) = (F(y+w) - F(y-w)) / (2w) with the exact CDF F.
  auto cdf = [&](double t) {
    double c = 0.0;
    for (const auto& a : dist.atoms)
      if (a.x <= t) c += a.mass;
    const auto& s = *dist.steps;
    for (std::size_t i = 0; i < s.heights.size(); ++i) {
      if (t <= s.edges[i]) break;
      c += s.heights[i] * (std::min(t, s.edges[i + 1]) - s.edges[i]);
    }
    return c;
  };
  auto pdf = [&](double y) { return inv2w * (cdf(y + w) - cdf(y - w)); };
  std::vector<double> cuts;
  for (const auto& a : dist.atoms) {
    cuts.push_back(a.x - w);
    cuts.push_back(a.x + w);
  }
  for (double e : dist.steps->edges) {
    cuts.push_back(e - w);
    cuts.push_back(e + w);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) segs.push_back({cuts[i], cuts[i + 1]});
  double h_y = entropy_quadrature(pdf, segs, spec);
  return {h_y - std::log(2.0 * w), "quadrature", 4.0 * spec.abs_tol};
}

// Monte Carlo estimate of I(X; X+Z), Z ~ N(0, sigma^2), as the sample mean of
// ln(p_{Y|X}(y|x) / p_Y(y)) with p_Y from GaussOutputDensity. Deterministic
// for a fixed (seed, samples) pair.
inline McEstimate mc_mi_estimate(const InputDistribution& dist, double sigma, long samples,
                                 std::uint64_t seed, const QuadratureSpec& spec = {}) {
  if (samples < 10000) throw std::domain_error("mc_mi_estimate: need at least 1e4 samples");
  if (!dist.sampler) throw std::domain_error("mc_mi_estimate: distribution has no sampler");
  GaussOutputDensity py(dist, sigma, spec);
  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  const double log_norm = -std::log(sigma * std::sqrt(2.0 * kPi));
  for (long i = 0; i < samples; ++i) {
    double x = dist.sampler(rng);
    double z = sigma * rng.gaussian();
    double y = x + z;
    double t = z / sigma;
    double ll = (log_norm - 0.5 * t * t) - std::log(py(y));
    double delta = ll - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (ll - mean);
  }
  double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples)), samples, seed};
}

}  // namespace oimac
