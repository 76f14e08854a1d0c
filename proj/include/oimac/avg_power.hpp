#pragma once

// Capacity-region bounds for the K-user optical intensity MAC under per-user
// average-power constraints, Y = sum_i X_i + N(0, sigma^2), X_i >= 0,
// E[X_i] <= E_i, with snr_i = E_i / sigma.
//
// Outer bounds: for every nonempty user subset J,
//     sum_{i in J} R_i <= 0.5 ln( (e/2pi) (sum_{i in J} snr_i + 2)^2 ).
// Inner bounds: corner points from successive decoding with exponential
// inputs, I^E(s) = I(X^E; X^E + Z); single-user corners use the maximizing
// geometrically spaced discrete input I^G(s). Closed-form inner H-rep:
//     sum_{i in J} R_i <= 0.5 ln( 1 + (e/2pi) (sum_{i in J} snr_i)^2 ),
// optionally tightened to the numeric I^E of the subset sums.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "oimac/common.hpp"
#include "oimac/distribution.hpp"
#include "oimac/mutual_information.hpp"
#include "oimac/region.hpp"

namespace oimac {

struct ApOperatingPoint {
  std::vector<double> snr;
  double sigma = 1.0;

  void validate(std::size_t max_users = 6) const {
    if (snr.empty()) throw std::domain_error("ApOperatingPoint: need at least one user");
    if (snr.size() > max_users)
      throw std::domain_error("ApOperatingPoint: user count exceeds configured maximum");
    for (double s : snr)
      if (!(s >= 0.0) || !std::isfinite(s))
        throw std::domain_error("ApOperatingPoint: snr must be finite and nonnegative");
    if (!(sigma > 0.0)) throw std::domain_error("ApOperatingPoint: sigma must be positive");
  }
};

// 0.5 ln( (e/2pi) (snr+2)^2 ): single-user (and, with subset-summed snr,
// multi-user) sphere-packing style upper bound. Positive for all snr >= 0.
inline double ap_single_upper(double snr) {
  if (!(snr >= 0.0)) throw std::domain_error("ap_single_upper: snr must be nonnegative");
  return 0.5 * std::log(kEOver2Pi * (snr + 2.0) * (snr + 2.0));
}

// Closed-form exponential-input lower bound 0.5 ln(1 + (e/2pi) snr^2).
inline double ap_closed_lower(double snr) {
  if (!(snr >= 0.0)) throw std::domain_error("ap_closed_lower: snr must be nonnegative");
  return 0.5 * std::log(1.0 + kEOver2Pi * snr * snr);
}

// I^E(snr): exponential input of mean snr*sigma against Gaussian noise.
inline LowerBoundPair ap_single_lower_exp(double snr, double sigma = 1.0,
                                          const QuadratureSpec& spec = {}) {
  if (!(snr >= 0.0)) throw std::domain_error("ap_single_lower_exp: snr must be nonnegative");
  LowerBoundPair out;
  out.closed_form = ap_closed_lower(snr);
  if (snr == 0.0) {
    out.numeric = {0.0, "quadrature", 0.0};
    return out;
  }
  out.numeric = mi_awgn(make_exponential(snr * sigma), sigma, spec);
  return out;
}

struct GeoLowerBound {
  MiResult numeric;
  double best_ell = 0.0;  // maximizing lattice spacing (same units as sigma)
};

// I^G(snr): best geometrically spaced discrete input, maximized over the
// lattice spacing ell by golden search on ln(ell) with a coarse pre-scan.
inline GeoLowerBound ap_single_lower_geo(double snr, double sigma = 1.0,
                                         const QuadratureSpec& spec = {}) {
  if (!(snr >= 0.0)) throw std::domain_error("ap_single_lower_geo: snr must be nonnegative");
  if (snr == 0.0) return {{0.0, "quadrature", 0.0}, 0.0};
  double mean = snr * sigma;
  auto objective = [&](double log_ell) {
    return mi_awgn(make_geometric_spaced(mean, std::exp(log_ell) * sigma), sigma, spec).value;
  };
  double lo = std::log(0.25 * sigma);
  double hi = std::log(4.0 * (snr + 2.0) * sigma);
  MaxResult best = golden_max(objective, lo, hi, 1e-2);
  return {{best.value, "quadrature", 4.0 * spec.abs_tol}, std::exp(best.x)};
}

namespace detail {

inline std::string subset_label(unsigned mask, std::size_t k) {
  std::string s = "J={";
  bool first = true;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(mask & (1u << i))) continue;
    if (!first) s += ",";
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

}  // namespace detail

// Outer H-rep: one halfspace per nonempty subset J, indicator coefficients.
inline HRegion ap_kuser_outer(const ApOperatingPoint& pt, std::size_t max_users = 6) {
  pt.validate(max_users);
  std::size_t k = pt.snr.size();
  HRegion h;
  h.dim = static_cast<int>(k);
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    Halfspace hs;
    hs.coeffs.assign(k, 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        hs.coeffs[i] = 1.0;
        s += pt.snr[i];
      }
    }
    hs.bound = ap_single_upper(s);
    h.halfspaces.push_back(std::move(hs));
    h.labels.push_back(detail::subset_label(mask, k));
  }
  return h;
}

enum class InnerHrepForm { closed_form, ie_numeric };

// Inner H-rep over all nonempty subsets: closed form, or the numeric
// exponential-input rate of the subset-summed snr (tighter).
inline HRegion ap_kuser_inner_hrep(const ApOperatingPoint& pt,
                                   InnerHrepForm form = InnerHrepForm::closed_form,
                                   const QuadratureSpec& spec = {}, std::size_t max_users = 6) {
  pt.validate(max_users);
  std::size_t k = pt.snr.size();
  HRegion h;
  h.dim = static_cast<int>(k);
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    Halfspace hs;
    hs.coeffs.assign(k, 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        hs.coeffs[i] = 1.0;
        s += pt.snr[i];
      }
    }
    hs.bound = (form == InnerHrepForm::closed_form)
                   ? ap_closed_lower(s)
                   : ap_single_lower_exp(s, pt.sigma, spec).numeric.value;
    h.halfspaces.push_back(std::move(hs));
    h.labels.push_back(detail::subset_label(mask, k));
  }
  return h;
}

// Successive-decoding corner points for one active subset: every decoding
// order of the active users gives one corner; the rate of the m-th decoded
// user k is I^E(partial sum through k) - I^E(partial sum before k), with the
// partial sums running over active users only. Singleton subsets use the
// stronger I^G single-user rate. Inactive users get rate 0.
inline CornerSet ap_kuser_inner_corners(const ApOperatingPoint& pt, std::vector<int> active,
                                        const QuadratureSpec& spec = {},
                                        std::size_t max_users = 6) {
  pt.validate(max_users);
  std::size_t k = pt.snr.size();
  std::sort(active.begin(), active.end());
  if (active.empty()) throw std::domain_error("ap_kuser_inner_corners: active set empty");
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i] < 0 || active[i] >= static_cast<int>(k))
      throw std::domain_error("ap_kuser_inner_corners: active index out of range");
    if (i > 0 && active[i] == active[i - 1])
      throw std::domain_error("ap_kuser_inner_corners: duplicate active index");
  }
  unsigned mask = 0;
  for (int i : active) mask |= (1u << i);
  std::string jlabel = detail::subset_label(mask, k);

  CornerSet cs;
  auto clamp_point = [&](std::vector<double>& pnt, const std::string& lbl) {
    for (double& c : pnt) {
      if (c < 0.0) {
        cs.warnings.push_back("corner " + lbl + " clamped at 0 (was " + std::to_string(c) + ")");
        c = 0.0;
      }
    }
  };

  if (active.size() == 1) {
    std::vector<double> pnt(k, 0.0);
    auto geo = ap_single_lower_geo(pt.snr[static_cast<std::size_t>(active[0])], pt.sigma, spec);
    pnt[static_cast<std::size_t>(active[0])] = geo.numeric.value;
    std::string lbl = jlabel + ":geo";
    clamp_point(pnt, lbl);
    cs.push(std::move(pnt), std::move(lbl), geo.numeric.est_error);
    return cs;
  }

  // Memoize I^E at the partial sums shared between decoding orders.
  std::map<double, MiResult> ie_cache;
  auto ie = [&](double s) -> MiResult {
    auto it = ie_cache.find(s);
    if (it != ie_cache.end()) return it->second;
    MiResult r = (s == 0.0) ? MiResult{0.0, "quadrature", 0.0}
                            : mi_awgn(make_exponential(s * pt.sigma), pt.sigma, spec);
    ie_cache.emplace(s, r);
    return r;
  };

  std::vector<int> perm = active;
  do {
    std::vector<double> pnt(k, 0.0);
    double cum = 0.0, prev_mi = 0.0, est = 0.0;
    std::string lbl = jlabel + ":perm(";
    for (std::size_t m = 0; m < perm.size(); ++m) {
      int u = perm[m];
      cum += pt.snr[static_cast<std::size_t>(u)];
      MiResult r = ie(cum);
      pnt[static_cast<std::size_t>(u)] = r.value - prev_mi;
      est += r.est_error;
      prev_mi = r.value;
      lbl += std::to_string(u + 1);
      if (m + 1 < perm.size()) lbl += ",";
    }
    lbl += ")";
    clamp_point(pnt, lbl);
    cs.push(std::move(pnt), std::move(lbl), est);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cs;
}

// ---------------------------------------------------------------------------
// Two-user convenience wrappers (same code paths as the K-user operations)
// ---------------------------------------------------------------------------

inline void require_two_users(const ApOperatingPoint& pt) {
  if (pt.snr.size() != 2) throw std::domain_error("expected a two-user operating point");
}

inline HRegion ap_outer_2u(const ApOperatingPoint& pt) {
  require_two_users(pt);
  return ap_kuser_outer(pt);
}

inline HRegion ap_inner_hrep_2u(const ApOperatingPoint& pt,
                                InnerHrepForm form = InnerHrepForm::closed_form,
                                const QuadratureSpec& spec = {}) {
  require_two_users(pt);
  return ap_kuser_inner_hrep(pt, form, spec);
}

// The five-corner inner region: origin, the two single-user (geometric-input)
// axis points, and the two successive-decoding corners.
inline CornerSet ap_inner_corners_2u(const ApOperatingPoint& pt, const QuadratureSpec& spec = {}) {
  require_two_users(pt);
  CornerSet cs;
  cs.push({0.0, 0.0}, "origin", 0.0);
  auto absorb = [&](CornerSet&& part) {
    for (std::size_t i = 0; i < part.points.size(); ++i)
      cs.push(std::move(part.points[i]), std::move(part.labels[i]), part.est_errors[i]);
    for (auto& w : part.warnings) cs.warnings.push_back(std::move(w));
  };
  absorb(ap_kuser_inner_corners(pt, {0}, spec));
  absorb(ap_kuser_inner_corners(pt, {0, 1}, spec));
  absorb(ap_kuser_inner_corners(pt, {1}, spec));
  // Reorder the two middle permutation corners to (decode 1 first) then
  // (decode 2 first): next_permutation already yields (1,2) before (2,1).
  return cs;
}

struct ApAsymptotic2u {
  HRegion region;      // R_i <= 0.5 ln((e/2pi) snr_i^2), sum likewise
  CornerSet corners;   // (Cdot_i, ln(1 + snr_other/snr_i)) for i = 1, 2
  // Sandwich for the second user's rate at the point where user i achieves its
  // asymptotic single-user capacity: {lower, upper} for i = 1, 2.
  std::array<std::array<double, 2>, 2> second_user_bounds{};
};

inline ApAsymptotic2u ap_asymptotic_region_2u(const ApOperatingPoint& pt) {
  require_two_users(pt);
  double s1 = pt.snr[0], s2 = pt.snr[1];
  if (!(s1 > 0.0) || !(s2 > 0.0))
    throw std::domain_error("ap_asymptotic_region_2u: snr must be positive");
  ApAsymptotic2u out;
  auto cdot = [](double s) { return 0.5 * std::log(kEOver2Pi * s * s); };
  out.region.dim = 2;
  out.region.halfspaces = {{{1.0, 0.0}, cdot(s1)}, {{0.0, 1.0}, cdot(s2)},
                           {{1.0, 1.0}, cdot(s1 + s2)}};
  out.region.labels = {"J={1}", "J={2}", "J={1,2}"};
  out.corners.push({cdot(s1), std::log(1.0 + s2 / s1)}, "user1-at-cap", 0.0);
  out.corners.push({std::log(1.0 + s1 / s2), cdot(s2)}, "user2-at-cap", 0.0);
  double sum_sq = kEOver2Pi * (s1 + s2) * (s1 + s2);
  auto lower2 = [&](double si) {
    return 0.5 * std::log((1.0 + sum_sq) / (kEOver2Pi * (si + 2.0) * (si + 2.0)));
  };
  auto upper2 = [&](double si, double stot) {
    return 0.5 * std::log(kEOver2Pi * (stot + 2.0) * (stot + 2.0) / (1.0 + kEOver2Pi * si * si));
  };
  out.second_user_bounds[0] = {lower2(s1), upper2(s1, s1 + s2)};
  out.second_user_bounds[1] = {lower2(s2), upper2(s2, s1 + s2)};
  return out;
}

// ---------------------------------------------------------------------------
// Sum-rate gap and input-type comparison
// ---------------------------------------------------------------------------

struct SumGap {
  double outer = 0.0;  // ap_single_upper(K * snr)
  MiResult inner;      // I^E(K * snr)
  double gap = 0.0;
};

// Symmetric K-user sum-rate gap between the outer bound and the exponential-
// input inner bound. Depends on (K, snr) only through the product K*snr.
inline SumGap ap_sum_gap_symmetric(int users, double snr, double sigma = 1.0,
                                   const QuadratureSpec& spec = {}) {
  if (users < 1) throw std::domain_error("ap_sum_gap_symmetric: need at least one user");
  if (!(snr >= 0.0)) throw std::domain_error("ap_sum_gap_symmetric: snr must be nonnegative");
  double total = static_cast<double>(users) * snr;
  SumGap g;
  g.outer = ap_single_upper(total);
  g.inner = ap_single_lower_exp(total, sigma, spec).numeric;
  g.gap = g.outer - g.inner.value;
  return g;
}

struct TypeCompare {
  MiResult type1;              // i.i.d.-sum achievable rate: I^E(K * snr)
  MiResult type2;              // independent per-user exponentials: Erlang sum
  double finite_gap = 0.0;     // type1 - type2 at this snr
  double asymptotic_gap = 0.0; // (K-1) psi(K) - ln(e^{K-1} (K-1)! / K)
};

// Sum-rate comparison of the two natural exponential input ensembles: a
// single exponential of total mean (type I) versus independent per-user
// exponentials whose sum is Erlang (type II). The asymptotic gap is the
// high-snr limit of type1 - type2.
inline TypeCompare ap_type_compare(int users, double snr, double sigma = 1.0,
                                   const QuadratureSpec& spec = {}) {
  if (users < 1) throw std::domain_error("ap_type_compare: need at least one user");
  if (!(snr >= 0.0)) throw std::domain_error("ap_type_compare: snr must be nonnegative");
  TypeCompare tc;
  double ku = static_cast<double>(users);
  tc.asymptotic_gap = (ku - 1.0) * digamma_int(users) -
                      ((ku - 1.0) + ln_factorial(users - 1) - std::log(ku));
  if (snr == 0.0) {
    tc.type1 = tc.type2 = {0.0, "quadrature", 0.0};
    return tc;
  }
  tc.type1 = mi_awgn(make_exponential(ku * snr * sigma), sigma, spec);
  tc.type2 = mi_awgn(make_erlang(users, snr * sigma), sigma, spec);
  tc.finite_gap = tc.type1.value - tc.type2.value;
  return tc;
}

}  // namespace oimac
