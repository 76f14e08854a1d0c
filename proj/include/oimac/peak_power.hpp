#pragma once

// Capacity and capacity-region bounds for optical intensity channels under
// per-user peak-power constraints, Y = sum_i X_i + N(0, sigma^2),
// 0 <= X_i <= A_i, pnr_i = A_i / sigma.
//
// Single user: McKellips-style and testing-against-half upper bounds, the
// uniform-input lower bound, and the exact capacity of the peak-limited
// uniform-noise channel (whose max-mass discrete input drives the two-user
// inner corners). Two users: pentagon outer region, mixed uniform+discrete
// inner corners, an EPI-based closed-form inner H-rep with one slanted
// constraint, and the asymptotic gap profile of the slanted bound.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "oimac/capacity_solver.hpp"
#include "oimac/common.hpp"
#include "oimac/distribution.hpp"
#include "oimac/mutual_information.hpp"
#include "oimac/region.hpp"

namespace oimac {

struct PpOperatingPoint {
  std::vector<double> pnr;
  double sigma = 1.0;

  void validate() const {
    if (pnr.empty()) throw std::domain_error("PpOperatingPoint: need at least one user");
    for (double p : pnr)
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::domain_error("PpOperatingPoint: pnr must be finite and nonnegative");
    if (!(sigma > 0.0)) throw std::domain_error("PpOperatingPoint: sigma must be positive");
  }
};

// min{ ln(1 + pnr/sqrt(2 pi e)), 0.5 ln(1 + pnr^2/4) }.
inline double pp_mckellips(double pnr) {
  if (!(pnr >= 0.0)) throw std::domain_error("pp_mckellips: pnr must be nonnegative");
  return std::min(std::log(1.0 + pnr / sqrt_2pi_e()), 0.5 * std::log(1.0 + 0.25 * pnr * pnr));
}

// Testing-against-half bound H2(1/2 - Q(pnr)) + (1/2 - Q(pnr)) ln(pnr/sqrt(2 pi e)),
// valid only while 1/2 - Q(pnr) >= pnr/(pnr + sqrt(2 pi e)); absent otherwise.
inline std::optional<double> pp_tkb(double pnr) {
  if (!(pnr >= 0.0)) throw std::domain_error("pp_tkb: pnr must be nonnegative");
  double p = 0.5 - q_function(pnr);
  if (p < pnr / (pnr + sqrt_2pi_e())) return std::nullopt;
  if (p <= 0.0) return 0.0;  // pnr = 0: the 0 * ln(0/...) term vanishes
  return binary_entropy(p) + p * std::log(pnr / sqrt_2pi_e());
}

// Largest pnr at which the testing-against-half bound is valid: the root of
// (1/2 - Q(p)) - p/(p + sqrt(2 pi e)) on [1, 10].
inline double pp_pnr_star(double tol = 1e-6) {
  auto g = [](double p) { return (0.5 - q_function(p)) - p / (p + sqrt_2pi_e()); };
  return bisect_root(g, 1.0, 10.0, tol);
}

// Combined single-user upper bound: min of the valid analytic bounds.
inline double pp_single_upper(double pnr) {
  if (!(pnr >= 0.0)) throw std::domain_error("pp_single_upper: pnr must be nonnegative");
  static const double star = pp_pnr_star();
  double m = pp_mckellips(pnr);
  if (pnr <= star) {
    auto t = pp_tkb(pnr);
    if (t) m = std::min(m, *t);
  }
  return m;
}

// Uniform-input lower bound: numeric I(X^U; X^U+Z) and the closed form
// 0.5 ln(1 + pnr^2/(2 pi e)).
inline LowerBoundPair pp_single_lower_uniform(double pnr, double sigma = 1.0,
                                              const QuadratureSpec& spec = {}) {
  if (!(pnr >= 0.0)) throw std::domain_error("pp_single_lower_uniform: pnr must be nonnegative");
  LowerBoundPair out;
  out.closed_form = 0.5 * std::log(1.0 + pnr * pnr / (2.0 * kPi * kE));
  out.numeric = (pnr == 0.0) ? MiResult{0.0, "quadrature", 0.0}
                             : mi_awgn(make_uniform(pnr * sigma), sigma, spec);
  return out;
}

// Exact capacity of |X| <= a with uniform noise on [-1, 1] (n = ceil(a)):
// C = ln(n+1) - (n - a) ln((n+1)/n); the maximizing input is max-mass discrete.
inline double pp_lemma5_capacity(double a) {
  if (!(a > 0.0)) throw std::domain_error("pp_lemma5_capacity: a must be positive");
  double n = std::ceil(a - 1e-12);
  n = std::max(n, 1.0);
  return std::log(n + 1.0) - (n - a) * std::log((n + 1.0) / n);
}

inline InputDistribution pp_lemma5_input(double a) {
  return make_maxmass_discrete(a, 2.0, MaxMassStyle::symmetric_pm);
}

// ---------------------------------------------------------------------------
// Capacity estimates feeding the two-user corners
// ---------------------------------------------------------------------------

struct CapacityEstimate {
  double value = 0.0;        // achievable (certified-lower) capacity estimate, nats
  double uncertainty = 0.0;  // certificate width above `value`
  std::string method;
};

// Per-user peak-limited capacity: grid solver below `solver_threshold` pnr,
// else the midpoint of the analytic sandwich (whose half-width at large pnr is
// far below any solver tolerance).
inline CapacityEstimate pp_capacity_estimate(double pnr, double sigma = 1.0,
                                             const SolverParams& params = {},
                                             double solver_threshold = 50.0) {
  if (!(pnr >= 0.0)) throw std::domain_error("pp_capacity_estimate: pnr must be nonnegative");
  if (pnr == 0.0) return {0.0, 0.0, "exact"};
  if (pnr <= solver_threshold) {
    SolverResult r = solve_peak_capacity(pnr, sigma, params);
    return {r.capacity, r.bracket_width, "ba-grid"};
  }
  double lo = 0.5 * std::log(1.0 + pnr * pnr / (2.0 * kPi * kE));
  double hi = pp_single_upper(pnr);
  return {0.5 * (lo + hi), 0.5 * (hi - lo), "sandwich-midpoint"};
}

// ---------------------------------------------------------------------------
// Two-user regions
// ---------------------------------------------------------------------------

inline void require_two_users(const PpOperatingPoint& pt) {
  if (pt.pnr.size() != 2) throw std::domain_error("expected a two-user operating point");
}

// Outer pentagon: R_i <= C(pnr_i) bounds, R_1+R_2 <= C(pnr_1+pnr_2), with the
// analytic upper bound by default; `refined` substitutes the solver-certified
// per-channel capacity estimates (certificate top), which are tighter.
inline HRegion pp_outer_2u(const PpOperatingPoint& pt, bool refined = false,
                           const SolverParams& params = {}, double solver_threshold = 50.0) {
  require_two_users(pt);
  pt.validate();
  double p1 = pt.pnr[0], p2 = pt.pnr[1];
  HRegion h;
  h.dim = 2;
  auto bound = [&](double p) {
    if (!refined) return pp_single_upper(p);
    CapacityEstimate c = pp_capacity_estimate(p, pt.sigma, params, solver_threshold);
    return c.value + c.uncertainty;
  };
  h.halfspaces = {{{1.0, 0.0}, bound(p1)}, {{0.0, 1.0}, bound(p2)}, {{1.0, 1.0}, bound(p1 + p2)}};
  h.labels = {"J={1}", "J={2}", "J={1,2}"};
  if (refined)
    h.notes.push_back("per-channel bounds use grid-solver capacity certificates");
  return h;
}

// I^{U+}(a): sum rate of X^U + X^D where X^U is uniform on [0, A_other] and
// X^D is the max-mass discrete law on [0, a * A_other] with spacing A_other.
// The sum has an exact piecewise-constant density, so the rate is computed
// from closed-form per-piece output integrals.
inline MiResult pp_mixed_sum_rate(double pnr_other, double a, double sigma = 1.0,
                                  const QuadratureSpec& spec = {}) {
  if (!(pnr_other > 0.0) || !(a > 0.0))
    throw std::domain_error("pp_mixed_sum_rate: parameters must be positive");
  double a_other = pnr_other * sigma;
  InputDistribution sum = density_convolve(
      make_uniform(a_other), make_maxmass_discrete(a, a_other, MaxMassStyle::shifted_nonneg));
  return mi_awgn(sum, sigma, spec);
}

// Five-corner inner region: origin, per-user capacity corners (solver or
// sandwich estimates unless supplied), and the two mixed uniform+discrete
// corners (I^U(p_i), I^{U+}(a_other) - I^U(p_i)).
inline CornerSet pp_inner_corners_2u(
    const PpOperatingPoint& pt,
    std::optional<std::array<CapacityEstimate, 2>> cppoic = std::nullopt,
    const QuadratureSpec& spec = {}, const SolverParams& params = {},
    double solver_threshold = 50.0) {
  require_two_users(pt);
  pt.validate();
  double p1 = pt.pnr[0], p2 = pt.pnr[1];
  if (!(p1 > 0.0) || !(p2 > 0.0))
    throw std::domain_error("pp_inner_corners_2u: both pnr must be positive");

  std::array<CapacityEstimate, 2> cap;
  if (cppoic) {
    cap = *cppoic;
  } else {
    cap[0] = pp_capacity_estimate(p1, pt.sigma, params, solver_threshold);
    cap[1] = pp_capacity_estimate(p2, pt.sigma, params, solver_threshold);
  }

  MiResult iu1 = pp_single_lower_uniform(p1, pt.sigma, spec).numeric;
  MiResult iu2 = pp_single_lower_uniform(p2, pt.sigma, spec).numeric;
  MiResult iup2 = pp_mixed_sum_rate(p1, p2 / p1, pt.sigma, spec);  // user 2 discrete
  MiResult iup1 = pp_mixed_sum_rate(p2, p1 / p2, pt.sigma, spec);  // user 1 discrete

  CornerSet cs;
  auto push_clamped = [&](std::vector<double> pnt, std::string lbl, double est) {
    for (double& c : pnt) {
      if (c < 0.0) {
        cs.warnings.push_back("corner " + lbl + " clamped at 0 (was " + std::to_string(c) + ")");
        c = 0.0;
      }
    }
    cs.push(std::move(pnt), std::move(lbl), est);
  };
  push_clamped({0.0, 0.0}, "origin", 0.0);
  push_clamped({cap[0].value, 0.0}, "J={1}:" + cap[0].method, cap[0].uncertainty);
  push_clamped({iu1.value, iup2.value - iu1.value}, "J={1,2}:u(1)+d(2)",
               iu1.est_error + iup2.est_error);
  push_clamped({iup1.value - iu2.value, iu2.value}, "J={1,2}:u(2)+d(1)",
               iu2.est_error + iup1.est_error);
  push_clamped({0.0, cap[1].value}, "J={2}:" + cap[1].method, cap[1].uncertainty);
  return cs;
}

// Closed-form inner H-rep with one slanted constraint. With n_i = ceil(a_i),
// a_i = pnr_i / pnr_other:
//   Cl_i    = 0.5 ln(1 + pnr_i^2 / (2 pi e))
//   Cl_oi   = 0.5 ln(1 + (n_i/(n_i+1))^{2(n_i - a_i)} (n_i+1)^2 pnr_other^2 / (2 pi e))
//   (Cl_1 + Cl_2 - Cl_12) R_1 + (Cl_1 + Cl_2 - Cl_21) R_2
//        <= Cl_1 Cl_21 + Cl_2 Cl_12 - Cl_12 Cl_21.
// The slanted line passes through (Cl_1, Cl_12 - Cl_1) and (Cl_21 - Cl_2, Cl_2).
inline HRegion pp_inner_hrep_2u(const PpOperatingPoint& pt) {
  require_two_users(pt);
  pt.validate();
  double p1 = pt.pnr[0], p2 = pt.pnr[1];
  if (!(p1 > 0.0) || !(p2 > 0.0))
    throw std::domain_error("pp_inner_hrep_2u: both pnr must be positive");
  const double two_pi_e = 2.0 * kPi * kE;
  auto cl_single = [&](double p) { return 0.5 * std::log(1.0 + p * p / two_pi_e); };
  auto cl_sum = [&](double p_other, double a) {
    double n = std::max(std::ceil(a - 1e-12), 1.0);
    double shrink = std::pow(n / (n + 1.0), 2.0 * (n - a));
    return 0.5 * std::log(1.0 + shrink * (n + 1.0) * (n + 1.0) * p_other * p_other / two_pi_e);
  };
  double cl1 = cl_single(p1), cl2 = cl_single(p2);
  double cl12 = cl_sum(p1, p2 / p1);  // user 2 discrete over user 1's uniform
  double cl21 = cl_sum(p2, p1 / p2);
  double alpha = cl1 + cl2 - cl12;
  double beta = cl1 + cl2 - cl21;
  double rhs = cl1 * cl21 + cl2 * cl12 - cl12 * cl21;
  HRegion h;
  h.dim = 2;
  h.halfspaces = {{{1.0, 0.0}, cl1}, {{0.0, 1.0}, cl2}, {{alpha, beta}, rhs}};
  h.labels = {"J={1}", "J={2}", "slanted"};
  if (alpha <= 0.0 || beta <= 0.0)
    h.notes.push_back("slanted constraint has a non-positive coefficient (dominant user)");
  return h;
}

struct GapProfile {
  long n = 1;
  double lambda = 0.0;
  double gap_nats = 0.0;
};

// Asymptotic gap of the slanted inner bound against the sum-capacity outer
// bound: Delta(n, lambda) = ln((1 - lambda/(n+1)) (1 + 1/n)^lambda), lambda =
// n - a in [0, 1). Nonincreasing in n; the worst case over lambda sits at
// n = 1, lambda = 2 - log2(e).
inline GapProfile pp_asymptotic_gap(long n, double lambda) {
  if (n < 1) throw std::domain_error("pp_asymptotic_gap: n must be >= 1");
  if (lambda < 0.0 || lambda >= 1.0) throw std::domain_error("pp_asymptotic_gap: lambda in [0,1)");
  double nn = static_cast<double>(n);
  double gap = std::log((1.0 - lambda / (nn + 1.0)) * std::pow(1.0 + 1.0 / nn, lambda));
  return {n, lambda, gap};
}

struct SymmetricAsymptotics {
  double c_individual = 0.0;            // ln(pnr / sqrt(2 pi e))
  double c_sum = 0.0;                   // ln(2 pnr / sqrt(2 pi e))
  double sum_minus_individual_bits = 0; // exactly 1 bit at the formula level
};

inline SymmetricAsymptotics pp_symmetric_asymptotics(double pnr) {
  if (!(pnr > 0.0)) throw std::domain_error("pp_symmetric_asymptotics: pnr must be positive");
  SymmetricAsymptotics s;
  s.c_individual = std::log(pnr / sqrt_2pi_e());
  s.c_sum = std::log(2.0 * pnr / sqrt_2pi_e());
  s.sum_minus_individual_bits = (s.c_sum - s.c_individual) / kLn2;
  return s;
}

}  // namespace oimac
