#pragma once

// Rate-region geometry: half-space (H) and corner (V) representations, the
// pentagon corner extraction used by the two-user bounds, Pareto/dominated
// convex hulls, and containment checks with explicit slack.

#include <algorithm>
#include <string>
#include <vector>

#include "oimac/common.hpp"

namespace oimac {

struct Halfspace {
  std::vector<double> coeffs;
  double bound = 0.0;
};

struct HRegion {
  int dim = 0;
  std::vector<Halfspace> halfspaces;
  std::vector<std::string> labels;  // optional, aligned with halfspaces when used
  std::vector<std::string> notes;   // diagnostics (e.g. non-positive slanted coefficients)

  void validate() const {
    if (dim < 1) throw std::domain_error("HRegion: dim must be >= 1");
    for (const auto& h : halfspaces) {
      if (static_cast<int>(h.coeffs.size()) != dim)
        throw std::domain_error("HRegion: coefficient arity mismatch");
      if (!std::isfinite(h.bound)) throw std::domain_error("HRegion: non-finite bound");
      for (double c : h.coeffs)
        if (!std::isfinite(c)) throw std::domain_error("HRegion: non-finite coefficient");
    }
  }
};

struct VRegion {
  int dim = 0;
  std::vector<std::vector<double>> corners;
};

// Corner cloud with construction provenance; est_errors accumulate the
// quadrature tolerances of the mutual-information differences behind each
// coordinate (0 for closed forms).
struct CornerSet {
  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
  std::vector<double> est_errors;
  std::vector<std::string> warnings;

  void push(std::vector<double> p, std::string label, double est = 0.0) {
    points.push_back(std::move(p));
    labels.push_back(std::move(label));
    est_errors.push_back(est);
  }
};

namespace detail {

inline double cross(const std::vector<double>& o, const std::vector<double>& a,
                    const std::vector<double>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Sutherland-Hodgman clip of a convex polygon by c0*x + c1*y <= b.
inline std::vector<std::vector<double>> clip_halfplane(
    const std::vector<std::vector<double>>& poly, double c0, double c1, double b) {
  std::vector<std::vector<double>> out;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = poly[i];
    const auto& e = poly[(i + 1) % n];
    double fs = c0 * s[0] + c1 * s[1] - b;
    double fe = c0 * e[0] + c1 * e[1] - b;
    auto intersection = [&]() {
      double t = fs / (fs - fe);
      return std::vector<double>{s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])};
    };
    if (fe <= 0.0) {
      if (fs > 0.0) out.push_back(intersection());
      out.push_back(e);
    } else if (fs <= 0.0) {
      out.push_back(intersection());
    }
  }
  return out;
}

}  // namespace detail

// Corner list of a two-user region given as R1 <= c1, R2 <= c2 plus any number
// of slanted constraints a*R1 + b*R2 <= c. Returns the polygon corners in
// counterclockwise order starting at the origin; a slack sum constraint
// degenerates the pentagon to the rectangle.
inline VRegion corners_from_hrep_2d(const HRegion& h) {
  h.validate();
  if (h.dim != 2) throw std::domain_error("corners_from_hrep_2d: dim must be 2");
  double c1 = -1.0, c2 = -1.0;
  std::vector<const Halfspace*> slanted;
  for (const auto& hs : h.halfspaces) {
    if (hs.coeffs[0] != 0.0 && hs.coeffs[1] == 0.0)
      c1 = hs.bound / hs.coeffs[0];
    else if (hs.coeffs[0] == 0.0 && hs.coeffs[1] != 0.0)
      c2 = hs.bound / hs.coeffs[1];
    else
      slanted.push_back(&hs);
  }
  if (c1 < 0.0 || c2 < 0.0)
    throw std::domain_error("corners_from_hrep_2d: per-user box constraints missing or negative");

  std::vector<std::vector<double>> poly{{0.0, 0.0}, {c1, 0.0}, {c1, c2}, {0.0, c2}};
  for (const auto* hs : slanted) {
    poly = detail::clip_halfplane(poly, hs->coeffs[0], hs->coeffs[1], hs->bound);
    if (poly.empty()) break;
  }

  double scale = std::max({1.0, c1, c2});
  std::vector<std::vector<double>> dedup;
  for (const auto& p : poly) {
    if (!dedup.empty() && std::abs(p[0] - dedup.back()[0]) <= 1e-12 * scale &&
        std::abs(p[1] - dedup.back()[1]) <= 1e-12 * scale)
      continue;
    dedup.push_back(p);
  }
  while (dedup.size() > 1 && std::abs(dedup.front()[0] - dedup.back()[0]) <= 1e-12 * scale &&
         std::abs(dedup.front()[1] - dedup.back()[1]) <= 1e-12 * scale)
    dedup.pop_back();

  // Rotate so the lexicographically smallest vertex (the origin) comes first.
  if (!dedup.empty()) {
    auto it = std::min_element(dedup.begin(), dedup.end());
    std::rotate(dedup.begin(), it, dedup.end());
  }
  VRegion v;
  v.dim = 2;
  v.corners = std::move(dedup);
  if (v.corners.empty()) v.corners.push_back({0.0, 0.0});
  return v;
}

// Pareto frontier of the dominated convex hull of a 2-D point cloud: the
// corners whose downward closure of the convex hull equals that of the input.
// Canonical output order: first coordinate increasing. Collinear and dominated
// points (including points under a frontier segment) are removed.
inline VRegion dominated_hull_2d(const std::vector<std::vector<double>>& points) {
  for (const auto& p : points)
    if (p.size() != 2) throw std::domain_error("dominated_hull_2d: points must be 2-D");
  std::vector<std::vector<double>> pts = points;
  std::sort(pts.begin(), pts.end());
  // Pareto filter: scan by x descending, keep strictly increasing y.
  std::vector<std::vector<double>> pareto;
  double best_y = -std::numeric_limits<double>::infinity();
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    if ((*it)[1] > best_y) {
      pareto.push_back(*it);
      best_y = (*it)[1];
    }
  }
  std::reverse(pareto.begin(), pareto.end());  // x ascending, y strictly descending
  // Upper concave chain: drop vertices making a non-right turn.
  std::vector<std::vector<double>> chain;
  for (const auto& p : pareto) {
    while (chain.size() >= 2 && detail::cross(chain[chain.size() - 2], chain.back(), p) >= 0.0)
      chain.pop_back();
    chain.push_back(p);
  }
  VRegion v;
  v.dim = 2;
  v.corners = std::move(chain);
  return v;
}

// Point membership in an H-region (with nonnegativity), up to slack.
inline bool point_in_hrep(const HRegion& h, const std::vector<double>& x, double slack) {
  if (static_cast<int>(x.size()) != h.dim)
    throw std::domain_error("point_in_hrep: dimension mismatch");
  for (double xi : x)
    if (xi < -slack) return false;
  for (const auto& hs : h.halfspaces) {
    double v = 0.0;
    for (int i = 0; i < h.dim; ++i) v += hs.coeffs[i] * x[i];
    if (v > hs.bound + slack) return false;
  }
  return true;
}

struct ContainmentResult {
  bool contained = true;
  double worst_violation = 0.0;  // max positive constraint excess over all corners
};

// Checks every corner of a V-region against an H-region; reports the worst
// constraint violation (0 when fully inside even without slack).
inline ContainmentResult vrep_in_hrep(const VRegion& v, const HRegion& h, double slack) {
  ContainmentResult r;
  for (const auto& p : v.corners) {
    if (static_cast<int>(p.size()) != h.dim)
      throw std::domain_error("vrep_in_hrep: dimension mismatch");
    for (double xi : p) r.worst_violation = std::max(r.worst_violation, -xi);
    for (const auto& hs : h.halfspaces) {
      double val = 0.0;
      for (int i = 0; i < h.dim; ++i) val += hs.coeffs[i] * p[i];
      r.worst_violation = std::max(r.worst_violation, val - hs.bound);
    }
  }
  r.contained = r.worst_violation <= slack;
  return r;
}

// Membership of a point in the downward closure of a dominated hull (2-D).
inline bool point_in_vrep_2d(const VRegion& v, const std::vector<double>& p, double slack) {
  if (v.dim != 2 || p.size() != 2) throw std::domain_error("point_in_vrep_2d: need 2-D inputs");
  VRegion hull = dominated_hull_2d(v.corners);
  const auto& ch = hull.corners;
  if (ch.empty()) return false;
  double x = p[0], y = p[1];
  if (x > ch.back()[0] + slack) return false;
  if (x <= ch.front()[0]) return y <= ch.front()[1] + slack;
  for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
    if (x <= ch[i + 1][0]) {
      double t = (x - ch[i][0]) / (ch[i + 1][0] - ch[i][0]);
      double ymax = ch[i][1] + t * (ch[i + 1][1] - ch[i][1]);
      return y <= ymax + slack;
    }
  }
  return y <= ch.back()[1] + slack;
}

}  // namespace oimac
