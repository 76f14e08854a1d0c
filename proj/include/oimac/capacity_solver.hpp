#pragma once

// Discrete-input capacity solver for the peak-limited Gaussian channel
// Y = X + N(0, sigma^2), X in [0, A]: alternating (Blahut-Arimoto style)
// maximization over input masses on a uniform amplitude grid, with the classic
// per-iteration capacity bracket
//     I(p) <= C_grid <= max_i D_i,   D_i = Integral W(y|x_i) ln(W(y|x_i)/q(y)) dy,
// evaluated on a fixed composite Gauss-Legendre output grid. The returned
// capacity is the achieved rate I(p) of the final input; bracket_width is
// max_i D_i - I(p), so [capacity, capacity + bracket_width] brackets the
// grid-restricted capacity.

#include <vector>

#include "oimac/common.hpp"
#include "oimac/distribution.hpp"
#include "oimac/numerics.hpp"

namespace oimac {

struct SolverParams {
  int grid_points = 513;      // amplitude grid size on [0, A]
  double tol = 1e-4;          // stop when max_i D_i - I(p) < tol (nats)
  long max_iterations = 400000;
  double tail_sigma = 8.0;    // output-grid extension beyond [0, A]
  double y_panel_sigma = 0.5; // output-quadrature panel width in noise units
  double prune_mass = 1e-17;  // drop grid points below this mass from updates

  void validate() const {
    if (grid_points < 64) throw std::domain_error("SolverParams: need at least 64 grid points");
    if (!(tol > 0.0)) throw std::domain_error("SolverParams: tol must be positive");
    if (max_iterations < 1) throw std::domain_error("SolverParams: max_iterations must be >= 1");
  }
};

struct SolverResult {
  double capacity = 0.0;       // achieved rate of the returned input (nats)
  double bracket_width = 0.0;  // certificate: grid capacity <= capacity + bracket_width
  std::vector<Atom> input_atoms;
  long iterations = 0;
};

inline SolverResult solve_peak_capacity(double pnr, double sigma = 1.0, SolverParams params = {}) {
  params.validate();
  if (!(sigma > 0.0)) throw std::domain_error("solve_peak_capacity: sigma must be positive");
  if (pnr < 0.0) throw std::domain_error("solve_peak_capacity: pnr must be nonnegative");
  if (pnr == 0.0) return {0.0, 0.0, {{0.0, 1.0}}, 0};

  const double a_peak = pnr * sigma;
  const int n = params.grid_points;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = a_peak * static_cast<double>(i) / (n - 1);

  // Output quadrature nodes: composite GL16 panels over [-tail, A+tail] sigmas.
  const double ylo = -params.tail_sigma * sigma;
  const double yhi = a_peak + params.tail_sigma * sigma;
  const int panels =
      std::max(4, static_cast<int>(std::ceil((yhi - ylo) / (params.y_panel_sigma * sigma))));
  std::vector<double> yk, wk;
  yk.reserve(static_cast<std::size_t>(panels) * 16);
  wk.reserve(yk.capacity());
  const double step = (yhi - ylo) / panels;
  for (int panel_idx = 0; panel_idx < panels; ++panel_idx) {
    double a = ylo + panel_idx * step, b = a + step;
    double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    for (const auto& g : detail::kGl16Half) {
      yk.push_back(mid - rad * g.x);
      wk.push_back(g.w * rad);
      yk.push_back(mid + rad * g.x);
      wk.push_back(g.w * rad);
    }
  }
  const std::size_t ny = yk.size();

  // Kernel matrix and the input-side entropy terms sum_k w_k W ln W.
  std::vector<double> w_mat(static_cast<std::size_t>(n) * ny);
  std::vector<double> neg_h(n, 0.0);
  const double log_norm = -std::log(sigma * std::sqrt(2.0 * kPi));
  for (int i = 0; i < n; ++i) {
    double* row = &w_mat[static_cast<std::size_t>(i) * ny];
    double acc = 0.0;
    for (std::size_t k = 0; k < ny; ++k) {
      double t = (yk[k] - xs[i]) / sigma;
      double lw = log_norm - 0.5 * t * t;
      double w = std::exp(lw);
      row[k] = w;
      if (w > 0.0) acc += wk[k] * w * lw;
    }
    neg_h[i] = acc;
  }

  std::vector<double> p(n, 1.0 / n);
  std::vector<char> active(n, 1);
  std::vector<double> q(ny), wlq(ny), d(n, 0.0);
  double rate = 0.0, bracket = std::numeric_limits<double>::infinity();
  long iter = 0;
  const long full_every = 64;

  auto compute_q = [&]() {
    std::fill(q.begin(), q.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      if (!active[i] || p[i] <= 0.0) continue;
      const double* row = &w_mat[static_cast<std::size_t>(i) * ny];
      double pi = p[i];
      for (std::size_t k = 0; k < ny; ++k) q[k] += pi * row[k];
    }
    for (std::size_t k = 0; k < ny; ++k)
      wlq[k] = wk[k] * std::log(std::max(q[k], 1e-300));
  };
  auto divergence = [&](int i) {
    const double* row = &w_mat[static_cast<std::size_t>(i) * ny];
    double s = 0.0;
    for (std::size_t k = 0; k < ny; ++k) s += row[k] * wlq[k];
    return neg_h[i] - s;
  };

  while (iter < params.max_iterations) {
    ++iter;
    compute_q();
    bool full = (iter % full_every == 0) || iter == 1;
    double max_d = -std::numeric_limits<double>::infinity();
    rate = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!full && !active[i]) continue;
      d[i] = divergence(i);
      if (active[i]) rate += p[i] * d[i];
      if (d[i] > max_d) max_d = d[i];
    }
    if (full) {
      bracket = max_d - rate;
      if (bracket < params.tol) break;
      // Reactivate pruned points whose divergence says they belong in support.
      for (int i = 0; i < n; ++i) {
        if (!active[i] && d[i] > rate + 0.25 * params.tol) {
          active[i] = 1;
          p[i] = 1e-12;
        }
      }
    }
    // Multiplicative update on the active set, stabilized by max_d.
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      p[i] *= std::exp(d[i] - max_d);
      z += p[i];
    }
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      p[i] /= z;
      if (p[i] < params.prune_mass) {
        active[i] = 0;
        p[i] = 0.0;
      }
    }
    // Keep the masses normalized after pruning.
    double z2 = 0.0;
    for (int i = 0; i < n; ++i) z2 += p[i];
    for (int i = 0; i < n; ++i) p[i] /= z2;
  }

  if (!(bracket < params.tol))
    throw convergence_error("solve_peak_capacity: iteration budget exhausted", rate, bracket);

  SolverResult res;
  res.capacity = rate;
  res.bracket_width = std::max(bracket, 0.0);
  res.iterations = iter;
  res.input_atoms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    if (p[i] > 0.0) res.input_atoms.push_back({xs[i], p[i]});
  return res;
}

}  // namespace oimac
