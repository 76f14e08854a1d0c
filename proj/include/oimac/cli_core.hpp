#pragma once

// Scenario engine behind the command-line tool: argument parsing, scenario
// evaluation into a generic table payload, and deterministic CSV/JSON
// rendering (12 significant digits, RFC 4180 quoting, byte-stable output).
//
// Scenarios: avg-region, peak-region, kuser-region, gap-vs-k, type-compare,
// single-user-peak, lemma5-dist, pnr-star, joint-outer. Rates are computed in
// nats and converted to bits only at serialization time.

#include <atomic>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oimac/avg_power.hpp"
#include "oimac/capacity_solver.hpp"
#include "oimac/common.hpp"
#include "oimac/mutual_information.hpp"
#include "oimac/peak_power.hpp"
#include "oimac/region.hpp"

namespace oimac::cli {

// Usage problems (unknown scenario, malformed flags): CLI exit code 2.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  long steps = 1;
};

struct ScenarioConfig {
  std::string scenario;
  std::vector<double> snr_db;  // per-user average-power SNR, dB (10 log10 E/sigma)
  std::vector<double> pnr_db;  // per-user peak-power PNR, dB (10 log10 A/sigma)
  int k = 0;                   // user count / sweep limit; 0 = scenario default
  std::string units = "nats";
  std::optional<GridSpec> grid;
  std::optional<double> tol;  // overrides the scenario's dominant tolerance
  std::uint64_t seed = 428;
  std::string out_path;
  std::string format = "csv";
  bool refined_outer = false;
  std::string inner_form = "ge";
};

// One table cell: a number (optionally a rate, converted under units=bits) or
// a text label.
struct Cell {
  bool is_text = false;
  double num = 0.0;
  bool rate = false;
  std::string text;

  static Cell rate_val(double v) { return {false, v, true, {}}; }
  static Cell plain(double v) { return {false, v, false, {}}; }
  static Cell label(std::string s) { return {true, 0.0, false, std::move(s)}; }
};

struct Table {
  std::string scenario;
  std::string units;
  std::vector<std::string> notes;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  std::optional<double> scalar;  // set: render as a bare number (pnr-star)
};

namespace detail {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline std::string fmt_num(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Deterministic parallel map: worker threads pull indices, results land by
// index, so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = std::min<std::size_t>(n, hw == 0 ? 4 : hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline double cell_value(const Cell& c, const std::string& units) {
  double v = c.num;
  if (c.rate && units == "bits") v /= kLn2;
  return v;
}

}  // namespace detail

inline std::string render_csv(const Table& t) {
  std::string out;
  if (t.scalar) return detail::fmt_num(*t.scalar) + "\n";
  for (const auto& n : t.notes) out += "# " + n + "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_quote(t.header[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i].is_text ? detail::csv_quote(row[i].text)
                            : detail::fmt_num(detail::cell_value(row[i], t.units));
    }
    out += '\n';
  }
  return out;
}

// JSON mirror of the CSV payload. Numbers are quantized to the same 12
// significant digits the CSV carries, so both formats re-parse to identical
// doubles.
inline std::string render_json(const Table& t) {
  if (t.scalar) return detail::fmt_num(*t.scalar) + "\n";
  nlohmann::ordered_json j;
  j["scenario"] = t.scenario;
  j["units"] = t.units;
  j["notes"] = t.notes;
  j["header"] = t.header;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (cell.is_text)
        jrow.push_back(cell.text);
      else
        jrow.push_back(std::stod(detail::fmt_num(detail::cell_value(cell, t.units))));
    }
    rows.push_back(std::move(jrow));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string piece = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      double v = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
      out.push_back(v);
    } catch (const std::exception&) {
      throw usage_error(flag + ": expected a comma-separated list of numbers, got '" + s + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw usage_error(flag + ": empty list");
  return out;
}

inline GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  std::size_t c1 = s.find(':');
  std::size_t c2 = (c1 == std::string::npos) ? std::string::npos : s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw usage_error("--grid: expected lo:hi:steps, got '" + s + "'");
  try {
    std::size_t used = 0;
    std::string lo = s.substr(0, c1), hi = s.substr(c1 + 1, c2 - c1 - 1), st = s.substr(c2 + 1);
    g.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    g.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    g.steps = std::stol(st, &used);
    if (used != st.size()) throw std::invalid_argument(st);
  } catch (const usage_error&) {
    throw;
  } catch (const std::exception&) {
    throw usage_error("--grid: expected lo:hi:steps, got '" + s + "'");
  }
  if (g.steps < 1) throw usage_error("--grid: steps must be >= 1");
  return g;
}

inline std::vector<double> grid_points(const GridSpec& g) {
  std::vector<double> xs;
  if (g.steps == 1) {
    xs.push_back(g.lo);
    return xs;
  }
  for (long i = 0; i < g.steps; ++i)
    xs.push_back(g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.steps - 1));
  return xs;
}

}  // namespace detail

inline const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> names = {
      "avg-region", "peak-region",      "kuser-region", "gap-vs-k", "type-compare",
      "single-user-peak", "lemma5-dist", "pnr-star",     "joint-outer"};
  return names;
}

namespace detail {

inline void region_header(Table& t, int dim) {
  for (int i = 0; i < dim; ++i) t.header.push_back("r" + std::to_string(i + 1));
  t.header.push_back("label");
  t.header.push_back("units");
}

inline void push_corner_row(Table& t, const std::vector<double>& p, const std::string& label) {
  std::vector<Cell> row;
  for (double v : p) row.push_back(Cell::rate_val(v));
  row.push_back(Cell::label(label));
  row.push_back(Cell::label(t.units));
  t.rows.push_back(std::move(row));
}

inline void hrep_header(Table& t, int dim) {
  for (int i = 0; i < dim; ++i) t.header.push_back("coeff_r" + std::to_string(i + 1));
  t.header.push_back("bound");
  t.header.push_back("label");
  t.header.push_back("units");
}

inline void push_hrep_rows(Table& t, const HRegion& h, const std::string& prefix) {
  for (std::size_t i = 0; i < h.halfspaces.size(); ++i) {
    std::vector<Cell> row;
    for (double c : h.halfspaces[i].coeffs) row.push_back(Cell::plain(c));
    row.push_back(Cell::rate_val(h.halfspaces[i].bound));
    row.push_back(Cell::label(prefix + (i < h.labels.size() ? h.labels[i] : "")));
    row.push_back(Cell::label(t.units));
    t.rows.push_back(std::move(row));
  }
  for (const auto& n : h.notes) t.notes.push_back(prefix + n);
}

inline void curve_header(Table& t) {
  t.header = {"x", "value", "lower", "upper", "method", "est_error"};
}

inline void push_curve_row(Table& t, double x, double value, double lower, double upper,
                           const std::string& method, double est, bool rates = true) {
  auto mk = [&](double v) { return rates ? Cell::rate_val(v) : Cell::plain(v); };
  t.rows.push_back(
      {Cell::plain(x), mk(value), mk(lower), mk(upper), Cell::label(method), mk(est)});
}

inline void require_flag_unused(bool used, const std::string& flag, const std::string& scen) {
  if (used) throw usage_error(flag + " is not valid for scenario '" + scen + "'");
}

// Two-user operating points from dB lists, with documented defaults.
inline std::vector<double> two_user_linear(const std::vector<double>& db,
                                           std::vector<double> default_db,
                                           const std::string& flag, Table& t, bool note_default) {
  std::vector<double> use_db = db.empty() ? default_db : db;
  if (use_db.size() != 2)
    throw usage_error(flag + ": this scenario needs exactly two comma-separated dB values");
  if (db.empty() && note_default) {
    t.notes.push_back("operating point defaulted to (" + fmt_num(default_db[0]) + ", " +
                      fmt_num(default_db[1]) + ") dB; illustrative only, not a figure point");
  }
  return {db_to_linear(use_db[0]), db_to_linear(use_db[1])};
}

}  // namespace detail

inline Table run_scenario(const ScenarioConfig& cfg) {
  Table t;
  t.scenario = cfg.scenario;
  t.units = cfg.units;
  QuadratureSpec spec;  // shared defaults: 1e-6 nats entropy tolerance
  SolverParams solver;
  if (cfg.tol) solver.tol = *cfg.tol;

  if (cfg.scenario == "avg-region") {
    detail::require_flag_unused(cfg.refined_outer, "--refined-outer", cfg.scenario);
    detail::require_flag_unused(!cfg.pnr_db.empty(), "--pnr-db", cfg.scenario);
    std::vector<double> snr = detail::two_user_linear(cfg.snr_db, {15.0, 10.0}, "--snr-db", t, true);
    ApOperatingPoint pt{snr, 1.0};
    detail::region_header(t, 2);
    VRegion outer = corners_from_hrep_2d(ap_outer_2u(pt));
    for (std::size_t i = 0; i < outer.corners.size(); ++i)
      detail::push_corner_row(t, outer.corners[i], "outer:v" + std::to_string(i));
    if (cfg.inner_form == "ge") {
      CornerSet cs = ap_inner_corners_2u(pt, spec);
      for (std::size_t i = 0; i < cs.points.size(); ++i)
        detail::push_corner_row(t, cs.points[i], "inner:" + cs.labels[i]);
      for (const auto& w : cs.warnings) t.notes.push_back(w);
    } else {
      InnerHrepForm form =
          cfg.inner_form == "hrep" ? InnerHrepForm::closed_form : InnerHrepForm::ie_numeric;
      std::string prefix = cfg.inner_form == "hrep" ? "inner-closed:v" : "inner-ie:v";
      VRegion inner = corners_from_hrep_2d(ap_inner_hrep_2u(pt, form, spec));
      for (std::size_t i = 0; i < inner.corners.size(); ++i)
        detail::push_corner_row(t, inner.corners[i], prefix + std::to_string(i));
    }
    return t;
  }

  if (cfg.scenario == "peak-region") {
    detail::require_flag_unused(!cfg.snr_db.empty(), "--snr-db", cfg.scenario);
    if (cfg.inner_form == "ie-hrep")
      throw usage_error("--inner-form ie-hrep applies to average-power scenarios only");
    std::vector<double> pnr = detail::two_user_linear(cfg.pnr_db, {10.0, 5.0}, "--pnr-db", t, false);
    PpOperatingPoint pt{pnr, 1.0};
    detail::region_header(t, 2);
    VRegion outer = corners_from_hrep_2d(pp_outer_2u(pt, cfg.refined_outer, solver));
    for (std::size_t i = 0; i < outer.corners.size(); ++i)
      detail::push_corner_row(t, outer.corners[i], "outer:v" + std::to_string(i));
    if (cfg.inner_form == "ge") {
      CornerSet cs = pp_inner_corners_2u(pt, std::nullopt, spec, solver);
      for (std::size_t i = 0; i < cs.points.size(); ++i)
        detail::push_corner_row(t, cs.points[i], "inner:" + cs.labels[i]);
      for (const auto& w : cs.warnings) t.notes.push_back(w);
    } else {
      HRegion ih = pp_inner_hrep_2u(pt);
      VRegion inner = corners_from_hrep_2d(ih);
      for (std::size_t i = 0; i < inner.corners.size(); ++i)
        detail::push_corner_row(t, inner.corners[i], "inner-closed:v" + std::to_string(i));
      for (const auto& n : ih.notes) t.notes.push_back(n);
    }
    return t;
  }

  if (cfg.scenario == "kuser-region") {
    detail::require_flag_unused(cfg.refined_outer, "--refined-outer", cfg.scenario);
    detail::require_flag_unused(!cfg.pnr_db.empty(), "--pnr-db", cfg.scenario);
    int k = cfg.k == 0 ? 3 : cfg.k;
    if (k < 2 || k > 6) throw usage_error("--k: kuser-region supports 2..6 users");
    std::vector<double> snr_db = cfg.snr_db;
    if (snr_db.empty()) {
      snr_db.assign(static_cast<std::size_t>(k), 10.0);
      t.notes.push_back("operating point defaulted to 10 dB per user; illustrative only");
    }
    if (static_cast<int>(snr_db.size()) != k)
      throw usage_error("--snr-db: need exactly --k values for kuser-region");
    std::vector<double> snr;
    for (double db : snr_db) snr.push_back(detail::db_to_linear(db));
    ApOperatingPoint pt{snr, 1.0};

    if (cfg.inner_form != "ge") {
      InnerHrepForm form =
          cfg.inner_form == "hrep" ? InnerHrepForm::closed_form : InnerHrepForm::ie_numeric;
      detail::hrep_header(t, k);
      detail::push_hrep_rows(t, ap_kuser_outer(pt), "outer:");
      detail::push_hrep_rows(t, ap_kuser_inner_hrep(pt, form, spec), "inner:");
      return t;
    }
    detail::region_header(t, k);
    detail::push_corner_row(t, std::vector<double>(static_cast<std::size_t>(k), 0.0), "origin");
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> active;
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) active.push_back(i);
      CornerSet cs = ap_kuser_inner_corners(pt, active, spec);
      for (std::size_t i = 0; i < cs.points.size(); ++i)
        detail::push_corner_row(t, cs.points[i], "inner:" + cs.labels[i]);
      for (const auto& w : cs.warnings) t.notes.push_back(w);
    }
    return t;
  }

  if (cfg.scenario == "gap-vs-k") {
    int kmax = cfg.k == 0 ? 6 : cfg.k;
    double snr_db = 10.0;
    if (!cfg.snr_db.empty()) {
      if (cfg.snr_db.size() != 1)
        throw usage_error("--snr-db: gap-vs-k takes a single per-user value");
      snr_db = cfg.snr_db[0];
    } else {
      t.notes.push_back("per-user snr defaulted to 10 dB; illustrative only");
    }
    double snr = detail::db_to_linear(snr_db);
    detail::curve_header(t);
    std::vector<SumGap> gaps(static_cast<std::size_t>(kmax));
    detail::parallel_for(gaps.size(),
                         [&](std::size_t i) {
                           gaps[i] = ap_sum_gap_symmetric(static_cast<int>(i) + 1, snr, 1.0, spec);
                         });
    for (std::size_t i = 0; i < gaps.size(); ++i)
      detail::push_curve_row(t, static_cast<double>(i + 1), gaps[i].gap, gaps[i].inner.value,
                             gaps[i].outer, gaps[i].inner.method, gaps[i].inner.est_error);
    return t;
  }

  if (cfg.scenario == "type-compare") {
    detail::curve_header(t);
    if (!cfg.snr_db.empty()) {
      int users = cfg.k == 0 ? 2 : cfg.k;
      std::vector<TypeCompare> rows(cfg.snr_db.size());
      detail::parallel_for(rows.size(), [&](std::size_t i) {
        rows[i] = ap_type_compare(users, detail::db_to_linear(cfg.snr_db[i]), 1.0, spec);
      });
      for (std::size_t i = 0; i < rows.size(); ++i)
        detail::push_curve_row(t, cfg.snr_db[i], rows[i].finite_gap, rows[i].type2.value,
                               rows[i].type1.value, "quadrature",
                               rows[i].type1.est_error + rows[i].type2.est_error);
      return t;
    }
    int kmax = cfg.k == 0 ? 128 : cfg.k;
    for (int users = 1; users <= kmax; users *= 2) {
      double g = ap_type_compare(users, 0.0).asymptotic_gap;
      detail::push_curve_row(t, static_cast<double>(users), g, g, g, "digamma-formula", 0.0);
    }
    return t;
  }

  if (cfg.scenario == "single-user-peak") {
    GridSpec grid = cfg.grid.value_or(GridSpec{0.0, 15.0, 6});
    std::vector<double> xs = detail::grid_points(grid);
    detail::curve_header(t);
    struct Row {
      CapacityEstimate cap;
      LowerBoundPair uni;
      double upper = 0.0;
    };
    std::vector<Row> rows(xs.size());
    detail::parallel_for(rows.size(), [&](std::size_t i) {
      double pnr = detail::db_to_linear(xs[i]);
      rows[i].cap = pp_capacity_estimate(pnr, 1.0, solver);
      rows[i].uni = pp_single_lower_uniform(pnr, 1.0, spec);
      rows[i].upper = pp_single_upper(pnr);
    });
    for (std::size_t i = 0; i < rows.size(); ++i)
      detail::push_curve_row(t, xs[i], rows[i].cap.value, rows[i].uni.numeric.value,
                             rows[i].upper, rows[i].cap.method, rows[i].cap.uncertainty);
    return t;
  }

  if (cfg.scenario == "lemma5-dist") {
    double a = cfg.grid ? cfg.grid->lo : 4.7;
    if (!(a > 0.0)) throw usage_error("--grid: lemma5-dist needs a positive amplitude 'lo'");
    detail::curve_header(t);
    InputDistribution in = pp_lemma5_input(a);
    for (const auto& atom : in.atoms)
      detail::push_curve_row(t, atom.x, atom.mass, atom.mass, atom.mass, "maxmass-atom", 0.0,
                             /*rates=*/false);
    double cap = pp_lemma5_capacity(a);
    MiResult achieved = mi_uniform_noise(in, 1.0, spec);
    detail::push_curve_row(t, a, cap, cap, cap, "closed-form-capacity", 0.0);
    detail::push_curve_row(t, a, achieved.value, achieved.value, achieved.value,
                           "achieved-rate:" + achieved.method, achieved.est_error);
    return t;
  }

  if (cfg.scenario == "pnr-star") {
    t.scalar = pp_pnr_star(cfg.tol.value_or(1e-6));
    return t;
  }

  if (cfg.scenario == "joint-outer") {
    detail::require_flag_unused(!cfg.snr_db.empty(), "--snr-db", cfg.scenario);
    std::vector<double> pnr = detail::two_user_linear(cfg.pnr_db, {10.0, 5.0}, "--pnr-db", t, false);
    // Joint constraint preset: average power at one fifth of the peak.
    const double ratio = 0.2;
    std::vector<double> snr = {ratio * pnr[0], ratio * pnr[1]};
    t.notes.push_back("joint constraint preset: E_i/A_i = 1/5 for both users");
    detail::hrep_header(t, 2);
    detail::push_hrep_rows(t, ap_outer_2u(ApOperatingPoint{snr, 1.0}), "avg:");
    detail::push_hrep_rows(t, pp_outer_2u(PpOperatingPoint{pnr, 1.0}, cfg.refined_outer, solver),
                           "peak:");
    return t;
  }

  throw usage_error("unknown scenario '" + cfg.scenario + "'");
}

}  // namespace oimac::cli
