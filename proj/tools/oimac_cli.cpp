// Command-line front end: computes capacity-region bounds and capacity curves
// for the nonnegative-input additive-Gaussian-noise multiple access channel
// and writes them as CSV or JSON.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oimac/cli_core.hpp"

int main(int argc, char** argv) {
  using namespace oimac::cli;

  CLI::App app{
      "capacity-region bounds for the nonnegative-input additive-Gaussian-noise "
      "multiple access channel"};
  ScenarioConfig cfg;
  // dB lists are bound as strings (not vector<double>) so values with leading
  // minus signs, e.g. --snr-db -100,-100, are consumed as option values.
  std::string snr_list, pnr_list, grid_str;
  double tol = 0.0;

  app.add_option("scenario", cfg.scenario, "what to compute")
      ->required()
      ->check(CLI::IsMember(known_scenarios()));
  app.add_option("--snr-db", snr_list,
                 "per-user average-power SNR in dB (10*log10(E/sigma)), comma-separated");
  app.add_option("--pnr-db", pnr_list,
                 "per-user peak-power PNR in dB (10*log10(A/sigma)), comma-separated");
  app.add_option("--k", cfg.k, "user count (regions, <= 6) or sweep limit")
      ->check(CLI::PositiveNumber);
  app.add_option("--units", cfg.units, "rate units at output time (default nats)")
      ->check(CLI::IsMember({"bits", "nats"}));
  app.add_option("--grid", grid_str,
                 "sweep grid lo:hi:steps (dB for PNR sweeps; lemma5-dist reads 'lo' as the "
                 "amplitude ratio a)");
  auto* tol_opt = app.add_option(
      "--tol", tol, "dominant tolerance override (solver bracket / bisection)");
  app.add_option("--seed", cfg.seed, "RNG seed for any sampled diagnostics (default 428)");
  app.add_option("--out", cfg.out_path, "write to file instead of stdout");
  app.add_option("--format", cfg.format, "output format (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--refined-outer", cfg.refined_outer,
               "peak outer bounds from grid-solver capacity certificates");
  app.add_option("--inner-form", cfg.inner_form, "inner-bound family for region scenarios")
      ->check(CLI::IsMember({"ge", "hrep", "ie-hrep"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!snr_list.empty()) cfg.snr_db = detail::parse_double_list(snr_list, "--snr-db");
    if (!pnr_list.empty()) cfg.pnr_db = detail::parse_double_list(pnr_list, "--pnr-db");
    if (!grid_str.empty()) cfg.grid = detail::parse_grid(grid_str);
    if (tol_opt->count() > 0) {
      if (!(tol > 0.0)) throw usage_error("--tol: must be positive");
      cfg.tol = tol;
    }
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    Table table = run_scenario(cfg);
    std::string payload = cfg.format == "json" ? render_json(table) : render_csv(table);
    if (cfg.out_path.empty()) {
      std::cout << payload;
    } else {
      std::ofstream out(cfg.out_path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot open output file '" << cfg.out_path << "'\n";
        return 1;
      }
      out << payload;
      if (!out.good()) {
        std::cerr << "error: failed writing '" << cfg.out_path << "'\n";
        return 1;
      }
    }
    return 0;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
