#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "percdet/commands.hpp"
#include "percdet/version.hpp"

namespace cli = percdet::cli;

int main(int argc, char** argv) {
  CLI::App app{"Percolation-based object detection in noisy images, with a Monte Carlo lab"};
  app.set_version_flag("--version", percdet::kVersion);
  app.require_subcommand(1);

  cli::DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Test a grayscale image for the presence of an object");
  detect->add_option("--input", det.input, "Image file")->required()->check(CLI::ExistingFile);
  detect->add_option("--format", det.format, "pgm or csv")->check(CLI::IsMember({"pgm", "csv"}))->capture_default_str();
  detect->add_option("--sigma", det.sigma, "Gaussian noise level (intensity units, object = 1)")->required();
  auto* theta = detect->add_option("--theta", det.theta, "Manual threshold");
  detect->add_option("--rule", det.rule, "Threshold rule")
      ->check(CLI::IsMember({"eq10", "eq11"}))
      ->excludes(theta)
      ->capture_default_str();
  detect->add_option("--phi", det.phi, "Evidence cluster size (default max((ln N)^2, ln(1/alpha)+1))");
  detect->add_option("--alpha", det.alpha, "Target false-detection probability")->capture_default_str();
  detect->add_option("--pc", det.p_c_site, "Site-percolation threshold")->capture_default_str();
  detect->add_option("--out", det.out, "Report file (JSON)");

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Empirical false-detection rate or power on synthetic images");
  simulate->add_option("--n", sim.n, "Screen side")->required();
  simulate->add_option("--sigma", sim.sigma, "Gaussian noise level")->required();
  simulate->add_option("--object", sim.object, "none or square:SIDE")->capture_default_str();
  simulate->add_option("--trials", sim.trials)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--phi", sim.phis, "Evidence sizes (repeatable or comma separated)")->delimiter(',');
  simulate->add_option("--alpha", sim.alpha, "Used for the default phi")->capture_default_str();
  simulate->add_option("--rule", sim.rule)->check(CLI::IsMember({"eq10", "eq11"}))->capture_default_str();
  simulate->add_option("--pc", sim.p_c_site)->capture_default_str();
  simulate->add_option("--out", sim.out, "Results file (JSON)");
  simulate->add_option("--table", sim.table, "Results table (TSV)");

  cli::TailCommandOptions tl;
  auto* tail = app.add_subcommand("tail", "Subcritical cluster-size tail of site percolation");
  tail->add_option("--p", tl.p, "Site-open probability")->required();
  tail->add_option("--n", tl.n, "Lattice side")->required();
  tail->add_option("--trials", tl.trials)->required();
  tail->add_option("--seed", tl.seed)->capture_default_str();
  tail->add_option("--max-size", tl.max_size, "Largest cluster size tabulated")->capture_default_str();
  tail->add_option("--fit-min", tl.fit_min)->capture_default_str();
  tail->add_option("--fit-max", tl.fit_max)->capture_default_str();
  tail->add_option("--pc", tl.p_c_site)->capture_default_str();
  tail->add_option("--out", tl.out, "Results file (JSON)");
  tail->add_option("--table", tl.table, "Results table (TSV)");

  cli::CrossingsOptions cr;
  auto* crossings = app.add_subcommand("crossings", "Supercritical left-right crossings of an n x n box");
  crossings->add_option("--p", cr.p, "Site-open probability")->required();
  crossings->add_option("--n", cr.n, "Box side")->required();
  crossings->add_option("--trials", cr.trials)->required();
  crossings->add_option("--seed", cr.seed)->capture_default_str();
  crossings->add_option("--pc", cr.p_c_site)->capture_default_str();
  crossings->add_option("--out", cr.out, "Results file (JSON)");

  cli::CalibrateOptions cal;
  auto* calibrate = app.add_subcommand("calibrate", "Smallest phi meeting a false-detection budget");
  calibrate->add_option("--n", cal.n, "Screen side")->required();
  calibrate->add_option("--sigma", cal.sigma)->required();
  calibrate->add_option("--alpha", cal.alpha)->required();
  calibrate->add_option("--trials", cal.trials)->required();
  calibrate->add_option("--seed", cal.seed)->capture_default_str();
  calibrate->add_option("--rule", cal.rule)->check(CLI::IsMember({"eq10", "eq11"}))->capture_default_str();
  calibrate->add_option("--pc", cal.p_c_site)->capture_default_str();
  calibrate->add_option("--out", cal.out, "Results file (JSON)");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest or report");
  replay->add_option("manifest", replay_path, "Manifest, report, or --out document")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitError;
  }

  try {
    if (*detect) return cli::run_detect(det, std::cout);
    if (*simulate) return cli::run_simulate(sim, std::cout);
    if (*tail) return cli::run_tail(tl, std::cout);
    if (*crossings) return cli::run_crossings(cr, std::cout);
    if (*calibrate) return cli::run_calibrate(cal, std::cout);
    if (*replay) return cli::run_replay(percdet::Json::parse(percdet::read_file(replay_path)), std::cout);
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "percdet: error: " << e.what() << '\n';
    return cli::kExitError;
  }
  return cli::kExitError;
}
