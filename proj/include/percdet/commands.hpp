#ifndef PERCDET_COMMANDS_HPP
#define PERCDET_COMMANDS_HPP

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "percdet/detector.hpp"
#include "percdet/image_io.hpp"
#include "percdet/lab.hpp"
#include "percdet/report.hpp"

// Command runners behind the percdet CLI. Each prints the resolved manifest
// as one JSON line, then its results, and returns the process exit code.

namespace percdet::cli {

inline constexpr int kExitNoObject = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitObjectDetected = 2;

inline std::string fmt9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

inline void emit_manifest(std::ostream& out, const RunManifest& m) { out << to_json(m).dump() << '\n'; }

inline void maybe_write_json(const std::string& path, const RunManifest& m, const Json& results) {
  if (path.empty()) return;
  write_file(path, Json{{"manifest", to_json(m)}, {"results", results}}.dump(2) + "\n");
}

inline void maybe_write_text(const std::string& path, const std::string& text) {
  if (!path.empty()) write_file(path, text);
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
  std::string input;
  std::string format = "pgm";
  double sigma = 0.2;
  std::optional<double> theta;
  std::string rule = "eq10";
  std::optional<std::size_t> phi;
  double alpha = 0.05;
  double p_c_site = kSitePercolationThreshold;
  double grid_resolution = 1e-4;
  std::string out;

  Json echo() const {
    return Json{{"input", input},         {"format", format}, {"sigma", sigma},
                {"theta", optional_json(theta)}, {"rule", theta ? std::string("manual") : rule},
                {"phi", optional_json(phi)},     {"alpha", alpha},   {"p_c_site", p_c_site},
                {"grid_resolution", grid_resolution}, {"out", out}};
  }

  static DetectOptions from_echo(const Json& j) {
    DetectOptions o;
    o.input = j.at("input").get<std::string>();
    o.format = j.at("format").get<std::string>();
    o.sigma = j.at("sigma").get<double>();
    o.theta = optional_from<double>(j, "theta");
    o.rule = j.at("rule").get<std::string>();
    o.phi = optional_from<std::size_t>(j, "phi");
    o.alpha = j.at("alpha").get<double>();
    o.p_c_site = j.at("p_c_site").get<double>();
    o.grid_resolution = j.at("grid_resolution").get<double>();
    o.out = j.value("out", std::string());
    return o;
  }

  DetectionConfig config() const {
    DetectionConfig cfg{.model = NoiseModel::gaussian(sigma)};
    cfg.threshold.p_c_site = p_c_site;
    cfg.threshold.grid_resolution = grid_resolution;
    if (theta) {
      cfg.threshold.rule = ThresholdRule::Manual;
      cfg.threshold.manual_theta = theta;
    } else {
      cfg.threshold.rule = threshold_rule_from_string(rule);
    }
    cfg.alpha = alpha;
    cfg.phi = phi;
    cfg.phi_rule = phi ? PhiRule::ExplicitPhi : PhiRule::LogSquared;
    return cfg;
  }
};

inline int run_detect(const DetectOptions& o, std::ostream& out) {
  const RunManifest manifest{.command = "detect", .config_echo = o.echo(), .seed = 0};
  emit_manifest(out, manifest);
  const GrayImage img = read_image(o.input, image_format_from_string(o.format));
  const DetectionReport report = detect(img, o.config());
  Json summary = to_json(report);
  summary.erase("timing");
  out << summary.dump() << '\n';
  if (!o.out.empty()) write_report(report, manifest, o.out);
  return report.detected ? kExitObjectDetected : kExitNoObject;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::size_t n = 100;
  double sigma = 0.2;
  std::string object = "none";
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> phis;
  double alpha = 0.05;
  std::string rule = "eq10";
  double p_c_site = kSitePercolationThreshold;
  std::string out;
  std::string table;

  /// Side of the centered square; 0 for "none".
  std::size_t truth_side() const {
    if (object == "none") return 0;
    if (object.rfind("square:", 0) == 0) {
      try {
        const long side = std::stol(object.substr(7));
        if (side >= 1) return static_cast<std::size_t>(side);
      } catch (const std::exception&) {
      }
    }
    throw InvalidArgument("--object must be 'none' or 'square:SIDE' with SIDE >= 1");
  }

  std::vector<std::size_t> resolved_phis() const { return phis.empty() ? std::vector{default_phi(n, alpha)} : phis; }

  Json echo() const {
    return Json{{"n", n},         {"sigma", sigma},       {"object", object},     {"trials", trials},
                {"phis", resolved_phis()}, {"alpha", alpha}, {"rule", rule}, {"p_c_site", p_c_site},
                {"out", out},     {"table", table}};
  }

  static SimulateOptions from_echo(const Json& j, std::uint64_t seed) {
    SimulateOptions o;
    o.n = j.at("n").get<std::size_t>();
    o.sigma = j.at("sigma").get<double>();
    o.object = j.at("object").get<std::string>();
    o.trials = j.at("trials").get<std::size_t>();
    o.seed = seed;
    o.phis = j.at("phis").get<std::vector<std::size_t>>();
    o.alpha = j.at("alpha").get<double>();
    o.rule = j.at("rule").get<std::string>();
    o.p_c_site = j.at("p_c_site").get<double>();
    o.out = j.value("out", std::string());
    o.table = j.value("table", std::string());
    return o;
  }
};

inline int run_simulate(const SimulateOptions& o, std::ostream& out) {
  const RunManifest manifest{.command = "simulate", .config_echo = o.echo(), .seed = o.seed};
  emit_manifest(out, manifest);
  ThresholdConfig threshold;
  threshold.p_c_site = o.p_c_site;
  threshold.rule = threshold_rule_from_string(o.rule);
  if (threshold.rule == ThresholdRule::Manual) throw InvalidArgument("simulate: rule must be eq10 or eq11");
  const PowerCurve curve =
      fpr_power_curve(o.n, o.sigma, o.truth_side(), o.resolved_phis(), o.trials, o.seed, threshold);

  std::string text = "# hypothesis\t" + std::string(curve.truth_side == 0 ? "H0" : "H1") + "\n# theta\t" +
                     fmt9(curve.selection.theta) + "\n# p_out\t" + fmt9(curve.selection.p_out) + "\n# p_im\t" +
                     fmt9(curve.selection.p_im) + "\nphi\ttrials\tdetections\trate\twilson_low\twilson_high\n";
  Json rows = Json::array();
  for (const PowerRow& r : curve.rows) {
    text += std::to_string(r.phi) + "\t" + std::to_string(r.trials) + "\t" + std::to_string(r.detections) + "\t" +
            fmt9(r.rate) + "\t" + fmt9(r.wilson.low) + "\t" + fmt9(r.wilson.high) + "\n";
    rows.push_back({{"phi", r.phi},
                    {"trials", r.trials},
                    {"detections", r.detections},
                    {"rate", number9(r.rate)},
                    {"wilson_low", number9(r.wilson.low)},
                    {"wilson_high", number9(r.wilson.high)}});
  }
  out << text;
  maybe_write_text(o.table, text);
  maybe_write_json(o.out, manifest,
                   Json{{"hypothesis", curve.truth_side == 0 ? "H0" : "H1"},
                        {"theta", number9(curve.selection.theta)},
                        {"p_out", number9(curve.selection.p_out)},
                        {"p_im", number9(curve.selection.p_im)},
                        {"rows", rows}});
  return kExitNoObject;
}

// ---------------------------------------------------------------- tail

struct TailCommandOptions {
  double p = 0.3;
  std::size_t n = 101;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t max_size = 30;
  std::size_t fit_min = 1;
  std::size_t fit_max = 30;
  double p_c_site = kSitePercolationThreshold;
  std::string out;
  std::string table;

  Json echo() const {
    return Json{{"p", p},           {"n", n},             {"trials", trials},   {"max_size", max_size},
                {"fit_min", fit_min}, {"fit_max", fit_max}, {"p_c_site", p_c_site}, {"out", out},
                {"table", table}};
  }

  static TailCommandOptions from_echo(const Json& j, std::uint64_t seed) {
    TailCommandOptions o;
    o.p = j.at("p").get<double>();
    o.n = j.at("n").get<std::size_t>();
    o.trials = j.at("trials").get<std::size_t>();
    o.seed = seed;
    o.max_size = j.at("max_size").get<std::size_t>();
    o.fit_min = j.at("fit_min").get<std::size_t>();
    o.fit_max = j.at("fit_max").get<std::size_t>();
    o.p_c_site = j.at("p_c_site").get<double>();
    o.out = j.value("out", std::string());
    o.table = j.value("table", std::string());
    return o;
  }
};

inline int run_tail(const TailCommandOptions& o, std::ostream& out) {
  const RunManifest manifest{.command = "tail", .config_echo = o.echo(), .seed = o.seed};
  emit_manifest(out, manifest);
  if (o.max_size < 1) throw InvalidArgument("tail: --max-size must be >= 1");
  std::vector<std::size_t> sizes(o.max_size);
  for (std::size_t s = 0; s < o.max_size; ++s) sizes[s] = s + 1;
  TailOptions options;
  options.p_c_site = o.p_c_site;
  options.fit_min = o.fit_min;
  options.fit_max = o.fit_max;
  const TailEstimate est = estimate_cluster_tail(o.n, o.p, o.trials, sizes, o.seed, options);

  std::string text = "# fitted_rate\t" + fmt9(est.fitted_rate) + "\n# fit_slope\t" + fmt9(est.fit.slope) +
                     "\n# fit_intercept\t" + fmt9(est.fit.intercept) + "\n# fit_r_squared\t" +
                     fmt9(est.fit.r_squared) + "\n# fit_points\t" + std::to_string(est.fit.points) +
                     "\nsize\tcount\tsurvival\tstderr\tlog_survival\tscreen_count\tscreen_survival\tscreen_stderr\n";
  Json rows = Json::array();
  for (std::size_t k = 0; k < est.thresholds.size(); ++k) {
    text += std::to_string(est.thresholds[k]) + "\t" + std::to_string(est.origin_counts[k]) + "\t" +
            fmt9(est.survival[k]) + "\t" + fmt9(est.confidence[k]) + "\t" + fmt9(est.log_survival[k]) + "\t" +
            std::to_string(est.screen_counts[k]) + "\t" + fmt9(est.screen_survival[k]) + "\t" +
            fmt9(est.screen_confidence[k]) + "\n";
    rows.push_back({{"size", est.thresholds[k]},
                    {"count", est.origin_counts[k]},
                    {"survival", number9(est.survival[k])},
                    {"stderr", number9(est.confidence[k])},
                    {"log_survival", number9(est.log_survival[k])},
                    {"screen_count", est.screen_counts[k]},
                    {"screen_survival", number9(est.screen_survival[k])},
                    {"screen_stderr", number9(est.screen_confidence[k])}});
  }
  out << text;
  maybe_write_text(o.table, text);
  maybe_write_json(o.out, manifest,
                   Json{{"fitted_rate", number9(est.fitted_rate)},
                        {"fit", {{"slope", number9(est.fit.slope)},
                                 {"intercept", number9(est.fit.intercept)},
                                 {"r_squared", number9(est.fit.r_squared)},
                                 {"points", est.fit.points}}},
                        {"rows", rows}});
  return kExitNoObject;
}

// ---------------------------------------------------------------- crossings

struct CrossingsOptions {
  double p = 0.75;
  std::size_t n = 50;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double p_c_site = kSitePercolationThreshold;
  std::string out;

  Json echo() const { return Json{{"p", p}, {"n", n}, {"trials", trials}, {"p_c_site", p_c_site}, {"out", out}}; }

  static CrossingsOptions from_echo(const Json& j, std::uint64_t seed) {
    CrossingsOptions o;
    o.p = j.at("p").get<double>();
    o.n = j.at("n").get<std::size_t>();
    o.trials = j.at("trials").get<std::size_t>();
    o.seed = seed;
    o.p_c_site = j.at("p_c_site").get<double>();
    o.out = j.value("out", std::string());
    return o;
  }
};

inline int run_crossings(const CrossingsOptions& o, std::ostream& out) {
  const RunManifest manifest{.command = "crossings", .config_echo = o.echo(), .seed = o.seed};
  emit_manifest(out, manifest);
  const CrossingStats s = estimate_crossings(o.n, o.p, o.trials, o.seed, o.p_c_site);
  out << "n\tp\ttrials\tcrossing_rate\twilson_low\twilson_high\tdisjoint_mean\tdisjoint_min\tdisjoint_max\n"
      << s.n << '\t' << fmt9(s.p) << '\t' << s.trials << '\t' << fmt9(s.crossing_rate) << '\t'
      << fmt9(s.crossing_interval.low) << '\t' << fmt9(s.crossing_interval.high) << '\t'
      << fmt9(s.disjoint_count_mean) << '\t' << s.disjoint_count_min << '\t' << s.disjoint_count_max << '\n';
  maybe_write_json(o.out, manifest,
                   Json{{"crossing_rate", number9(s.crossing_rate)},
                        {"wilson_low", number9(s.crossing_interval.low)},
                        {"wilson_high", number9(s.crossing_interval.high)},
                        {"disjoint_count_mean", number9(s.disjoint_count_mean)},
                        {"disjoint_count_min", s.disjoint_count_min},
                        {"disjoint_count_max", s.disjoint_count_max}});
  return kExitNoObject;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
  std::size_t n = 100;
  double sigma = 0.2;
  double alpha = 0.05;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string rule = "eq10";
  double p_c_site = kSitePercolationThreshold;
  std::string out;

  Json echo() const {
    return Json{{"n", n},     {"sigma", sigma},       {"alpha", alpha}, {"trials", trials},
                {"rule", rule}, {"p_c_site", p_c_site}, {"out", out}};
  }

  static CalibrateOptions from_echo(const Json& j, std::uint64_t seed) {
    CalibrateOptions o;
    o.n = j.at("n").get<std::size_t>();
    o.sigma = j.at("sigma").get<double>();
    o.alpha = j.at("alpha").get<double>();
    o.trials = j.at("trials").get<std::size_t>();
    o.seed = seed;
    o.rule = j.at("rule").get<std::string>();
    o.p_c_site = j.at("p_c_site").get<double>();
    o.out = j.value("out", std::string());
    return o;
  }
};

inline int run_calibrate(const CalibrateOptions& o, std::ostream& out) {
  const RunManifest manifest{.command = "calibrate", .config_echo = o.echo(), .seed = o.seed};
  emit_manifest(out, manifest);
  ThresholdConfig threshold;
  threshold.p_c_site = o.p_c_site;
  threshold.rule = threshold_rule_from_string(o.rule);
  if (threshold.rule == ThresholdRule::Manual) throw InvalidArgument("calibrate: rule must be eq10 or eq11");
  const PhiCalibration c = calibrate_phi(o.n, o.sigma, o.alpha, o.trials, o.seed, threshold);
  out << "phi\tfalse_detections\ttrials\tfpr_upper\tfallback\n"
      << c.phi << '\t' << c.false_detections << '\t' << o.trials << '\t' << fmt9(c.fpr_upper) << '\t'
      << (c.fallback ? "true" : "false") << '\n';
  if (c.fallback) out << "# warning: no phi below n met the false-detection budget; returned phi = n\n";
  maybe_write_json(o.out, manifest,
                   Json{{"phi", c.phi},
                        {"false_detections", c.false_detections},
                        {"fpr_upper", number9(c.fpr_upper)},
                        {"fallback", c.fallback}});
  return kExitNoObject;
}

// ---------------------------------------------------------------- replay

/// Reruns the command recorded in a manifest, a report, or a lab --out document.
inline int run_replay(const Json& doc, std::ostream& out) {
  const RunManifest m = manifest_from_json(doc.contains("manifest") ? doc.at("manifest") : doc);
  const Json& c = m.config_echo;
  try {
    if (m.command == "detect") return run_detect(DetectOptions::from_echo(c), out);
    if (m.command == "simulate") return run_simulate(SimulateOptions::from_echo(c, m.seed), out);
    if (m.command == "tail") return run_tail(TailCommandOptions::from_echo(c, m.seed), out);
    if (m.command == "crossings") return run_crossings(CrossingsOptions::from_echo(c, m.seed), out);
    if (m.command == "calibrate") return run_calibrate(CalibrateOptions::from_echo(c, m.seed), out);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed config_echo: ") + e.what());
  }
  throw InvalidArgument("replay: unknown command '" + m.command + "'");
}

}  // namespace percdet::cli

#endif  // PERCDET_COMMANDS_HPP
