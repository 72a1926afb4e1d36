#ifndef PERCDET_REPORT_HPP
#define PERCDET_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "percdet/detector.hpp"
#include "percdet/error.hpp"
#include "percdet/image_io.hpp"
#include "percdet/version.hpp"

namespace percdet {

using Json = nlohmann::json;

/// Rounds to 9 significant digits, the precision of every float in reports.
inline double round_sig9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

/// JSON number rounded to 9 significant digits; null for non-finite values.
inline Json number9(double x) { return std::isfinite(x) ? Json(round_sig9(x)) : Json(nullptr); }

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// What was run and with which resolved settings. Feeding `config_echo` back
/// to the same command reproduces the numeric output.
struct RunManifest {
  std::string command;
  Json config_echo = Json::object();
  std::uint64_t seed = 0;
  std::string artifact_version = kVersion;
  std::string timestamp = utc_timestamp();
};

inline Json to_json(const RunManifest& m) {
  return Json{{"command", m.command},
              {"config_echo", m.config_echo},
              {"seed", m.seed},
              {"artifact_version", m.artifact_version},
              {"timestamp", m.timestamp}};
}

inline RunManifest manifest_from_json(const Json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_echo = j.at("config_echo");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.artifact_version = j.value("artifact_version", std::string(kVersion));
    m.timestamp = j.value("timestamp", std::string());
    return m;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed manifest: ") + e.what());
  }
}

inline Json to_json(const DetectionReport& r) {
  Json witness = Json::array();
  for (const Pixel& px : r.witness_pixels) witness.push_back(Json::array({px.row, px.col}));
  return Json{{"decision", r.detected ? "object_detected" : "no_object"},
              {"detected", r.detected},
              {"theta", number9(r.theta_used)},
              {"phi", r.phi_used},
              {"p_out", number9(r.p_out)},
              {"p_im", number9(r.p_im)},
              {"largest_cluster_size", r.largest_cluster_size},
              {"truncated", r.truncated},
              {"witness", std::move(witness)},
              {"timing", {{"elapsed_seconds", number9(r.elapsed_seconds)}, {"pixels", r.pixel_count}}}};
}

inline DetectionReport report_from_json(const Json& j) {
  try {
    DetectionReport r;
    r.detected = j.at("detected").get<bool>();
    r.theta_used = j.at("theta").get<double>();
    r.phi_used = j.at("phi").get<std::size_t>();
    r.p_out = j.at("p_out").get<double>();
    r.p_im = j.at("p_im").get<double>();
    r.largest_cluster_size = j.at("largest_cluster_size").get<std::size_t>();
    r.truncated = j.at("truncated").get<bool>();
    for (const Json& px : j.at("witness")) r.witness_pixels.push_back({px.at(0).get<std::size_t>(), px.at(1).get<std::size_t>()});
    r.elapsed_seconds = j.at("timing").at("elapsed_seconds").get<double>();
    r.pixel_count = j.at("timing").at("pixels").get<std::size_t>();
    return r;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed report: ") + e.what());
  }
}

/// Report document: detection fields plus the manifest, keys sorted.
inline std::string render_report(const DetectionReport& report, const RunManifest& manifest) {
  Json doc = to_json(report);
  doc["manifest"] = to_json(manifest);
  return doc.dump(2) + "\n";
}

inline void write_report(const DetectionReport& report, const RunManifest& manifest,
                         const std::filesystem::path& path) {
  write_file(path, render_report(report, manifest));
}

struct ReportDocument {
  DetectionReport report;
  RunManifest manifest;
};

inline ReportDocument read_report(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what(), 1, e.byte);
  }
  return {report_from_json(doc), manifest_from_json(doc.at("manifest"))};
}

}  // namespace percdet

#endif  // PERCDET_REPORT_HPP
