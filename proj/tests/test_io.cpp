#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "percdet/commands.hpp"
#include "percdet/image_io.hpp"
#include "percdet/random.hpp"
#include "percdet/report.hpp"

using namespace percdet;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("percdet_io_" + std::to_string(CounterStream(::getpid()).word(counter_++)))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline std::uint64_t counter_ = 0;
  fs::path path_;
};

std::string strip_timestamp(std::string s) {
  const std::string key = "\"timestamp\":";
  for (std::size_t at = s.find(key); at != std::string::npos; at = s.find(key, at + 1)) {
    const std::size_t open = s.find('"', at + key.size());
    const std::size_t close = s.find('"', open + 1);
    s.replace(open, close - open + 1, "\"\"");
  }
  return s;
}

}  // namespace

TEST(ReadImage, PlainPgmMapsToUnitInterval) {
  const GrayImage img = parse_pgm("P2 2 2 255\n0 255 255 0\n");
  EXPECT_EQ(img, GrayImage(2, 2, {0.0, 1.0, 1.0, 0.0}));
}

TEST(ReadImage, CommentsAndSixteenBit) {
  const GrayImage img = parse_pgm("P2\n# made by hand\n3 1 # width height\n65535\n0 32768 65535\n");
  EXPECT_EQ(img.width(), 3u);
  EXPECT_DOUBLE_EQ(img[1], 32768.0 / 65535.0);
  EXPECT_EQ(img[2], 1.0);
}

TEST(ReadImage, RawAndPlainEncodingsAgree) {
  const CounterStream s(4);
  for (std::uint16_t maxval : {std::uint16_t{1}, std::uint16_t{255}, std::uint16_t{1000}, std::uint16_t{65535}}) {
    std::vector<std::uint16_t> samples(7 * 5);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<std::uint16_t>(s.word(i) % (maxval + 1u));
    const GrayImage plain = parse_pgm(encode_pgm(7, 5, samples, maxval, false));
    const GrayImage raw = parse_pgm(encode_pgm(7, 5, samples, maxval, true));
    EXPECT_EQ(plain, raw) << maxval;
    for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_EQ(raw[i], samples[i] / static_cast<double>(maxval));
  }
}

TEST(ReadImage, PgmErrorsCarryOffsets) {
  EXPECT_THROW(parse_pgm("P3 2 2 255 0 0 0 0"), ParseError);
  EXPECT_THROW(parse_pgm("P2 2 2 0 0 0 0 0"), ParseError);
  EXPECT_THROW(parse_pgm("P2 2 2 70000 0 0 0 0"), ParseError);
  EXPECT_THROW(parse_pgm("P5 2 2 255\n\x01"), ParseError);
  try {
    parse_pgm("P2\n2 2\n255\n0 1\n7 x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
    EXPECT_EQ(e.byte_offset(), 17u);
  }
  try {
    parse_pgm("P2 2 1 10 3 11");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.byte_offset(), 12u);
  }
}

TEST(ReadImage, CsvVerbatim) {
  const GrayImage img = parse_csv("0.5,0.7\n0.1,0.9");
  EXPECT_EQ(img, GrayImage(2, 2, {0.5, 0.7, 0.1, 0.9}));
  EXPECT_EQ(parse_csv("-1.25,3e2\n+4, 2.5 \n"), GrayImage(2, 2, {-1.25, 300.0, 4.0, 2.5}));
}

TEST(ReadImage, CsvErrors) {
  try {
    parse_csv("1,2\n3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.byte_offset(), 4u);
  }
  try {
    parse_csv("1,2\n3,abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.byte_offset(), 6u);
  }
  EXPECT_THROW(parse_csv(""), ParseError);
  EXPECT_THROW(parse_csv("1,2\n\n3,4\n"), ParseError);
  EXPECT_THROW(parse_csv("1,nan\n"), ParseError);
  EXPECT_THROW(parse_csv("1,,2\n"), ParseError);
}

TEST(ReadImage, FromDisk) {
  TempDir dir;
  write_file(dir / "a.csv", "0.25,0.5\n");
  EXPECT_EQ(read_image(dir / "a.csv", ImageFormat::Csv), GrayImage(2, 1, {0.25, 0.5}));
  EXPECT_THROW(read_image(dir / "missing.pgm", ImageFormat::Pgm), IoError);
  EXPECT_THROW(image_format_from_string("png"), InvalidArgument);
}

TEST(Report, NoObjectDocument) {
  DetectionReport r;
  r.theta_used = 0.515437112345;
  r.phi_used = 22;
  const Json doc = Json::parse(render_report(r, RunManifest{.command = "detect"}));
  EXPECT_EQ(doc.at("decision"), "no_object");
  EXPECT_TRUE(doc.at("witness").empty());
  EXPECT_EQ(doc.at("theta").get<double>(), 0.515437112);
}

TEST(Report, RoundTripToNineDigits) {
  TempDir dir;
  DetectionReport r;
  r.detected = true;
  r.theta_used = 0.51543711234567;
  r.phi_used = 3;
  r.largest_cluster_size = 3;
  r.witness_pixels = {{4, 5}, {4, 6}, {5, 6}};
  r.p_out = 0.004980421234567;
  r.p_im = 0.99229960447912;
  r.truncated = true;
  r.elapsed_seconds = 1.23456789012e-4;
  r.pixel_count = 100;
  const RunManifest m{.command = "detect", .config_echo = Json{{"sigma", 0.2}}, .seed = 9};
  write_report(r, m, dir / "r.json");
  const ReportDocument back = read_report(dir / "r.json");
  EXPECT_EQ(back.report.detected, true);
  EXPECT_EQ(back.report.theta_used, round_sig9(r.theta_used));
  EXPECT_EQ(back.report.p_out, round_sig9(r.p_out));
  EXPECT_EQ(back.report.p_im, round_sig9(r.p_im));
  EXPECT_EQ(back.report.elapsed_seconds, round_sig9(r.elapsed_seconds));
  EXPECT_NEAR(back.report.theta_used, r.theta_used, 1e-9 * r.theta_used);
  EXPECT_EQ(back.report.witness_pixels, r.witness_pixels);
  EXPECT_EQ(back.report.phi_used, 3u);
  EXPECT_EQ(back.report.pixel_count, 100u);
  EXPECT_EQ(back.manifest.command, "detect");
  EXPECT_EQ(back.manifest.seed, 9u);
  EXPECT_EQ(back.manifest.config_echo, m.config_echo);
}

TEST(Report, WriteFailureNamesPath) {
  try {
    write_report(DetectionReport{}, RunManifest{}, "/nonexistent-dir/r.json");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/r.json"), std::string::npos);
  }
}

TEST(Commands, DetectExitCodesAndReport) {
  TempDir dir;
  write_file(dir / "black.pgm", encode_pgm(GrayImage::filled(30, 30, 1.0)));
  write_file(dir / "white.pgm", encode_pgm(GrayImage::filled(30, 30, 0.0)));
  cli::DetectOptions o;
  o.input = (dir / "black.pgm").string();
  o.sigma = 0.2;
  o.out = (dir / "r.json").string();
  std::ostringstream out;
  EXPECT_EQ(cli::run_detect(o, out), cli::kExitObjectDetected);
  const ReportDocument doc = read_report(o.out);
  EXPECT_TRUE(doc.report.detected);
  EXPECT_EQ(doc.report.phi_used, default_phi(30, 0.05));
  EXPECT_EQ(doc.manifest.command, "detect");

  o.input = (dir / "white.pgm").string();
  std::ostringstream out2;
  EXPECT_EQ(cli::run_detect(o, out2), cli::kExitNoObject);
  // First line is the manifest.
  const std::string first = out2.str().substr(0, out2.str().find('\n'));
  EXPECT_EQ(Json::parse(first).at("command"), "detect");
}

TEST(Commands, IdenticalRunsDifferOnlyInTimestamp) {
  TempDir dir;
  const GrayImage img = synthesize(centered_square(64, 64, 16), NoiseModel::gaussian(0.3), 5);
  write_file(dir / "img.csv", encode_csv(img));
  cli::DetectOptions o;
  o.input = (dir / "img.csv").string();
  o.format = "csv";
  o.sigma = 0.3;
  o.out = (dir / "a.json").string();
  std::ostringstream a, b;
  cli::run_detect(o, a);
  const std::string first = read_file(o.out);
  cli::run_detect(o, b);
  const std::string second = read_file(o.out);
  EXPECT_EQ(strip_timestamp(a.str()), strip_timestamp(b.str()));
  // Wall time is the only other field allowed to move.
  Json ja = Json::parse(first), jb = Json::parse(second);
  for (Json* j : {&ja, &jb}) {
    (*j)["timing"].erase("elapsed_seconds");
    (*j)["manifest"].erase("timestamp");
  }
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Commands, ReplayReproducesLabOutput) {
  TempDir dir;
  cli::TailCommandOptions t;
  t.p = 0.3;
  t.n = 21;
  t.trials = 200;
  t.seed = 77;
  t.max_size = 8;
  t.fit_max = 8;
  t.out = (dir / "tail.json").string();
  std::ostringstream first;
  cli::run_tail(t, first);
  std::ostringstream second;
  cli::run_replay(Json::parse(read_file(t.out)), second);
  EXPECT_EQ(strip_timestamp(first.str()), strip_timestamp(second.str()));

  cli::SimulateOptions s;
  s.n = 30;
  s.sigma = 0.4;
  s.object = "square:8";
  s.trials = 100;
  s.phis = {4, 9};
  std::ostringstream sim1;
  cli::run_simulate(s, sim1);
  const std::string manifest_line = sim1.str().substr(0, sim1.str().find('\n'));
  std::ostringstream sim2;
  cli::run_replay(Json::parse(manifest_line), sim2);
  EXPECT_EQ(strip_timestamp(sim1.str()), strip_timestamp(sim2.str()));
}

TEST(Commands, ReplayOfDetectReport) {
  TempDir dir;
  write_file(dir / "img.pgm", encode_pgm(synthesize(centered_square(40, 40, 12), NoiseModel::gaussian(0.25), 2)));
  cli::DetectOptions o;
  o.input = (dir / "img.pgm").string();
  o.sigma = 0.25;
  o.rule = "eq11";
  o.phi = 10;
  o.out = (dir / "r.json").string();
  std::ostringstream a, b;
  const int code = cli::run_detect(o, a);
  EXPECT_EQ(cli::run_replay(Json::parse(read_file(o.out)), b), code);
  EXPECT_EQ(strip_timestamp(a.str()), strip_timestamp(b.str()));
}

TEST(Commands, SimulateObjectArgument) {
  cli::SimulateOptions s;
  s.object = "square:12";
  EXPECT_EQ(s.truth_side(), 12u);
  s.object = "circle:3";
  EXPECT_THROW(s.truth_side(), InvalidArgument);
  s.object = "square:0";
  EXPECT_THROW(s.truth_side(), InvalidArgument);
}

TEST(Commands, CalibrateAndCrossingsPrintTables) {
  cli::CalibrateOptions c;
  c.n = 40;
  c.sigma = 0.3;
  c.alpha = 0.1;
  c.trials = 100;
  std::ostringstream out;
  EXPECT_EQ(cli::run_calibrate(c, out), 0);
  EXPECT_NE(out.str().find("phi\tfalse_detections"), std::string::npos);

  cli::CrossingsOptions x;
  x.n = 12;
  x.trials = 100;
  std::ostringstream out2;
  EXPECT_EQ(cli::run_crossings(x, out2), 0);
  EXPECT_NE(out2.str().find("crossing_rate"), std::string::npos);
  x.p = 0.4;
  std::ostringstream out3;
  EXPECT_THROW(cli::run_crossings(x, out3), InvalidRegime);
}
