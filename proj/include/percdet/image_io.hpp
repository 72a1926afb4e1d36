#ifndef PERCDET_IMAGE_IO_HPP
#define PERCDET_IMAGE_IO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "percdet/error.hpp"
#include "percdet/raster.hpp"

namespace percdet {

enum class ImageFormat { Pgm, Csv };

inline ImageFormat image_format_from_string(const std::string& s) {
  if (s == "pgm") return ImageFormat::Pgm;
  if (s == "csv") return ImageFormat::Csv;
  throw InvalidArgument("unknown image format '" + s + "' (expected pgm or csv)");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

namespace detail {

class PgmCursor {
 public:
  explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::string_view token() {
    skip_separators();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) && bytes_[pos_] != '#')
      ++pos_;
    if (start == pos_) fail("unexpected end of file");
    return bytes_.substr(start, pos_ - start);
  }

  std::uint32_t number(const char* what) {
    const std::size_t at = (skip_separators(), pos_);
    const std::string_view tok = token();
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(std::string("PGM: invalid ") + what + " '" + std::string(tok) + "'", line_, at);
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("PGM: " + what, line_, pos_); }

  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::string_view bytes_;
};

}  // namespace detail

/// PGM (P2 plain or P5 raw) with values v mapped to v / maxval.
inline GrayImage parse_pgm(std::string_view bytes) {
  detail::PgmCursor cur(bytes);
  const std::string_view magic = cur.token();
  if (magic != "P2" && magic != "P5") throw ParseError("PGM: bad magic '" + std::string(magic) + "'", 1, 0);
  const bool raw = magic == "P5";
  const std::uint32_t width = cur.number("width");
  const std::uint32_t height = cur.number("height");
  const std::size_t maxval_at = cur.pos_;
  const std::uint32_t maxval = cur.number("maxval");
  if (width == 0 || height == 0) cur.fail("width and height must be positive");
  if (maxval == 0 || maxval > 65535) throw ParseError("PGM: maxval must lie in [1, 65535]", cur.line_, maxval_at);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<double> values(count);
  const auto scale = static_cast<double>(maxval);
  if (raw) {
    if (cur.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[cur.pos_])))
      cur.fail("missing whitespace after maxval");
    ++cur.pos_;
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    if (bytes.size() - cur.pos_ < count * bytes_per)
      throw ParseError("PGM: truncated raster, need " + std::to_string(count * bytes_per) + " bytes", cur.line_,
                       bytes.size());
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + cur.pos_);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t v = bytes_per == 1 ? data[i] : (std::uint32_t{data[2 * i]} << 8) | data[2 * i + 1];
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", cur.line_, cur.pos_ + i * bytes_per);
      values[i] = static_cast<double>(v) / scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = (cur.skip_separators(), cur.pos_);
      const std::uint32_t v = cur.number("sample");
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", cur.line_, at);
      values[i] = static_cast<double>(v) / scale;
    }
  }
  return GrayImage(width, height, std::move(values));
}

/// Rows of comma-separated decimal numbers, taken verbatim.
inline GrayImage parse_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const std::size_t line_start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw ParseError("CSV: empty row", line_no, line_start);
    }
    std::size_t cells = 0;
    std::size_t cell_start = 0;
    while (true) {
      std::size_t comma = line.find(',', cell_start);
      if (comma == std::string_view::npos) comma = line.size();
      std::string_view cell = line.substr(cell_start, comma - cell_start);
      std::size_t offset = line_start + cell_start;
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
        cell.remove_prefix(1);
        ++offset;
      }
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
      double v = 0.0;
      const char* first = cell.data();
      if (!cell.empty() && cell.front() == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw ParseError("CSV: non-numeric cell '" + std::string(cell) + "'", line_no, offset);
      values.push_back(v);
      ++cells;
      if (comma == line.size()) break;
      cell_start = comma + 1;
    }
    if (height == 0) {
      width = cells;
    } else if (cells != width) {
      throw ParseError("CSV: row has " + std::to_string(cells) + " cells, expected " + std::to_string(width), line_no,
                       line_start);
    }
    ++height;
  }
  if (height == 0) throw ParseError("CSV: no data", 1, 0);
  return GrayImage(width, height, std::move(values));
}

inline GrayImage read_image(const std::filesystem::path& path, ImageFormat format) {
  const std::string bytes = read_file(path);
  return format == ImageFormat::Pgm ? parse_pgm(bytes) : parse_csv(bytes);
}

/// Netpbm encoding of raw samples (each <= maxval).
inline std::string encode_pgm(std::size_t width, std::size_t height, std::span<const std::uint16_t> samples,
                              std::uint16_t maxval, bool raw) {
  if (samples.size() != width * height) throw InvalidArgument("encode_pgm: sample count mismatch");
  if (maxval == 0) throw InvalidArgument("encode_pgm: maxval must be >= 1");
  std::string out = (raw ? "P5\n" : "P2\n") + std::to_string(width) + " " + std::to_string(height) + "\n" +
                    std::to_string(maxval) + "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::uint16_t v = samples[i];
    if (v > maxval) throw InvalidArgument("encode_pgm: sample exceeds maxval");
    if (raw) {
      if (maxval >= 256) out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    } else {
      out += std::to_string(v);
      out.push_back((i + 1) % width == 0 ? '\n' : ' ');
    }
  }
  return out;
}

/// Quantizes clamp(Y, 0, 1) to [0, maxval] and encodes it.
inline std::string encode_pgm(const GrayImage& img, std::uint16_t maxval = 255, bool raw = true) {
  std::vector<std::uint16_t> samples(img.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double y = std::min(1.0, std::max(0.0, img[i]));
    samples[i] = static_cast<std::uint16_t>(std::lround(y * maxval));
  }
  return encode_pgm(img.width(), img.height(), samples, maxval, raw);
}

inline std::string encode_csv(const GrayImage& img) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (c) out << ',';
      out << img.at(r, c);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace percdet

#endif  // PERCDET_IMAGE_IO_HPP
