#include "nndc/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "nndc/error.hpp"
#include "nndc/format.hpp"

namespace nndc {

namespace {

constexpr std::array<char, 4> kMagic{'N', 'N', 'D', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 24;

std::uint64_t load_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = bytes - 1; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

void store_le(std::ostream& out, std::uint64_t v, int bytes) {
  std::array<char, 8> buf{};
  for (int b = 0; b < bytes; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  out.write(buf.data(), bytes);
}

[[noreturn]] void fail_at_byte(std::size_t offset, const std::string& what) {
  throw DataError("dense-binary: byte " + std::to_string(offset) + ": " + what);
}

[[noreturn]] void fail_at_line(std::string_view fmt, std::size_t line, const std::string& what) {
  throw DataError(std::string(fmt) + ": line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

template <typename Int>
bool parse_uint(std::string_view s, Int& out) {
  s = trim(s);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

void append_double(std::string& line, double v) { line += format_double(v); }

Dataset read_dense_binary(std::istream& in) {
  std::array<unsigned char, kHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), kHeaderBytes);
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got < 4 || std::memcmp(header.data(), kMagic.data(), 4) != 0) {
    fail_at_byte(0, "missing magic \"NNDC\"");
  }
  if (got < kHeaderBytes) fail_at_byte(got, "truncated header");
  const auto version = static_cast<std::uint32_t>(load_le(header.data() + 4, 4));
  if (version != kVersion) fail_at_byte(4, "unsupported version " + std::to_string(version));
  const std::uint64_t n = load_le(header.data() + 8, 8);
  const std::uint64_t d = load_le(header.data() + 16, 8);
  if (n == 0) fail_at_byte(8, "n must be >= 1");
  if (d == 0) fail_at_byte(16, "d must be >= 1");
  if (d > std::numeric_limits<std::uint64_t>::max() / n / 4) fail_at_byte(8, "n*d overflows");

  const std::uint64_t count = n * d;
  std::vector<double> values;
  values.reserve(count);
  std::vector<unsigned char> chunk(4 * 65536);
  std::uint64_t done = 0;
  while (done < count) {
    const std::uint64_t want = std::min<std::uint64_t>(65536, count - done);
    in.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(want * 4));
    const auto read = static_cast<std::uint64_t>(in.gcount());
    if (read != want * 4) {
      fail_at_byte(kHeaderBytes + done * 4 + read,
                   "truncated payload: expected " + std::to_string(count * 4) + " bytes, got " +
                       std::to_string(done * 4 + read));
    }
    for (std::uint64_t t = 0; t < want; ++t) {
      const auto bits = static_cast<std::uint32_t>(load_le(chunk.data() + 4 * t, 4));
      values.push_back(static_cast<double>(std::bit_cast<float>(bits)));
    }
    done += want;
  }
  return Dataset::from_dense(n, d, std::move(values));
}

Dataset read_sparse_text(std::istream& in) {
  constexpr std::string_view fmt = "sparse-text";
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail_at_line(fmt, 1, "missing header \"n d\"");
  ++lineno;
  std::size_t n = 0, d = 0;
  {
    const std::string_view h = trim(line);
    const auto sp = h.find_first_of(" \t");
    if (sp == std::string_view::npos || !parse_uint(h.substr(0, sp), n) ||
        !parse_uint(h.substr(sp + 1), d) || n == 0 || d == 0) {
      fail_at_line(fmt, lineno, "malformed header, expected \"n d\" with n, d >= 1");
    }
  }

  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t rows = 0;
  while (rows < n && std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    long long prev = -1;
    while (!rest.empty()) {
      const auto end = rest.find_first_of(" \t");
      const std::string_view tok = rest.substr(0, end);
      rest = end == std::string_view::npos ? std::string_view{} : trim(rest.substr(end));
      const auto colon = tok.find(':');
      std::uint64_t idx = 0;
      double val = 0.0;
      if (colon == std::string_view::npos || !parse_uint(tok.substr(0, colon), idx) ||
          !parse_double(tok.substr(colon + 1), val)) {
        fail_at_line(fmt, lineno, "malformed pair \"" + std::string(tok) + "\"");
      }
      if (idx >= d) {
        fail_at_line(fmt, lineno,
                     "index " + std::to_string(idx) + " out of range for d=" + std::to_string(d));
      }
      if (static_cast<long long>(idx) <= prev) {
        fail_at_line(fmt, lineno, "indices not strictly increasing at " + std::to_string(idx));
      }
      prev = static_cast<long long>(idx);
      if (val != 0.0) {
        indices.push_back(static_cast<std::uint32_t>(idx));
        values.push_back(val);
      }
    }
    offsets.push_back(indices.size());
    ++rows;
  }
  if (rows < n) {
    fail_at_line(fmt, lineno + 1,
                 "header declares " + std::to_string(n) + " rows, found " + std::to_string(rows));
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      fail_at_line(fmt, lineno, "more rows than the " + std::to_string(n) + " declared");
    }
  }
  return Dataset::from_sparse(n, d, std::move(offsets), std::move(indices), std::move(values));
}

Dataset read_dense_csv(std::istream& in) {
  constexpr std::string_view fmt = "dense-csv";
  std::string line;
  std::size_t lineno = 0;
  std::size_t d = 0, n = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    std::size_t cols = 0;
    while (true) {
      const auto comma = rest.find(',');
      double v = 0.0;
      if (!parse_double(rest.substr(0, comma), v)) {
        fail_at_line(fmt, lineno,
                     "malformed value \"" + std::string(trim(rest.substr(0, comma))) + "\"");
      }
      values.push_back(v);
      ++cols;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (d == 0) {
      d = cols;
    } else if (cols != d) {
      fail_at_line(fmt, lineno,
                   "expected " + std::to_string(d) + " values, got " + std::to_string(cols));
    }
    ++n;
  }
  if (n == 0) fail_at_line(fmt, lineno + 1, "no data rows");
  return Dataset::from_dense(n, d, std::move(values));
}

void write_dense_binary(const Dataset& data, std::ostream& out) {
  out.write(kMagic.data(), 4);
  store_le(out, kVersion, 4);
  store_le(out, data.size(), 8);
  store_le(out, data.dim(), 8);
  const Dataset dense = data.to_dense();
  for (double v : dense.dense_values()) {
    store_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
  }
}

void write_sparse_text(const Dataset& data, std::ostream& out) {
  out << data.size() << ' ' << data.dim() << '\n';
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    const PointView p = data.point(i);
    auto emit = [&](std::size_t j, double v) {
      if (!line.empty()) line.push_back(' ');
      line += std::to_string(j);
      line.push_back(':');
      append_double(line, v);
    };
    if (p.is_sparse()) {
      for (std::size_t t = 0; t < p.indices().size(); ++t) emit(p.indices()[t], p.values()[t]);
    } else {
      for (std::size_t j = 0; j < p.dim(); ++j) {
        if (p.values()[j] != 0.0) emit(j, p.values()[j]);
      }
    }
    line.push_back('\n');
    out << line;
  }
}

void write_dense_csv(const Dataset& data, std::ostream& out) {
  const Dataset dense = data.to_dense();
  std::string line;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    line.clear();
    auto row = dense.dense_row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) line.push_back(',');
      append_double(line, row[j]);
    }
    line.push_back('\n');
    out << line;
  }
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "dense-binary") return Format::kDenseBinary;
  if (name == "sparse-text") return Format::kSparseText;
  if (name == "dense-csv") return Format::kDenseCsv;
  throw InvalidArgument("unknown format \"" + std::string(name) +
                        "\" (expected dense-binary, sparse-text or dense-csv)");
}

std::string_view format_name(Format format) {
  switch (format) {
    case Format::kDenseBinary: return "dense-binary";
    case Format::kSparseText: return "sparse-text";
    case Format::kDenseCsv: return "dense-csv";
  }
  return "unknown";
}

Format format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".bin" || ext == ".nndc") return Format::kDenseBinary;
  if (ext == ".csv") return Format::kDenseCsv;
  if (ext == ".txt" || ext == ".svm" || ext == ".sparse") return Format::kSparseText;
  throw InvalidArgument("cannot infer dataset format from \"" + path.string() +
                        "\"; pass the format explicitly");
}

Dataset read_dataset(std::istream& in, Format format) {
  switch (format) {
    case Format::kDenseBinary: return read_dense_binary(in);
    case Format::kSparseText: return read_sparse_text(in);
    case Format::kDenseCsv: return read_dense_csv(in);
  }
  throw InvalidArgument("unknown format");
}

Dataset read_dataset(const std::filesystem::path& path, Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open \"" + path.string() + "\" for reading");
  return read_dataset(in, format).with_id(path.filename().string());
}

void write_dataset(const Dataset& data, std::ostream& out, Format format) {
  switch (format) {
    case Format::kDenseBinary: write_dense_binary(data, out); break;
    case Format::kSparseText: write_sparse_text(data, out); break;
    case Format::kDenseCsv: write_dense_csv(data, out); break;
  }
  if (!out) throw DataError("write failed");
}

void write_dataset(const Dataset& data, const std::filesystem::path& path, Format format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open \"" + path.string() + "\" for writing");
  write_dataset(data, out, format);
}

}  // namespace nndc
