#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "nndc/dataset.hpp"

namespace nndc {

/// On-disk dataset formats.
///
///   dense-binary  "NNDC", u32 version = 1, u64 n, u64 d, then n*d
///                 little-endian float32, row-major.
///   sparse-text   first line "n d", then n lines of "index:value" pairs,
///                 0-based, strictly increasing indices. An empty line is a
///                 row with no nonzeros.
///   dense-csv     one point per line, d comma-separated values.
enum class Format { kDenseBinary, kSparseText, kDenseCsv };

Format parse_format(std::string_view name);
std::string_view format_name(Format format);

/// .bin/.nndc -> dense-binary, .csv -> dense-csv, .txt/.svm/.sparse -> sparse-text.
Format format_from_path(const std::filesystem::path& path);

/// Errors are DataError with the byte offset (binary) or line number (text).
Dataset read_dataset(std::istream& in, Format format);
Dataset read_dataset(const std::filesystem::path& path, Format format);

/// dense-binary narrows values to float32; text formats print the shortest
/// representation that round-trips the stored double.
void write_dataset(const Dataset& data, std::ostream& out, Format format);
void write_dataset(const Dataset& data, const std::filesystem::path& path, Format format);

}  // namespace nndc
