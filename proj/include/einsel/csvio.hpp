#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "einsel/state.hpp"

// Byte-stable CSV plumbing: locale-free number formatting at full double
// precision, LF-only line endings, atomic file writes, and content hashes
// for the run manifest.

namespace einsel::csv {

// 17 significant digits via to_chars: enough to round-trip any double, and
// identical bytes on every platform.
std::string format_double(double x);
std::string format_u64(std::uint64_t x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Header then rows, comma-separated, one trailing LF per line. Every row
// must match the header's width.
std::string to_csv(const Table& table);

// Writes via a sibling temp file and rename, so readers never observe a
// partial file. Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// "fnv1a64:" followed by 16 hex digits of the FNV-1a hash of the bytes.
std::string content_hash(std::string_view bytes);

// Debug fixtures: amplitudes or matrix entries as index,re,im rows
// (matrices flatten row-major).
Table state_table(const PureState& psi);
Table matrix_table(const Eigen::MatrixXcd& m);

}  // namespace einsel::csv
