#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace kinmac {

/// CSV writer with a fixed layout: one '#'-prefixed line holding the JSON
/// header (format version and resolved config), a header row, then rows of
/// numbers printed with 17 significant digits and '\n' terminators.
void write_csv(const std::filesystem::path& path, const nlohmann::json& header,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Pretty-printed JSON followed by a newline. Object keys are sorted.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Snapshot matrix of `rows` x `cols` doubles, row-major.
///
/// Binary layout: the compact JSON header, one '\n', then rows*cols IEEE-754
/// doubles in little-endian byte order. Text layout (`text` = true): CSV as
/// in write_csv with columns c0..c{cols-1}.
void write_snapshot(const std::filesystem::path& path, nlohmann::json header, std::size_t rows,
                    std::size_t cols, std::span<const double> values, bool text);

/// Reads back a binary snapshot; returns the header and fills `values`.
nlohmann::json read_snapshot(const std::filesystem::path& path, std::vector<double>& values);

std::string format_number(double x);

}  // namespace kinmac
