#include "kinmac/output.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "kinmac/errors.hpp"

namespace kinmac {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void put_le_double(std::ostream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path, const nlohmann::json& header,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_for_write(path, true);
  out << "# " << header.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_for_write(path, true);
  out << doc.dump(2) << '\n';
}

void write_snapshot(const std::filesystem::path& path, nlohmann::json header, std::size_t rows,
                    std::size_t cols, std::span<const double> values, bool text) {
  if (values.size() != rows * cols) throw std::logic_error("snapshot size mismatch");
  header["rows"] = rows;
  header["cols"] = cols;
  header["encoding"] = text ? "csv" : "float64-le";
  if (text) {
    std::vector<std::string> columns;
    for (std::size_t j = 0; j < cols; ++j) columns.push_back("c" + std::to_string(j));
    std::vector<std::vector<double>> table(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      table[i].assign(values.begin() + static_cast<std::ptrdiff_t>(i * cols),
                      values.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
    }
    write_csv(path, header, columns, table);
    return;
  }
  auto out = open_for_write(path, true);
  out << header.dump() << '\n';
  for (double v : values) put_le_double(out, v);
}

nlohmann::json read_snapshot(const std::filesystem::path& path, std::vector<double>& values) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  auto header = nlohmann::json::parse(line);
  const std::size_t count = header.at("rows").get<std::size_t>() * header.at("cols").get<std::size_t>();
  values.resize(count);
  for (auto& v : values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("truncated snapshot");
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
    v = std::bit_cast<double>(bits);
  }
  return header;
}

}  // namespace kinmac
