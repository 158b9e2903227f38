#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "draf/data.hpp"
#include "draf/error.hpp"

namespace draf::data {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

enum class Role { feature, sensitive, label };

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError("line " + std::to_string(line_no) + ": malformed number '" +
                    std::string(field) + "'");
  }
  return value;
}

std::uint8_t parse_binary(std::string_view field, std::size_t line_no, const char* what) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError("line " + std::to_string(line_no) + ": non-binary " + what + " '" +
                  std::string(field) + "'");
}

}  // namespace

Dataset parse_csv(const std::string& text, std::size_t q) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line != "\r") break;
  }
  if (line.empty()) throw DataError("CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::vector<Role> roles;
  std::vector<std::string> feature_names;
  std::vector<std::string> sensitive_names;
  std::size_t label_columns = 0;
  for (auto name : split_commas(line)) {
    if (name.starts_with("x_")) {
      roles.push_back(Role::feature);
      feature_names.emplace_back(name.substr(2));
    } else if (name.starts_with("s_")) {
      roles.push_back(Role::sensitive);
      sensitive_names.emplace_back(name.substr(2));
    } else if (name == "y") {
      roles.push_back(Role::label);
      ++label_columns;
    } else {
      throw DataError("header column '" + std::string(name) +
                      "' has no role prefix (x_, s_ or y)");
    }
  }
  if (label_columns != 1) throw DataError("header must contain exactly one 'y' column");
  if (feature_names.empty()) throw DataError("header has no x_ feature columns");
  if (sensitive_names.size() != q) {
    throw DataError("header has " + std::to_string(sensitive_names.size()) +
                    " sensitive columns, expected q=" + std::to_string(q));
  }

  std::vector<double> x;
  std::vector<std::uint8_t> s;
  std::vector<std::uint8_t> y;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_commas(line);
    if (fields.size() != roles.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(roles.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < roles.size(); ++c) {
      switch (roles[c]) {
        case Role::feature: x.push_back(parse_double(fields[c], line_no)); break;
        case Role::sensitive: s.push_back(parse_binary(fields[c], line_no, "sensitive attribute")); break;
        case Role::label: y.push_back(parse_binary(fields[c], line_no, "label")); break;
      }
    }
  }
  const std::size_t d = feature_names.size();
  return Dataset(std::move(x), std::move(s), std::move(y), d, q,
                 std::move(feature_names), std::move(sensitive_names));
}

Dataset load_csv(const std::filesystem::path& path, std::size_t q) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), q);
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::size_t q = 0;
  for (auto name : split_commas(header)) {
    if (name.starts_with("s_")) ++q;
  }
  return load_csv(path, q);
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& name : ds.feature_names()) out << "x_" << name << ',';
  for (const auto& name : ds.sensitive_names()) out << "s_" << name << ',';
  out << "y\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (double v : ds.features(i)) out << v << ',';
    for (auto v : ds.sensitive(i)) out << static_cast<int>(v) << ',';
    out << static_cast<int>(ds.label(i)) << '\n';
  }
  return out.str();
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_csv(ds);
}

}  // namespace draf::data
