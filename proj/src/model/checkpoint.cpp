#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "draf/error.hpp"
#include "draf/model.hpp"

namespace draf::model {

std::string to_text(const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  std::ostringstream out;
  out << ckpt.d << ',' << ckpt.q << ',' << p.model.hidden() << ',' << p.weights.size() << '\n';
  out << std::setprecision(17);
  for (double t : p.model.theta()) out << t << '\n';
  out << p.discriminator.scale << '\n' << p.discriminator.offset << '\n';
  for (double x : p.weights.v) out << x << '\n';
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("checkpoint is empty");
  std::size_t dims[4] = {};
  {
    std::istringstream header(line);
    std::string field;
    for (auto& d : dims) {
      if (!std::getline(header, field, ',')) throw DataError("checkpoint header must be d,q,h,M");
      try {
        d = std::stoul(field);
      } catch (const std::exception&) {
        throw DataError("checkpoint header field '" + field + "' is not an integer");
      }
    }
  }
  const auto [d, q, h, m] = dims;
  if (d == 0 || q == 0 || h == 0 || m == 0) throw DataError("checkpoint dimensions must be positive");

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), x);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw DataError("checkpoint value '" + line + "' is malformed");
    }
    values.push_back(x);
  }

  Checkpoint ckpt{d, q, {PredictionModel(d + q, h), Discriminator{}, WeightVector{}}};
  const std::size_t p = ckpt.params.model.parameter_count();
  if (values.size() != p + 2 + m) {
    throw DataError("checkpoint holds " + std::to_string(values.size()) + " values, expected " +
                    std::to_string(p + 2 + m));
  }
  std::copy(values.begin(), values.begin() + p, ckpt.params.model.theta().begin());
  ckpt.params.discriminator = {values[p], values[p + 1]};
  ckpt.params.weights.v.assign(values.begin() + p + 2, values.end());
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_text(ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace draf::model
