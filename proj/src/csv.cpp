#include "ibounds/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ibounds {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& s, const std::string& name, std::size_t row,
                    std::size_t col) {
  std::size_t pos = 0;
  double val = 0.0;
  try {
    val = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty())
    throw std::runtime_error(name + ": row " + std::to_string(row) + ", column " +
                             std::to_string(col + 1) + ": cannot parse '" + s +
                             "' as a number");
  return val;
}

}  // namespace

Sample read_sample_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(name + ": empty file");
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 3 || header[0] != "y" || header[1] != "z")
    throw std::runtime_error(name + ": header must be y,z,v (or y,z,v1,...,vd)");
  const std::size_t d = header.size() - 2;
  if (d == 1) {
    if (header[2] != "v" && header[2] != "v1")
      throw std::runtime_error(name + ": third column must be named v (or v1)");
  } else {
    for (std::size_t j = 0; j < d; ++j)
      if (header[2 + j] != "v" + std::to_string(j + 1))
        throw std::runtime_error(name + ": covariate columns must be v1,...,vd");
  }

  std::vector<double> y, z;
  std::vector<std::vector<double>> v;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error(name + ": row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    y.push_back(parse_number(fields[0], name, row, 0));
    z.push_back(parse_number(fields[1], name, row, 1));
    std::vector<double> vr(d);
    for (std::size_t j = 0; j < d; ++j)
      vr[j] = parse_number(fields[2 + j], name, row, 2 + j);
    v.push_back(std::move(vr));
  }
  if (y.empty()) throw std::runtime_error(name + ": no data rows");
  Eigen::MatrixXd vm(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      vm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j];
  return Sample(std::move(y), std::move(z), std::move(vm));
}

Sample read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_sample_csv(in, path);
}

std::map<std::string, std::string> read_config(std::istream& in, const std::string& name) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(name + ": line " + std::to_string(row) +
                               ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_config(in, path);
}

void write_config_file(const std::string& path,
                       const std::map<std::string, std::string>& kv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

}  // namespace ibounds
