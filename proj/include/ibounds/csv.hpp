#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "ibounds/sample.hpp"

namespace ibounds {

// Reads a sample from CSV with header `y,z,v` (or `y,z,v1,...,vd`).
// UTF-8, '.' decimal, no thousands separators. Errors carry row/column
// diagnostics.
Sample read_sample_csv(std::istream& in, const std::string& name = "<stream>");
Sample read_sample_csv_file(const std::string& path);

// Flat key=value configuration files (also used as run manifests).
// Lines starting with '#' and blank lines are ignored.
std::map<std::string, std::string> read_config(std::istream& in,
                                               const std::string& name = "<stream>");
std::map<std::string, std::string> read_config_file(const std::string& path);
void write_config_file(const std::string& path,
                       const std::map<std::string, std::string>& kv);

}  // namespace ibounds
