#pragma once
// Text I/O helpers shared by dataset, map and ensemble exporters.

#include <string>
#include <vector>

#include "etd/farfield.hpp"
#include "json.hpp"

namespace etd {

// 17 significant digits: parses back to the identical double.
std::string fmt17(double x);
double parse_double(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::vector<std::string> split_csv_line(const std::string& line);

nlohmann::json medium_to_json(const Medium& m);
Medium medium_from_json(const nlohmann::json& j);
nlohmann::json emt_to_json(const Emt& e);
Emt emt_from_json(const nlohmann::json& j);
nlohmann::json inclusion_to_json(const Inclusion& inc);
Inclusion inclusion_from_json(const nlohmann::json& j);

}  // namespace etd
