#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the CSV writers and readers.
namespace rotex::csv {

/// Shortest representation that round-trips to the same double.
std::string num(double v);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char sep = ',');

}  // namespace rotex::csv
