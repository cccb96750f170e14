#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace wordrep {

// Shortest-exact rendering: parsing the result recovers the same double.
std::string format_double(double value);

// Full-string strtod; throws ParseError naming line_no on junk.
double parse_double(const std::string& text, std::size_t line_no = 0);

long long parse_int(const std::string& text, std::size_t line_no = 0);

std::vector<std::string> split_whitespace(std::string_view line);

// RFC 4180 field quoting (quotes only when required).
std::string csv_field(std::string_view value);

std::ifstream open_input(const std::string& path);
std::ofstream open_output(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace wordrep
