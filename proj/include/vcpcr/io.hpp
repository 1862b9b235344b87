#pragma once

#include <string>

namespace vcpcr {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Writes to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace vcpcr
