#include "vcpcr/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcpcr/errors.hpp"

namespace vcpcr {

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw IOError("cannot format number");
  return std::string(buffer, ptr);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IOError("cannot create directory " + target.parent_path().string());
  }
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot write " + temp.string());
    out << contents;
    out.flush();
    if (!out) throw IOError("write failed for " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) throw IOError("cannot rename " + temp.string() + " to " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vcpcr
