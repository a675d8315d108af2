#include "decdens/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <vector>

namespace decdens {

SampleData read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // blank line
    const auto last = line.find_last_not_of(" \t");
    const std::string token = line.substr(first, last - first + 1);

    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": not a number: '" + token + "'");
    if (!std::isfinite(v) || v <= 0.0)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": observations must be finite and strictly positive, got " + token);
    values.push_back(v);
  }
  if (values.empty()) throw DataError(path + ": no observations found");
  return SampleData(std::move(values));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string fnv1a_hex(const std::string& content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace decdens
