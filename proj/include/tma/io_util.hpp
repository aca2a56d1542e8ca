#pragma once

#include <string>
#include <vector>

namespace tma {

inline constexpr const char* kVersion = "1.0.0";

/// Shortest round-trip decimal form (17 significant digits).
std::string fmt_double(double x);

/// Writes via a temp file in the same directory, then renames over the
/// target, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a CSV written by this tool: leading "# key=value" comment lines are
/// skipped, the header row is required, every cell must parse as a double.
CsvTable read_csv(const std::string& path);

}  // namespace tma
