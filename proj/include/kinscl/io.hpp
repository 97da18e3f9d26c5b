#pragma once

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinscl {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scientific notation with 17 significant digits.
std::string format_double(double v);

/// JSON text with floats through format_double; other values as nlohmann prints them.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Accumulates CSV text; numbers through format_double.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  void end_row();
  const std::string& str() const { return text_; }

 private:
  std::string text_;
  bool row_open_ = false;
};

struct ManifestEntry {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Output directory whose files are listed, with content hashes, in manifest.json.
class OutputTree {
 public:
  explicit OutputTree(std::filesystem::path root);
  void write(const std::string& relative, const std::string& content);
  /// Writes manifest.json (entries sorted by path) and returns the entries.
  std::vector<ManifestEntry> finish();
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::vector<ManifestEntry> entries_;
};

}  // namespace kinscl
