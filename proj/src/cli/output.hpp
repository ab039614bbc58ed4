#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace pppks::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double v);

/// RFC 4180 quoting: fields containing a comma, quote or line break are
/// quoted with embedded quotes doubled.
std::string csv_field(const std::string& s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  /// Header plus rows, CRLF line endings.
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Counts of `values` in `bins` equal-width bins on [0, 1]; 1.0 falls in the
/// last bin.
std::vector<std::size_t> histogram_counts(std::span<const double> values, std::size_t bins);

/// Standalone SVG histogram of p-values on [0, 1].
std::string svg_histogram(std::span<const double> values, const std::string& title, std::size_t bins = 20);

std::string sha256_hex(const std::string& bytes);

/// Digest of the canonical (sorted-key, compact) dump of a resolved config.
std::string config_digest(const nlohmann::json& resolved);

std::string utc_timestamp();

/// Collects output files of one command and writes them plus the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  void write(const std::string& name, const std::string& contents);
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& path() const { return dir_; }

  /// Writes manifest.json describing every file written so far.
  void write_manifest(const std::string& command, const nlohmann::json& resolved_config,
                      const std::string& started_at, unsigned workers);

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

}  // namespace pppks::cli
