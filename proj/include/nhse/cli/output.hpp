#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace nhse::cli {

/// 17 significant digits, so every binary64 value round-trips.
std::string format_number(double value);

/// Comma-separated table with one header row. Fields are written verbatim,
/// so callers must not pass text containing commas or newlines.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(const std::string& value);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Pretty-printed JSON file.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// Provenance sidecar: {"config": <canonical config>, "metadata": ...}.
void write_sidecar(const std::filesystem::path& path, const nlohmann::json& config,
                   const nlohmann::json& metadata);

/// JSON number, or null for NaN and infinities.
nlohmann::json json_number(double value);

}  // namespace nhse::cli
