#include "nhse/cli/output.hpp"

#include <cmath>
#include <cstdio>

#include "nhse/errors.hpp"

namespace nhse::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), path_(path), columns_(header.size()) {
  if (!out_) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  for (const auto& name : header) field(name);
  end_row();
}

void CsvWriter::separator() {
  if (filled_ > 0) out_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  out_ << format_number(value);
  return *this;
}

CsvWriter& CsvWriter::field(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(const std::string& value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) {
    throw Error(ErrorKind::Mismatch, "row width differs from header in " + path_.string());
  }
  out_ << '\n';
  filled_ = 0;
  if (!out_) throw Error(ErrorKind::InvalidArgument, "write failed for " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << value.dump(2) << '\n';
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::json& config,
                   const nlohmann::json& metadata) {
  write_json(path, {{"config", config}, {"metadata", metadata}});
}

nlohmann::json json_number(double value) {
  return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

}  // namespace nhse::cli
