#pragma once

#include <string>
#include <variant>
#include <vector>

namespace mtscore {

using CsvCell = std::variant<std::string, double, long long>;
using CsvRow = std::vector<CsvCell>;

/// Bumped when any emitted file's column or key layout changes.
inline constexpr const char* kArtifactSchemaVersion = "1";

/// One file written by an experiment run.
struct ResultArtifact {
  std::string path;
  std::string format;  // "csv" or "json"
  std::string schema_version;
};

/// One cell rendered for CSV output: floats with 17 significant digits,
/// strings quoted per RFC 4180 when they contain a comma, quote, or newline.
std::string format_csv_cell(const CsvCell& cell);

/// Write header + rows as an RFC 4180 CSV with LF line endings. Every row
/// must match the header width. The file appears atomically (temp + rename).
ResultArtifact emit_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
                        const std::string& path);

/// Atomic text-file write used for all experiment artifacts.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace mtscore
