#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "limner/corpus.hpp"

// Batch analyses over a loaded corpus, rendered as CSV and JSON. The CLI and
// the HTTP service both go through analyze(), so their numbers agree.
namespace limner::report {

enum class Kind { Perspective, Shadows, Eyelights, Categories };

std::optional<Kind> kind_from_string(std::string_view s);
std::string_view to_string(Kind k);

struct AnalyzeOptions {
  double human_length_m = 1.65;
  int bin_years = 25;
  double bin_width_deg = 15.0;
  std::optional<double> focal_px;
  /// Which CSV table to emit; empty selects the kind's default.
  ///   shadows:   fits | deviations | correlation
  ///   eyelights: histogram | tilts | temporal | interocular | compare
  std::string table;
  /// External histogram for the eyelights compare table.
  std::optional<std::filesystem::path> external_csv;
};

/// Options from a JSON object (HTTP request body). Unknown keys throw
/// std::invalid_argument.
AnalyzeOptions options_from_json(const nlohmann::json& j);

struct Warning {
  std::string id;
  std::string message;
};

struct AnalysisOutput {
  nlohmann::json json;
  std::string csv;  // rows sorted by painting id, warnings appended as comments
  std::vector<Warning> warnings;
};

/// Throws AnalysisError when no painting can be analysed, or when the
/// requested table is unavailable.
AnalysisOutput analyze(Kind kind, const LoadedCorpus& corpus, const AnalyzeOptions& options);

/// Tilts and interocular delta of a single eyelight pair, for live preview.
nlohmann::json tilt_preview(const EyelightPair& pair);

/// Shortest round-trip decimal form.
std::string format_real(double v);

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

}  // namespace limner::report
