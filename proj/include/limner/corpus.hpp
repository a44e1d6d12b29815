#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "limner/document.hpp"

namespace limner {

struct CorpusEntry {
  std::string id;
  /// Relative to the corpus root unless absolute; empty = no image.
  std::string image_path;
  std::string annotation_path;
  std::optional<int> year;
};

/// Directory of annotation documents plus an index.json listing them.
struct CorpusIndex {
  std::filesystem::path root;
  std::vector<CorpusEntry> entries;

  const CorpusEntry* find(const std::string& id) const;
  std::filesystem::path resolve(const std::string& relative) const;
};

/// Problem with index.json itself or the files it references.
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kIndexFile = "index.json";
inline constexpr const char* kCorpusEnvVar = "LIMNER_CORPUS";

nlohmann::json to_json(const CorpusIndex& index);

/// Reads root/index.json. Checks ids are unique and that every annotation
/// file and every non-empty image path exists.
CorpusIndex load_corpus_index(const std::filesystem::path& root);

void write_corpus_index(const CorpusIndex& index);

struct CorpusWarning {
  std::string id;
  std::string message;
};

struct LoadedCorpus {
  CorpusIndex index;
  /// Valid documents, sorted by painting id.
  std::vector<AnnotationDocument> documents;
  /// Documents that failed to load, one entry each.
  std::vector<CorpusWarning> warnings;
};

LoadedCorpus load_corpus(const std::filesystem::path& root);

}  // namespace limner
