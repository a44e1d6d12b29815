#include "limner/corpus.hpp"

#include <algorithm>
#include <set>

namespace limner {

using nlohmann::json;

const CorpusEntry* CorpusIndex::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::filesystem::path CorpusIndex::resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  return p.is_absolute() ? p : root / p;
}

json to_json(const CorpusIndex& index) {
  json paintings = json::array();
  for (const auto& e : index.entries) {
    paintings.push_back(json{{"id", e.id},
                             {"image_path", e.image_path},
                             {"annotation_path", e.annotation_path},
                             {"year", e.year ? json(*e.year) : json(nullptr)}});
  }
  return json{{"version", kSchemaVersion}, {"paintings", std::move(paintings)}};
}

CorpusIndex load_corpus_index(const std::filesystem::path& root) {
  const auto index_path = root / kIndexFile;
  if (!std::filesystem::is_regular_file(index_path)) {
    throw CorpusError("no " + std::string(kIndexFile) + " in " + root.string());
  }
  json j;
  try {
    j = json::parse(read_file(index_path));
  } catch (const json::exception& e) {
    throw CorpusError(index_path.string() + ": " + e.what());
  }

  CorpusIndex index;
  index.root = root;
  try {
    if (!j.is_object() || !j.contains("paintings") || !j["paintings"].is_array()) {
      throw CorpusError(index_path.string() + ": expected an object with a 'paintings' array");
    }
    std::set<std::string> seen;
    for (const auto& p : j["paintings"]) {
      CorpusEntry e;
      e.id = p.at("id").get<std::string>();
      e.image_path = p.value("image_path", std::string());
      e.annotation_path = p.value("annotation_path", e.id + ".json");
      if (p.contains("year") && !p["year"].is_null()) e.year = p["year"].get<int>();
      if (e.id.empty()) throw CorpusError(index_path.string() + ": empty painting id");
      if (!seen.insert(e.id).second) throw CorpusError(index_path.string() + ": duplicate id " + e.id);
      index.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw CorpusError(index_path.string() + ": " + e.what());
  }

  for (const auto& e : index.entries) {
    if (!std::filesystem::is_regular_file(index.resolve(e.annotation_path))) {
      throw CorpusError(e.id + ": annotation file " + e.annotation_path + " not found");
    }
    if (!e.image_path.empty() && !std::filesystem::is_regular_file(index.resolve(e.image_path))) {
      throw CorpusError(e.id + ": image " + e.image_path + " not found");
    }
  }
  return index;
}

void write_corpus_index(const CorpusIndex& index) {
  write_file_atomic(index.root / kIndexFile, to_json(index).dump(2) + "\n");
}

LoadedCorpus load_corpus(const std::filesystem::path& root) {
  LoadedCorpus out;
  out.index = load_corpus_index(root);
  for (const auto& e : out.index.entries) {
    try {
      auto doc = load_document(out.index.resolve(e.annotation_path));
      if (doc.meta.id != e.id) {
        throw InvariantError("meta.id '" + doc.meta.id + "' does not match index id");
      }
      out.documents.push_back(std::move(doc));
    } catch (const DocumentError& err) {
      out.warnings.push_back({e.id, std::string(err.error_class()) + " error: " + err.what()});
    } catch (const IoError& err) {
      out.warnings.push_back({e.id, err.what()});
    }
  }
  std::sort(out.documents.begin(), out.documents.end(),
            [](const AnnotationDocument& a, const AnnotationDocument& b) { return a.meta.id < b.meta.id; });
  std::sort(out.warnings.begin(), out.warnings.end(),
            [](const CorpusWarning& a, const CorpusWarning& b) { return a.id < b.id; });
  return out;
}

}  // namespace limner
