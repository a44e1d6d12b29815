#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "limner/types.hpp"

namespace limner {

/// Base of every load/validation failure. The three subclasses are disjoint
/// so callers (and the HTTP layer) can report which stage rejected the input.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view error_class() const noexcept = 0;
};

/// Bytes are not well-formed JSON.
class ParseError : public DocumentError {
 public:
  using DocumentError::DocumentError;
  std::string_view error_class() const noexcept override { return "parse"; }
};

/// Well-formed JSON that does not match the document schema.
class SchemaError : public DocumentError {
 public:
  using DocumentError::DocumentError;
  std::string_view error_class() const noexcept override { return "schema"; }
};

/// Schema-valid document that violates a domain invariant.
class InvariantError : public DocumentError {
 public:
  using DocumentError::DocumentError;
  std::string_view error_class() const noexcept override { return "invariant"; }
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const AnnotationDocument& doc);
nlohmann::json to_json(const EyelightPair& pair);
/// Schema check only (SchemaError); no bounds, since there is no image.
EyelightPair eyelight_pair_from_json(const nlohmann::json& j);

/// Canonical serialisation: sorted keys, two-space indent, trailing newline,
/// shortest round-trip representation for reals.
std::string serialize_document(const AnnotationDocument& doc);

/// Schema-checks and invariant-checks a parsed JSON value.
AnnotationDocument document_from_json(const nlohmann::json& j);

/// Parses and validates a byte stream. Throws exactly one of ParseError,
/// SchemaError or InvariantError on failure; never anything else.
AnnotationDocument parse_document(std::string_view bytes);

/// Throws InvariantError naming the offending element.
void validate_document(const AnnotationDocument& doc);

/// Writes the canonical JSON atomically (temp file in the same directory,
/// then rename).
void save_document(const AnnotationDocument& doc, const std::filesystem::path& path);

AnnotationDocument load_document(const std::filesystem::path& path);

/// Atomic write of arbitrary bytes; shared by the corpus writer and service.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace limner
