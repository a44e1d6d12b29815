#pragma once

#include <stdexcept>

namespace limner {

/// A document or corpus does not meet an analysis precondition (missing
/// horizon, too few figures, no qualifying faces, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace limner
