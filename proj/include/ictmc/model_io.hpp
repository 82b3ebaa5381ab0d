#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ictmc/ergodicity.hpp"
#include "ictmc/rate_model.hpp"

namespace ictmc {

inline constexpr const char* kSchemaVersion = "1";

/// Schema or invariant violation in a model document. `path` points into the
/// document, e.g. "rate_model.lower[0][1]".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path(std::move(path)) {}

  std::string path;
};

/// Model document:
///   { "schema_version": "1", "states": [...],
///     "rate_model": { "kind": "precise",  "matrix": [[...], ...] } }
///   kind "interval": "lower" and "upper" matrices, diagonal null or 0
///   kind "rowsets":  "rows": one list of candidate rows per state
/// Rates are strings (decimal or "p/q", exact) or JSON numbers (floating).
LowerRateModel parse_model(std::string_view text);
LowerRateModel load_model(const std::filesystem::path& path);

/// Canonical document; parse_model(serialize_model(m)) == m.
std::string serialize_model(const LowerRateModel& model);

/// FNV-1a 64 over the canonical document, as 16 hex digits.
std::string model_digest(const LowerRateModel& model);

/// Graphviz digraph of the reachability graph; top-class states are drawn
/// with a double circle. Nodes and edges are in state-index order.
std::string to_dot(const LowerRateModel& model);

}  // namespace ictmc
