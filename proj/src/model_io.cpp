#include "ictmc/model_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ictmc {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError(path, message);
}

const Json& member(const Json& object, const std::string& base, const char* key) {
  const std::string path = base.empty() ? key : base + "." + key;
  auto it = object.find(key);
  if (it == object.end()) fail(path, "missing field");
  return *it;
}

void reject_unknown(const Json& object, const std::string& base,
                    std::initializer_list<const char*> known) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(base.empty() ? it.key() : base + "." + it.key(), "unknown field");
  }
}

Rate parse_rate(const Json& value, const std::string& path, bool allow_null) {
  if (value.is_null()) {
    if (allow_null) return Rate();
    fail(path, "rate must not be null");
  }
  if (value.is_string()) {
    try {
      return Rate::parse(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail(path, "rate must be finite");
    return Rate(v);
  }
  fail(path, "rate must be a string or a number");
}

std::vector<Rate> parse_row(const Json& row, const std::string& path, std::size_t n,
                            std::optional<std::size_t> null_diagonal) {
  if (!row.is_array()) fail(path, "expected an array of rates");
  if (row.size() != n) fail(path, "expected " + std::to_string(n) + " rates, found " + std::to_string(row.size()));
  std::vector<Rate> out;
  out.reserve(n);
  for (std::size_t y = 0; y < n; ++y)
    out.push_back(parse_rate(row[y], index_path(path, y), null_diagonal && *null_diagonal == y));
  return out;
}

RateMatrix parse_matrix(const Json& m, const std::string& path, std::size_t n, bool null_diagonal) {
  if (!m.is_array()) fail(path, "expected a matrix (array of rows)");
  if (m.size() != n) fail(path, "expected " + std::to_string(n) + " rows, found " + std::to_string(m.size()));
  RateMatrix out;
  for (std::size_t x = 0; x < n; ++x)
    out.push_back(parse_row(m[x], index_path(path, x), n,
                            null_diagonal ? std::optional<std::size_t>(x) : std::nullopt));
  return out;
}

// Path of the entry a ModelError points at.
std::string locate(const ModelError& e, const std::string& base) {
  std::string path = base;
  if (e.row) path = index_path(path, *e.row);
  if (e.candidate) path = index_path(path, *e.candidate);
  if (e.column) path = index_path(path, *e.column);
  return path;
}

OrderedJson rate_json(const Rate& r) {
  if (r.is_literal()) return r.text();
  return r.value();
}

OrderedJson matrix_json(const RateMatrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (const auto& row : m) {
    OrderedJson r = OrderedJson::array();
    for (const Rate& v : row) r.push_back(rate_json(v));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

LowerRateModel parse_model(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "document must be an object");
  reject_unknown(doc, "", {"schema_version", "states", "rate_model"});

  const Json& version = member(doc, "", "schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion)
    fail("schema_version", std::string("unsupported schema version, expected \"") + kSchemaVersion + "\"");

  const Json& states_json = member(doc, "", "states");
  if (!states_json.is_array() || states_json.empty()) fail("states", "expected a nonempty array of labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < states_json.size(); ++i) {
    if (!states_json[i].is_string()) fail(index_path("states", i), "state label must be a string");
    labels.push_back(states_json[i].get<std::string>());
  }
  std::optional<StateSpace> states;
  try {
    states.emplace(std::move(labels));
  } catch (const std::invalid_argument& e) {
    fail("states", e.what());
  }
  const std::size_t n = states->size();

  const Json& rm = member(doc, "", "rate_model");
  if (!rm.is_object()) fail("rate_model", "expected an object");
  const Json& kind_json = member(rm, "rate_model", "kind");
  if (!kind_json.is_string()) fail("rate_model.kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();

  std::string error_base = "rate_model";
  try {
    if (kind == "precise") {
      reject_unknown(rm, "rate_model", {"kind", "matrix"});
      error_base = "rate_model.matrix";
      RateMatrix m = parse_matrix(member(rm, "rate_model", "matrix"), error_base, n, false);
      return LowerRateModel::precise(std::move(*states), std::move(m));
    }
    if (kind == "interval") {
      reject_unknown(rm, "rate_model", {"kind", "lower", "upper"});
      RateMatrix lo = parse_matrix(member(rm, "rate_model", "lower"), "rate_model.lower", n, true);
      RateMatrix hi = parse_matrix(member(rm, "rate_model", "upper"), "rate_model.upper", n, true);
      error_base = "rate_model.lower";
      return LowerRateModel::interval(std::move(*states), std::move(lo), std::move(hi));
    }
    if (kind == "rowsets") {
      reject_unknown(rm, "rate_model", {"kind", "rows"});
      error_base = "rate_model.rows";
      const Json& rows = member(rm, "rate_model", "rows");
      if (!rows.is_array() || rows.size() != n)
        fail(error_base, "expected one list of candidate rows per state");
      RowCandidates candidates(n);
      for (std::size_t x = 0; x < n; ++x) {
        const std::string row_path = index_path(error_base, x);
        if (!rows[x].is_array() || rows[x].empty()) fail(row_path, "expected a nonempty list of candidate rows");
        for (std::size_t c = 0; c < rows[x].size(); ++c)
          candidates[x].push_back(parse_row(rows[x][c], index_path(row_path, c), n, std::nullopt));
      }
      return LowerRateModel::row_sets(std::move(*states), std::move(candidates));
    }
  } catch (const ModelError& e) {
    fail(locate(e, error_base), e.what());
  }
  fail("rate_model.kind", "unknown kind '" + kind + "' (expected precise, interval or rowsets)");
}

LowerRateModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string serialize_model(const LowerRateModel& model) {
  OrderedJson doc;
  doc["schema_version"] = kSchemaVersion;
  doc["states"] = model.states().labels();
  OrderedJson rm;
  rm["kind"] = to_string(model.kind());
  switch (model.kind()) {
    case RateModelKind::precise: rm["matrix"] = matrix_json(model.matrix()); break;
    case RateModelKind::interval:
      rm["lower"] = matrix_json(model.lower_bounds());
      rm["upper"] = matrix_json(model.upper_bounds());
      break;
    case RateModelKind::rowsets: {
      OrderedJson rows = OrderedJson::array();
      for (const auto& cands : model.candidates()) rows.push_back(matrix_json(cands));
      rm["rows"] = std::move(rows);
      break;
    }
  }
  doc["rate_model"] = std::move(rm);
  return doc.dump(2) + "\n";
}

std::string model_digest(const LowerRateModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_model(model)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_dot(const LowerRateModel& model) {
  const ReachabilityGraph g = build_graph(model);
  const StateSet top = top_class(g);
  std::ostringstream os;
  os << "digraph ictmc {\n";
  for (std::size_t x = 0; x < model.size(); ++x)
    os << "  " << dot_quote(model.states().label(x))
       << (top[x] ? " [shape=doublecircle];\n" : " [shape=circle];\n");
  for (const auto& [from, to] : g.edges())
    os << "  " << dot_quote(model.states().label(from)) << " -> "
       << dot_quote(model.states().label(to)) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace ictmc
