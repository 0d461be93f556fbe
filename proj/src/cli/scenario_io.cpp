#include "mobmech/cli/scenario_io.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace mobmech::cli {

namespace {

using nlohmann::json;

std::string describe_issues(const std::string& source, const std::vector<Issue>& issues) {
  std::string out = source + ": invalid scenario";
  for (const auto& issue : issues) {
    if (issue.severity != Severity::kError) continue;
    out += "\n  " + (issue.path.empty() ? std::string("/") : issue.path) + ": " + issue.message;
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t k = 0; k < end; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

class Reader {
 public:
  std::vector<Issue> issues;

  void error(const std::string& path, const std::string& message) {
    issues.push_back(Issue{Severity::kError, path, message});
  }

  std::optional<double> real(const json& value, const std::string& path) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
      const auto& text = value.get_ref<const std::string&>();
      double out = 0.0;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec == std::errc() && end == text.data() + text.size() && !text.empty()) return out;
      error(path, "not a decimal number: \"" + text + "\"");
      return std::nullopt;
    }
    error(path, "expected a number or decimal string");
    return std::nullopt;
  }

  std::optional<int> integer(const json& value, const std::string& path) {
    long long out = 0;
    if (value.is_number_integer()) {
      out = value.get<long long>();
    } else if (value.is_number_float()) {
      const double d = value.get<double>();
      if (d != std::floor(d) || std::abs(d) > 1e9) {
        error(path, "expected an integer");
        return std::nullopt;
      }
      out = static_cast<long long>(d);
    } else if (value.is_string()) {
      const auto& text = value.get_ref<const std::string&>();
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        error(path, "not an integer: \"" + text + "\"");
        return std::nullopt;
      }
    } else {
      error(path, "expected an integer");
      return std::nullopt;
    }
    if (out < std::numeric_limits<int>::min() || out > std::numeric_limits<int>::max()) {
      error(path, "integer out of range");
      return std::nullopt;
    }
    return static_cast<int>(out);
  }

  const json* array_at(const json& root, const std::string& key) {
    const auto it = root.find(key);
    if (it == root.end()) {
      error("/" + key, "missing required key");
      return nullptr;
    }
    if (!it->is_array()) {
      error("/" + key, "expected an array");
      return nullptr;
    }
    return &*it;
  }
};

ScenarioDocument read_document(const json& root, const std::string& source) {
  Reader reader;
  ScenarioDocument doc;
  MarketInstance& instance = doc.instance;

  if (!root.is_object()) {
    reader.error("", "document must be an object");
    throw ValidationError(source, reader.issues);
  }

  static const char* const kKnown[] = {"name", "tolerance", "travelers", "services",
                                       "valuation_scenarios"};
  for (const auto& item : root.items()) {
    bool known = false;
    for (const char* key : kKnown) known = known || item.key() == key;
    if (!known) doc.warnings.push_back(Issue{Severity::kWarning, "/" + item.key(), "unknown key ignored"});
  }

  if (const auto it = root.find("name"); it != root.end()) {
    if (it->is_string()) {
      instance.name = it->get<std::string>();
    } else {
      reader.error("/name", "expected a string");
    }
  }
  if (const auto it = root.find("tolerance"); it != root.end()) {
    if (auto tol = reader.real(*it, "/tolerance")) {
      if (*tol > 0.0 && std::isfinite(*tol)) {
        doc.tolerance = tol;
      } else {
        reader.error("/tolerance", "tolerance must be positive");
      }
    }
  }

  if (const json* travelers = reader.array_at(root, "travelers")) {
    instance.budgets.resize(static_cast<Eigen::Index>(travelers->size()));
    for (std::size_t i = 0; i < travelers->size(); ++i) {
      const json& t = (*travelers)[i];
      const std::string path = "/travelers/" + std::to_string(i);
      instance.budgets(static_cast<Eigen::Index>(i)) = 0.0;
      instance.service_limits.push_back(1);
      if (!t.is_object()) {
        reader.error(path, "expected an object");
        continue;
      }
      if (const auto b = t.find("budget"); b == t.end()) {
        reader.error(path + "/budget", "missing required key");
      } else if (auto value = reader.real(*b, path + "/budget")) {
        instance.budgets(static_cast<Eigen::Index>(i)) = *value;
      }
      if (const auto d = t.find("service_limit"); d != t.end()) {
        if (auto value = reader.integer(*d, path + "/service_limit")) {
          instance.service_limits.back() = *value;
        }
      }
    }
  }

  if (const json* services = reader.array_at(root, "services")) {
    for (std::size_t j = 0; j < services->size(); ++j) {
      const json& s = (*services)[j];
      const std::string path = "/services/" + std::to_string(j);
      instance.capacities.push_back(1);
      if (!s.is_object()) {
        reader.error(path, "expected an object");
        continue;
      }
      if (const auto c = s.find("capacity"); c == s.end()) {
        reader.error(path + "/capacity", "missing required key");
      } else if (auto value = reader.integer(*c, path + "/capacity")) {
        instance.capacities.back() = *value;
      }
    }
  }

  if (const json* scenarios = reader.array_at(root, "valuation_scenarios")) {
    for (std::size_t s = 0; s < scenarios->size(); ++s) {
      const json& rows = (*scenarios)[s];
      const std::string path = "/valuation_scenarios/" + std::to_string(s);
      if (!rows.is_array()) {
        reader.error(path, "expected an array of rows");
        continue;
      }
      const std::size_t width = rows.empty() || !rows[0].is_array() ? 0 : rows[0].size();
      Matrix values = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                   static_cast<Eigen::Index>(width));
      bool ok = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string row_path = path + "/" + std::to_string(i);
        if (!rows[i].is_array()) {
          reader.error(row_path, "expected an array");
          ok = false;
          continue;
        }
        if (rows[i].size() != width) {
          reader.error(row_path, "row length " + std::to_string(rows[i].size()) +
                                     " differs from first row length " + std::to_string(width));
          ok = false;
          continue;
        }
        for (std::size_t j = 0; j < width; ++j) {
          if (auto v = reader.real(rows[i][j], row_path + "/" + std::to_string(j))) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
          } else {
            ok = false;
          }
        }
      }
      if (ok) instance.scenarios.push_back(std::move(values));
    }
  }

  if (!reader.issues.empty()) throw ValidationError(source, reader.issues);

  std::vector<Issue> issues = validate(instance);
  if (!is_valid(issues)) throw ValidationError(source, issues);
  doc.warnings.insert(doc.warnings.end(), issues.begin(), issues.end());
  return doc;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& detail)
    : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
            ": malformed document: " + detail),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(const std::string& source, std::vector<Issue> issues)
    : Error(describe_issues(source, issues)), issues_(std::move(issues)) {}

ScenarioDocument parse_scenario_text(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string detail = e.what();
    if (const auto pos = detail.find("parse error"); pos != std::string::npos) {
      detail = detail.substr(pos);
    }
    throw ParseError(source, line, column, detail);
  }
  ScenarioDocument doc = read_document(root, source);
  doc.digest = input_digest(text);
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ScenarioDocument parse_scenario(const std::string& path) {
  return parse_scenario_text(read_file(path), path);
}

std::string format_decimal(double value) {
  if (value == 0.0) return "0";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw ConsistencyError("cannot format number");
  return std::string(buffer, end);
}

std::string input_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  static const char kHex[] = "0123456789abcdef";
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) out += kHex[(hash >> shift) & 0xf];
  return out;
}

std::string emit_scenario(const MarketInstance& instance, std::optional<double> tolerance) {
  const auto quoted = [](double v) { return "\"" + format_decimal(v) + "\""; };
  std::ostringstream out;
  out << "{\n";
  if (!instance.name.empty()) out << "  \"name\": " << json(instance.name).dump() << ",\n";
  if (tolerance) out << "  \"tolerance\": " << quoted(*tolerance) << ",\n";

  out << "  \"travelers\": [";
  for (std::size_t i = 0; i < instance.travelers(); ++i) {
    out << (i ? ",\n" : "\n") << "    {\"budget\": "
        << quoted(instance.budgets(static_cast<Eigen::Index>(i)))
        << ", \"service_limit\": " << instance.service_limits[i] << "}";
  }
  out << (instance.travelers() ? "\n  ],\n" : "],\n");

  out << "  \"services\": [";
  for (std::size_t j = 0; j < instance.services(); ++j) {
    out << (j ? ",\n" : "\n") << "    {\"capacity\": " << instance.capacities[j] << "}";
  }
  out << (instance.services() ? "\n  ],\n" : "],\n");

  out << "  \"valuation_scenarios\": [";
  for (std::size_t s = 0; s < instance.scenario_count(); ++s) {
    const Matrix& v = instance.scenarios[s];
    out << (s ? ",\n" : "\n") << "    [";
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      out << (i ? ",\n" : "\n") << "      [";
      for (Eigen::Index j = 0; j < v.cols(); ++j) out << (j ? ", " : "") << quoted(v(i, j));
      out << "]";
    }
    out << (v.rows() ? "\n    ]" : "]");
  }
  out << (instance.scenario_count() ? "\n  ]\n" : "]\n");
  out << "}\n";
  return out.str();
}

}  // namespace mobmech::cli
