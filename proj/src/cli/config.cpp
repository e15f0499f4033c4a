// Copyright 2026 The selfnorm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "selfnorm/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace selfnorm::cli {

namespace {

std::string compose(const std::string& file, std::size_t line,
                    std::size_t column, const std::string& message) {
  std::ostringstream os;
  os << file << ":" << line << ":" << column << ": " << message;
  return os.str();
}

std::size_t skip_space(const std::string& s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
    ++pos;
  }
  return pos;
}

std::string rstrip(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.pop_back();
  }
  return s;
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.';
}

// Typed access to one parsed document with position-aware errors.
class Reader {
 public:
  Reader(const IniDocument& doc, std::string file)
      : doc_(doc), file_(std::move(file)) {}

  const IniEntry* find(const std::string& section,
                       const std::string& key) const {
    auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  [[noreturn]] void fail(const IniEntry& e, const std::string& msg) const {
    throw ConfigError(file_, e.line, e.column, msg);
  }

  template <typename T>
  T parse_number(const IniEntry& e, std::string_view text) const {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      fail(e, "expected a number, got '" + std::string(text) + "'");
    }
    return value;
  }

  template <typename T>
  std::optional<T> number(const std::string& section,
                          const std::string& key) const {
    const IniEntry* e = find(section, key);
    if (!e) return std::nullopt;
    return parse_number<T>(*e, e->value);
  }

  template <typename T>
  std::optional<std::vector<T>> list(const std::string& section,
                                     const std::string& key) const {
    const IniEntry* e = find(section, key);
    if (!e) return std::nullopt;
    std::vector<T> out;
    std::string_view v = e->value;
    std::size_t start = 0;
    while (start <= v.size()) {
      std::size_t end = v.find(',', start);
      if (end == std::string_view::npos) end = v.size();
      std::string_view item = v.substr(start, end - start);
      while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
        item.remove_prefix(1);
      }
      while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
        item.remove_suffix(1);
      }
      if (item.empty()) fail(*e, "empty list item");
      out.push_back(parse_number<T>(*e, item));
      start = end + 1;
    }
    return out;
  }

  std::optional<bool> flag(const std::string& section,
                           const std::string& key) const {
    const IniEntry* e = find(section, key);
    if (!e) return std::nullopt;
    std::string v = e->value;
    for (char& c : v) c = static_cast<char>(std::tolower(c));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(*e, "expected true/false, got '" + e->value + "'");
  }

  std::optional<std::string> text(const std::string& section,
                                  const std::string& key) const {
    const IniEntry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  // Runs `f` and rewrites std::invalid_argument as a positioned error.
  template <typename F>
  auto at(const std::string& section, const std::string& key, F&& f) const {
    try {
      return f();
    } catch (const std::invalid_argument& ex) {
      const IniEntry* e = find(section, key);
      if (!e) throw ConfigError(file_, 1, 1, ex.what());
      fail(*e, ex.what());
    }
  }

  void reject_unknown(
      const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [section, line] : doc_.header_lines) {
      if (!schema.count(section)) {
        throw ConfigError(file_, line, 1, "unknown section [" + section + "]");
      }
    }
    for (const auto& [section, keys] : doc_.sections) {
      auto s = schema.find(section);
      for (const auto& [key, entry] : keys) {
        if (s == schema.end()) {
          throw ConfigError(file_, entry.line, entry.key_column,
                            "key outside any known section");
        }
        if (!s->second.count(key)) {
          throw ConfigError(file_, entry.line, entry.key_column,
                            "unknown key '" + key + "' in [" + section + "]");
        }
      }
    }
  }

 private:
  const IniDocument& doc_;
  std::string file_;
};

FieldKind parse_kind(std::string_view v) {
  if (v == "iid") return FieldKind::kIid;
  if (v == "moving_average" || v == "ma") return FieldKind::kMovingAverage;
  if (v == "graph_edge_sum" || v == "graph") return FieldKind::kGraphEdgeSum;
  throw std::invalid_argument("unknown model kind '" + std::string(v) + "'");
}

}  // namespace

ConfigError::ConfigError(std::string file, std::size_t line,
                         std::size_t column, const std::string& message)
    : std::runtime_error(compose(file, line, column, message)),
      line_(line),
      column_(column) {}

IniDocument parse_ini(std::istream& in, const std::string& file) {
  IniDocument doc;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = raw;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t pos = skip_space(line, 0);
    if (pos == line.size()) continue;
    if (line[pos] == '[') {
      const std::size_t close = line.find(']', pos);
      if (close == std::string::npos) {
        throw ConfigError(file, line_no, line.size() + 1, "expected ']'");
      }
      if (skip_space(line, close + 1) != line.size()) {
        throw ConfigError(file, line_no, close + 2,
                          "unexpected text after section header");
      }
      std::string name = line.substr(pos + 1, close - pos - 1);
      const std::size_t b = skip_space(name, 0);
      name = rstrip(name.substr(b));
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_key_char)) {
        throw ConfigError(file, line_no, pos + 2, "bad section name");
      }
      section = name;
      doc.sections[section];
      doc.header_lines.emplace(section, line_no);
      continue;
    }
    std::size_t k = pos;
    while (k < line.size() && is_key_char(line[k])) ++k;
    if (k == pos) {
      throw ConfigError(file, line_no, pos + 1, "expected a key");
    }
    const std::string key = line.substr(pos, k - pos);
    const std::size_t eq = skip_space(line, k);
    if (eq >= line.size() || line[eq] != '=') {
      throw ConfigError(file, line_no, eq + 1, "expected '=' after key");
    }
    const std::size_t vpos = skip_space(line, eq + 1);
    const std::string value = rstrip(line.substr(std::min(vpos, line.size())));
    if (value.empty()) {
      throw ConfigError(file, line_no, vpos + 1, "missing value");
    }
    auto& sec = doc.sections[section];
    if (sec.count(key)) {
      throw ConfigError(file, line_no, pos + 1, "duplicate key '" + key + "'");
    }
    sec[key] = IniEntry{value, line_no, vpos + 1, pos + 1};
  }
  return doc;
}

ExperimentConfig parse_config(std::istream& in, const std::string& file) {
  const IniDocument doc = parse_ini(in, file);
  const Reader r(doc, file);
  r.reject_unknown({
      {"model",
       {"kind", "innovation", "scale", "param", "n", "dims", "d", "radius",
        "coefficients", "graph", "edges"}},
      {"experiment",
       {"statistic", "sweep", "replications", "seed", "delta", "C", "workers"}},
      {"suites", {"simulate", "rate", "verify", "bound", "calibrate"}},
      {"verify", {"replications", "test_function", "z", "half_widths"}},
      {"rate", {"noise_multiple", "slope_min", "slope_max", "min_r2"}},
  });

  ExperimentConfig c;
  ModelConfig& m = c.model;
  if (auto v = r.text("model", "kind")) {
    m.kind = r.at("model", "kind", [&] { return parse_kind(*v); });
  }
  Family fam = Family::kRademacher;
  if (auto v = r.text("model", "innovation")) {
    fam = r.at("model", "innovation", [&] { return parse_family(*v); });
  }
  const double scale = r.number<double>("model", "scale").value_or(1.0);
  const auto param = r.number<double>("model", "param");
  m.innovations.family = fam;
  m.innovations.scale = scale;
  if (fam == Family::kTwoPoint) {
    m.innovations.param = param.value_or(0.5);
  } else if (fam == Family::kParetoCentered) {
    m.innovations.param = param.value_or(3.5);
  }
  r.at("model", param ? "param" : "scale", [&] {
    m.innovations.validate();
    return 0;
  });

  m.n = r.number<std::size_t>("model", "n").value_or(0);
  if (auto d = r.list<std::size_t>("model", "dims")) m.dims = *d;
  m.lattice_d = r.number<std::size_t>("model", "d").value_or(
      m.dims.empty() ? 1 : m.dims.size());
  m.radius = r.number<std::size_t>("model", "radius").value_or(0);
  if (auto cs = r.list<double>("model", "coefficients")) m.coefficients = *cs;
  if (auto g = r.text("model", "graph")) m.graph = *g;
  if (m.graph != "cycle" && m.graph != "path" && m.graph != "matching" &&
      m.graph != "file") {
    r.fail(*r.find("model", "graph"),
           "graph must be cycle, path, matching or file");
  }
  if (auto e = r.text("model", "edges")) {
    m.edges = *e;
    if (m.edges.is_relative() && !file.empty() && file.front() != '<') {
      m.edges = std::filesystem::path(file).parent_path() / m.edges;
    }
    if (!std::filesystem::exists(m.edges)) {
      r.fail(*r.find("model", "edges"),
             "edge-list file not found: " + m.edges.string());
    }
    if (!r.find("model", "graph")) m.graph = "file";
  }
  if (m.kind == FieldKind::kGraphEdgeSum && m.graph == "file" &&
      m.edges.empty()) {
    throw ConfigError(file, 1, 1, "graph = file needs an edges path");
  }

  if (auto v = r.text("experiment", "statistic")) {
    c.statistic =
        r.at("experiment", "statistic", [&] { return parse_statistic_kind(*v); });
  }
  if (auto s = r.list<std::size_t>("experiment", "sweep")) c.sweep = *s;
  c.replications =
      r.number<std::uint64_t>("experiment", "replications").value_or(10000);
  if (c.replications == 0) {
    r.fail(*r.find("experiment", "replications"), "replications must be >= 1");
  }
  c.seed = r.number<std::uint64_t>("experiment", "seed").value_or(1);
  c.delta = r.number<double>("experiment", "delta").value_or(0.01);
  if (!(c.delta > 0.0 && c.delta < 1.0)) {
    r.fail(*r.find("experiment", "delta"), "delta must lie in (0, 1)");
  }
  c.C = r.number<double>("experiment", "C").value_or(1.0);
  if (!(c.C > 0.0)) r.fail(*r.find("experiment", "C"), "C must be positive");
  c.workers = r.number<unsigned>("experiment", "workers").value_or(0);

  c.suites.simulate = r.flag("suites", "simulate").value_or(false);
  c.suites.rate = r.flag("suites", "rate").value_or(false);
  c.suites.verify = r.flag("suites", "verify").value_or(false);
  c.suites.bound = r.flag("suites", "bound").value_or(false);
  c.suites.calibrate = r.flag("suites", "calibrate").value_or(false);

  c.verify.replications =
      r.number<std::uint64_t>("verify", "replications").value_or(100000);
  if (c.verify.replications < 2) {
    r.fail(*r.find("verify", "replications"), "replications must be >= 2");
  }
  if (auto f = r.text("verify", "test_function")) {
    c.verify.test_function =
        r.at("verify", "test_function", [&] { return parse_test_function(*f); });
  }
  c.verify.z = r.number<double>("verify", "z").value_or(0.0);
  c.verify.half_widths = r.list<double>("verify", "half_widths")
                             .value_or(std::vector<double>{0.0, 0.05, 0.1, 0.2});

  c.rate.noise_multiple = r.number<double>("rate", "noise_multiple").value_or(2.0);
  c.rate.slope_min = r.number<double>("rate", "slope_min");
  c.rate.slope_max = r.number<double>("rate", "slope_max");
  c.rate.min_r2 = r.number<double>("rate", "min_r2");

  // Build once so structural mistakes surface as config errors.
  const char* key = m.kind == FieldKind::kMovingAverage ? "dims" : "n";
  r.at("model", key, [&] {
    if (c.sweep.empty()) {
      build_model(m, std::nullopt);
    } else {
      build_model(m, c.sweep.front());
    }
    return 0;
  });
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, 0, "cannot open config");
  ExperimentConfig c = parse_config(in, path.string());
  c.source = path;
  return c;
}

FieldModel build_model(const ModelConfig& m, std::optional<std::size_t> n) {
  switch (m.kind) {
    case FieldKind::kIid: {
      const std::size_t size = n.value_or(m.n);
      if (size == 0) throw std::invalid_argument("iid model needs n >= 1");
      return FieldModel::iid(size, m.innovations);
    }
    case FieldKind::kMovingAverage: {
      std::vector<std::size_t> dims = m.dims;
      if (n) dims.assign(m.lattice_d, *n);
      if (dims.empty()) {
        throw std::invalid_argument("moving_average needs dims or a sweep");
      }
      return FieldModel::moving_average(dims, m.radius, m.coefficients,
                                        m.innovations);
    }
    case FieldKind::kGraphEdgeSum: {
      EdgeList g;
      if (m.graph == "file") {
        g = read_edge_list(m.edges);
      } else {
        const std::size_t size = n.value_or(m.n);
        if (m.graph == "cycle") g = cycle_graph(size);
        else if (m.graph == "path") g = path_graph(size);
        else g = perfect_matching(size);
      }
      return FieldModel::graph_edge_sum(std::move(g), m.innovations);
    }
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace selfnorm::cli
