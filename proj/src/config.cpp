#include "bubblelab/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bubblelab/errors.hpp"

namespace bl {

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  int line = 1;
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + why);
  }
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  // Skips whitespace, newlines and comments (inside arrays).
  void skip_all() {
    for (;;) {
      skip_ws();
      if (i < s.size() && s[i] == '#') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else if (i < s.size() && (s[i] == '\n' || s[i] == '\r')) {
        if (s[i] == '\n') ++line;
        ++i;
      } else {
        return;
      }
    }
  }
  bool at_end_of_line() {
    skip_ws();
    if (i < s.size() && s[i] == '#')
      while (i < s.size() && s[i] != '\n') ++i;
    return i >= s.size() || s[i] == '\n' || s[i] == '\r';
  }
};

bool bare_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

ConfigValue parse_value(Cursor& c) {
  c.skip_ws();
  ConfigValue v;
  v.line = c.line;
  if (c.i >= c.s.size()) c.fail("missing value");
  char ch = c.s[c.i];
  if (ch == '"') {
    v.type = ConfigValue::Type::String;
    ++c.i;
    while (c.i < c.s.size() && c.s[c.i] != '"') {
      if (c.s[c.i] == '\n') c.fail("unterminated string");
      if (c.s[c.i] == '\\') {
        ++c.i;
        if (c.i >= c.s.size()) c.fail("bad escape");
        char e = c.s[c.i];
        v.str += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        v.str += c.s[c.i];
      }
      ++c.i;
    }
    if (c.i >= c.s.size()) c.fail("unterminated string");
    ++c.i;
    return v;
  }
  if (ch == '[') {
    v.type = ConfigValue::Type::Array;
    ++c.i;
    c.skip_all();
    if (c.i < c.s.size() && c.s[c.i] == ']') {
      ++c.i;
      return v;
    }
    for (;;) {
      auto item = parse_value(c);
      if (item.type == ConfigValue::Type::Array) c.fail("nested arrays are not supported");
      v.items.push_back(item);
      c.skip_all();
      if (c.i >= c.s.size()) c.fail("unterminated array");
      if (c.s[c.i] == ',') {
        ++c.i;
        c.skip_all();
        if (c.i < c.s.size() && c.s[c.i] == ']') {
          ++c.i;
          return v;
        }
        continue;
      }
      if (c.s[c.i] == ']') {
        ++c.i;
        return v;
      }
      c.fail("expected ',' or ']' in array");
    }
  }
  size_t start = c.i;
  while (c.i < c.s.size() && !std::isspace(static_cast<unsigned char>(c.s[c.i])) && c.s[c.i] != ',' &&
         c.s[c.i] != ']' && c.s[c.i] != '#')
    ++c.i;
  std::string tok = c.s.substr(start, c.i - start);
  if (tok == "true" || tok == "false") {
    v.type = ConfigValue::Type::Bool;
    v.boolean = tok == "true";
    return v;
  }
  std::string digits;
  for (char d : tok)
    if (d != '_') digits += d;
  size_t used = 0;
  try {
    v.num = std::stod(digits, &used);
  } catch (const std::exception&) {
    c.fail("cannot parse value '" + tok + "'");
  }
  if (used != digits.size() || !std::isfinite(v.num)) c.fail("cannot parse value '" + tok + "'");
  v.type = ConfigValue::Type::Number;
  return v;
}

}  // namespace

ConfigTable ConfigTable::parse(const std::string& text) {
  ConfigTable t;
  Cursor c{text};
  std::string section;
  std::set<std::string> sections;
  while (c.i < text.size()) {
    c.skip_all();
    if (c.i >= text.size()) break;
    if (text[c.i] == '[') {
      ++c.i;
      c.skip_ws();
      size_t st = c.i;
      while (c.i < text.size() && bare_char(text[c.i])) ++c.i;
      section = text.substr(st, c.i - st);
      c.skip_ws();
      if (section.empty() || c.i >= text.size() || text[c.i] != ']') c.fail("malformed section header");
      ++c.i;
      if (!sections.insert(section).second) c.fail("duplicate section [" + section + "]");
      if (!c.at_end_of_line()) c.fail("trailing characters after section header");
      continue;
    }
    size_t st = c.i;
    while (c.i < text.size() && bare_char(text[c.i])) ++c.i;
    std::string key = text.substr(st, c.i - st);
    if (key.empty()) c.fail("expected a key");
    c.skip_ws();
    if (c.i >= text.size() || text[c.i] != '=') c.fail("expected '=' after key '" + key + "'");
    ++c.i;
    auto v = parse_value(c);
    if (!c.at_end_of_line()) c.fail("trailing characters after value");
    std::string full = section + "." + key;
    if (!t.entries_.emplace(full, v).second) c.fail("duplicate key '" + full + "'");
  }
  return t;
}

ConfigTable ConfigTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ConfigValue* ConfigTable::find(const std::string& section, const std::string& key) const {
  auto it = entries_.find(section + "." + key);
  return it == entries_.end() ? nullptr : &it->second;
}

bool ConfigTable::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

namespace {
[[noreturn]] void type_error(const std::string& section, const std::string& key, const char* want) {
  throw ConfigError("config key " + section + "." + key + " must be " + want);
}
}  // namespace

std::optional<std::string> ConfigTable::string(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v) return std::nullopt;
  if (v->type != ConfigValue::Type::String) type_error(section, key, "a string");
  return v->str;
}

std::optional<double> ConfigTable::number(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v) return std::nullopt;
  if (v->type != ConfigValue::Type::Number) type_error(section, key, "a number");
  return v->num;
}

std::optional<int> ConfigTable::integer(const std::string& section, const std::string& key) const {
  auto v = number(section, key);
  if (!v) return std::nullopt;
  if (*v != std::floor(*v) || std::abs(*v) > 2e9) type_error(section, key, "an integer");
  return static_cast<int>(*v);
}

std::optional<bool> ConfigTable::boolean(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v) return std::nullopt;
  if (v->type != ConfigValue::Type::Bool) type_error(section, key, "true or false");
  return v->boolean;
}

std::optional<std::vector<double>> ConfigTable::numbers(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v) return std::nullopt;
  if (v->type != ConfigValue::Type::Array) type_error(section, key, "an array of numbers");
  std::vector<double> out;
  for (auto& it : v->items) {
    if (it.type != ConfigValue::Type::Number) type_error(section, key, "an array of numbers");
    out.push_back(it.num);
  }
  return out;
}

void ConfigTable::check_keys(const std::set<std::string>& allowed) const {
  for (auto& [k, v] : entries_)
    if (!allowed.count(k))
      throw ConfigError("config line " + std::to_string(v.line) + ": unknown key '" + k + "'");
}

void ExperimentConfig::validate() const {
  zeta_reference(regime);
  if (!(lambda_fraction > 0 && lambda_fraction < 1)) throw ConfigError("lambda_fraction must lie in (0, 1)");
  for (double d : deltas)
    if (!(d > 0 && d <= 0.3)) throw ConfigError("sweep deltas must lie in (0, 0.3]");
  for (double d : distances)
    if (!(d > 0 && d < 1)) throw ConfigError("boundary distances must lie in (0, 1)");
  if (tensor_points < 8) throw ConfigError("tensor grids need at least 8 points per axis");
  if (output_dir.empty()) throw ConfigError("output directory must not be empty");
  auto dom = DomainModel::parse(domain, regime.n);
  if (dom.kind != DomainKind::UnitBall || dom.ball_radius != 1.0)
    throw ConfigError("sweeps are set up on the unit ball");
  GridSpec::parse(grid);
}

SweepConfig ExperimentConfig::sweep_config() const {
  SweepConfig s;
  s.regime = regime;
  s.lambda_fraction = lambda_fraction;
  s.deltas = deltas;
  s.grid = GridSpec::parse(grid);
  s.tensor_points = tensor_points;
  s.eps_scale = eps_scale;
  s.distances = distances;
  s.delta_power = delta_power;
  s.seed = seed;
  return s;
}

ExperimentConfig experiment_config_from(const ConfigTable& t) {
  t.check_keys({"regime.name", "regime.n", "regime.nu", "regime.u0", "regime.boundary", "regime.kind",
                "regime.lambda_fraction", "domain.shape", "domain.grid", "domain.tensor_points",
                "sweep.deltas", "sweep.distances", "sweep.delta_power", "sweep.eps_scale", "sweep.seed",
                "output.dir", "output.prefix"});
  ExperimentConfig c;
  if (auto name = t.string("regime", "name")) c.regime = parse_regime(*name);
  if (auto v = t.integer("regime", "n")) c.regime.n = *v;
  if (auto v = t.integer("regime", "nu")) c.regime.nu = *v;
  if (auto v = t.string("regime", "u0")) {
    if (*v == "zero") c.regime.u0_positive = false;
    else if (*v == "positive") c.regime.u0_positive = true;
    else throw ConfigError("regime.u0 must be \"zero\" or \"positive\"");
  }
  if (auto v = t.string("regime", "boundary")) {
    if (*v == "interior") c.regime.boundary = BoundaryRegime::Interior;
    else if (*v == "boundary") c.regime.boundary = BoundaryRegime::NearBoundary;
    else throw ConfigError("regime.boundary must be \"interior\" or \"boundary\"");
  }
  if (auto v = t.string("regime", "kind")) c.regime.kind = parse_projection_kind(*v);
  if (auto v = t.number("regime", "lambda_fraction")) c.lambda_fraction = *v;
  if (auto v = t.string("domain", "shape")) c.domain = *v;
  if (auto v = t.string("domain", "grid")) c.grid = *v;
  if (auto v = t.integer("domain", "tensor_points")) c.tensor_points = *v;
  if (auto v = t.numbers("sweep", "deltas")) c.deltas = *v;
  if (auto v = t.numbers("sweep", "distances")) c.distances = *v;
  if (auto v = t.number("sweep", "delta_power")) c.delta_power = *v;
  if (auto v = t.number("sweep", "eps_scale")) c.eps_scale = *v;
  if (auto v = t.integer("sweep", "seed")) {
    if (*v < 0) throw ConfigError("sweep.seed must be >= 0");
    c.seed = static_cast<unsigned long>(*v);
  }
  if (auto v = t.string("output", "dir")) c.output_dir = *v;
  if (auto v = t.string("output", "prefix")) c.prefix = *v;
  return c;
}

}  // namespace bl
