#include "ergo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include <yaml-cpp/yaml.h>

#include "ergo/errors.hpp"

namespace ergo {

std::string_view mode_name(ArithmeticMode mode) { return mode == ArithmeticMode::Float ? "float" : "rational"; }

std::optional<ArithmeticMode> parse_mode(std::string_view text) {
  if (text == "float") return ArithmeticMode::Float;
  if (text == "rational") return ArithmeticMode::Rational;
  return std::nullopt;
}

bool StreamSpec::operator==(const StreamSpec& o) const {
  if (generator != o.generator || alphas != o.alphas || alpha != o.alpha || beta != o.beta || x0 != o.x0 ||
      functions.size() != o.functions.size())
    return false;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const auto& a = functions[i];
    const auto& b = o.functions[i];
    if (a.kind != b.kind || a.freq != b.freq || a.coord != b.coord || a.lo != b.lo || a.hi != b.hi ||
        a.value != b.value)
      return false;
  }
  return true;
}

namespace {

const std::set<std::string> kGenerators{"cyclic_rotations", "power_system", "skew_product", "product_of",
                                        "random_commuting"};
const std::set<std::string> kCommands{"validate", "seminorm",   "host-measure", "cube-extension",
                                      "furstenberg", "average", "verify",       "demo"};

// ---- integer parameter text ------------------------------------------------

struct ParamValue {
  bool list = false;
  std::vector<std::int64_t> values;
};

bool is_int_token(std::string_view t) {
  if (!t.empty() && (t.front() == '-' || t.front() == '+')) t.remove_prefix(1);
  return !t.empty() && t.size() <= 18 && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// "3" or "[1,2,3]"; `column` is where `text` starts.
ParamValue parse_param_value(const std::string& text, std::size_t line, std::size_t column) {
  ParamValue out;
  std::string_view t = text;
  if (!t.empty() && t.front() == '[') {
    out.list = true;
    if (t.back() != ']') throw ParseError(line, column + t.size() - 1, "list '" + text + "' is missing ']'");
    std::string_view body = t.substr(1, t.size() - 2);
    if (body.find_first_not_of(' ') == std::string_view::npos) return out;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = body.find(',', start);
      std::string_view item = body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      std::size_t lead = std::min(item.find_first_not_of(' '), item.size());
      std::size_t offset = 1 + start + lead;
      item.remove_prefix(lead);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      if (!is_int_token(item))
        throw ParseError(line, column + offset, "expected an integer in list '" + text + "', got '" + std::string(item) + "'");
      out.values.push_back(std::stoll(std::string(item)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }
  if (!is_int_token(t)) throw ParseError(line, column, "expected an integer, got '" + text + "'");
  out.values.push_back(std::stoll(text));
  return out;
}

std::string canonical_list(const std::vector<std::int64_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

struct GeneratorArgs {
  std::string name;
  std::map<std::string, ParamValue> values;

  const ParamValue* find(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  }
  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const {
    const ParamValue* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      fail(ErrorCode::ParseError, name + " needs parameter '" + key + "'");
    }
    if (v->list) fail(ErrorCode::ParseError, name + " parameter '" + key + "' must be an integer");
    return v->values[0];
  }
  std::vector<std::int64_t> list(const std::string& key) const {
    const ParamValue* v = find(key);
    if (!v) fail(ErrorCode::ParseError, name + " needs parameter '" + key + "'");
    if (!v->list) fail(ErrorCode::ParseError, name + " parameter '" + key + "' must be a list");
    return v->values;
  }
};

const std::map<std::string, std::set<std::string>>& allowed_params() {
  static const std::map<std::string, std::set<std::string>> table{
      {"cyclic_rotations", {"q", "steps"}},
      {"power_system", {"q", "a"}},
      {"skew_product", {"q", "a", "b"}},
      {"product_of", {}},
      {"random_commuting", {"m", "d", "seed", "max_power", "nonuniform"}},
  };
  return table;
}

// Checks generator name, parameter names and shapes; locations point at the system entry in the config.
GeneratorArgs check_generator(const SystemSpec& spec, std::size_t line, std::size_t column) {
  if (!kGenerators.count(spec.generator)) fail(ErrorCode::UnknownGenerator, "unknown generator '" + spec.generator + "'");
  GeneratorArgs args;
  args.name = spec.generator;
  const auto& allowed = allowed_params().at(spec.generator);
  for (const auto& [key, text] : spec.params) {
    if (!allowed.count(key)) throw ParseError(line, column, spec.generator + " has no parameter '" + key + "'");
    if (args.values.count(key)) throw ParseError(line, column, "parameter '" + key + "' given twice");
    args.values[key] = parse_param_value(text, line, column);
  }
  try {
    if (spec.generator == "cyclic_rotations") {
      args.integer("q");
      args.list("steps");
    } else if (spec.generator == "power_system") {
      args.integer("q");
      args.list("a");
    } else if (spec.generator == "skew_product") {
      args.integer("q");
      args.integer("a", 1);
      args.integer("b", 1);
    } else if (spec.generator == "random_commuting") {
      args.integer("m");
      args.integer("d");
      args.integer("seed", 0);
      args.integer("max_power", 0);
      args.integer("nonuniform", 0);
    } else if (spec.factors.size() < 2) {
      fail(ErrorCode::ParseError, "product_of needs at least two factors");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    std::string message = e.what();
    throw ParseError(line, column, message.substr(message.find(": ") + 2));
  }
  return args;
}

// ---- YAML helpers ------------------------------------------------------------

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& message) {
  const YAML::Mark m = node.Mark();
  throw ParseError(static_cast<std::size_t>(m.line + 1), static_cast<std::size_t>(m.column + 1), message);
}

template <class T>
T scalar_as(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail_at(node, what + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail_at(node, "malformed " + what + " '" + node.Scalar() + "'");
  }
}

std::uint64_t uint_of(const YAML::Node& node, const std::string& what) {
  std::string text = scalar_as<std::string>(node, what);
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      text.size() > 19)
    fail_at(node, "expected a nonnegative integer for " + what + ", got '" + text + "'");
  return std::stoull(text);
}

std::int64_t int_of(const YAML::Node& node, const std::string& what) {
  std::string text = scalar_as<std::string>(node, what);
  if (!is_int_token(text)) fail_at(node, "expected an integer for " + what + ", got '" + text + "'");
  return std::stoll(text);
}

double double_of(const YAML::Node& node, const std::string& what) { return scalar_as<double>(node, what); }

std::string number_text(const YAML::Node& node, const std::string& what) {
  std::string text = scalar_as<std::string>(node, what);
  try {
    parse_rational(text);
  } catch (const Error&) {
    fail_at(node, "malformed number '" + text + "' in " + what);
  }
  return text;
}

const YAML::Node& need_sequence(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) fail_at(node, what + " must be a list");
  return node;
}

void check_keys(const YAML::Node& map, const std::set<std::string>& keys, const std::string& where) {
  if (!map.IsMap()) fail_at(map, where + " must be a mapping");
  for (auto it = map.begin(); it != map.end(); ++it) {
    std::string key = scalar_as<std::string>(it->first, "key");
    if (!keys.count(key)) fail_at(it->first, "unknown key '" + key + "' in " + where);
  }
}

SystemSpec parse_system_node(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  std::size_t line = static_cast<std::size_t>(mark.line + 1);
  std::size_t column = static_cast<std::size_t>(mark.column + 1);
  if (node.IsScalar()) {
    // quoted scalars start one column before their text
    std::size_t shift = node.Tag() == "!" ? 1 : 0;
    return parse_generator_text(node.Scalar(), line, column + shift);
  }
  if (!node.IsMap()) fail_at(node, "system must be a generator string or a mapping");
  SystemSpec spec;
  if (node["generator"]) {
    spec.generator = scalar_as<std::string>(node["generator"], "generator");
    for (auto it = node.begin(); it != node.end(); ++it) {
      std::string key = scalar_as<std::string>(it->first, "key");
      if (key == "generator") continue;
      if (key == "factors") {
        for (const auto& f : need_sequence(it->second, "factors")) spec.factors.push_back(parse_system_node(f));
        continue;
      }
      const YAML::Node& v = it->second;
      if (v.IsSequence()) {
        std::vector<std::int64_t> items;
        for (const auto& e : v) items.push_back(int_of(e, key));
        spec.params.emplace_back(key, canonical_list(items));
      } else {
        spec.params.emplace_back(key, std::to_string(int_of(v, key)));
      }
    }
    check_generator(spec, line, column);
    return spec;
  }
  check_keys(node, {"points", "transforms", "weights"}, "system");
  if (!node["points"]) fail_at(node, "inline system needs 'points'");
  if (!node["transforms"]) fail_at(node, "inline system needs 'transforms'");
  spec.points = uint_of(node["points"], "points");
  for (const auto& t : need_sequence(node["transforms"], "transforms")) {
    Permutation p;
    for (const auto& e : need_sequence(t, "transform")) p.push_back(static_cast<Point>(uint_of(e, "transform entry")));
    spec.transforms.push_back(std::move(p));
  }
  if (node["weights"])
    for (const auto& w : need_sequence(node["weights"], "weights")) spec.weights.push_back(number_text(w, "weights"));
  return spec;
}

FunctionSpec parse_function_node(const YAML::Node& node, const std::string& name) {
  FunctionSpec f;
  if (node.IsSequence()) {
    for (const auto& v : node) f.values.push_back(number_text(v, "function " + name));
    return f;
  }
  check_keys(node, {"values", "indicator", "character", "modulus", "part", "random"}, "function " + name);
  if (node["indicator"]) {
    f.kind = FunctionSpec::Kind::Indicator;
    f.point = static_cast<Point>(uint_of(node["indicator"], "indicator"));
  } else if (node["character"]) {
    f.kind = FunctionSpec::Kind::Character;
    f.frequency = int_of(node["character"], "character");
    if (node["modulus"]) f.modulus = uint_of(node["modulus"], "modulus");
    if (node["part"]) {
      std::string part = scalar_as<std::string>(node["part"], "part");
      if (part != "cos" && part != "sin") fail_at(node["part"], "part must be cos or sin");
      f.sine = part == "sin";
    }
  } else if (node["random"]) {
    f.kind = FunctionSpec::Kind::Random;
    f.seed = uint_of(node["random"], "random seed");
  } else if (!node["values"]) {
    fail_at(node, "function " + name + " needs values, indicator, character or random");
  }
  if (node["values"])
    for (const auto& v : need_sequence(node["values"], "values")) f.values.push_back(number_text(v, "function " + name));
  if (f.kind == FunctionSpec::Kind::Random && f.values.empty()) f.values = {"-1", "1"};
  return f;
}

StreamSpec parse_stream_node(const YAML::Node& node) {
  check_keys(node, {"generator", "alphas", "alpha", "beta", "x0", "functions"}, "stream");
  StreamSpec s;
  if (!node["generator"]) fail_at(node, "stream needs a generator");
  s.generator = scalar_as<std::string>(node["generator"], "stream generator");
  if (s.generator == "rotations") {
    if (!node["alphas"]) fail_at(node, "rotations need alphas");
    for (const auto& a : need_sequence(node["alphas"], "alphas")) s.alphas.push_back(double_of(a, "alpha"));
  } else if (s.generator == "skew") {
    if (!node["alpha"] || !node["beta"]) fail_at(node, "skew needs alpha and beta");
    s.alpha = double_of(node["alpha"], "alpha");
    s.beta = double_of(node["beta"], "beta");
  } else {
    fail(ErrorCode::UnknownGenerator, "unknown stream generator '" + s.generator + "'");
  }
  if (node["x0"])
    for (const auto& v : need_sequence(node["x0"], "x0")) s.x0.push_back(double_of(v, "x0"));
  if (node["functions"]) {
    for (const auto& fn : need_sequence(node["functions"], "stream functions")) {
      check_keys(fn, {"kind", "freq", "coord", "lo", "hi", "value"}, "stream function");
      StreamFunction f;
      std::string kind = fn["kind"] ? scalar_as<std::string>(fn["kind"], "kind") : "constant";
      if (kind == "constant")
        f.kind = StreamFunction::Kind::Constant;
      else if (kind == "cosine")
        f.kind = StreamFunction::Kind::Cosine;
      else if (kind == "sine")
        f.kind = StreamFunction::Kind::Sine;
      else if (kind == "interval")
        f.kind = StreamFunction::Kind::Interval;
      else
        fail_at(fn["kind"], "stream function kind must be constant, cosine, sine or interval");
      if (fn["freq"])
        for (const auto& v : need_sequence(fn["freq"], "freq")) f.freq.push_back(int_of(v, "freq"));
      if (fn["coord"]) f.coord = uint_of(fn["coord"], "coord");
      if (fn["lo"]) f.lo = double_of(fn["lo"], "lo");
      if (fn["hi"]) f.hi = double_of(fn["hi"], "hi");
      if (fn["value"]) f.value = double_of(fn["value"], "value");
      s.functions.push_back(std::move(f));
    }
  }
  return s;
}

CommandParams parse_params_node(const YAML::Node& node, const ExperimentConfig& cfg) {
  check_keys(node, {"subset", "sigma", "x", "grid", "kind", "functions", "nmax"}, "params");
  CommandParams p;
  if (node["subset"])
    for (const auto& v : need_sequence(node["subset"], "subset")) {
      auto i = uint_of(v, "subset entry");
      if (i == 0) fail_at(v, "subset entries are 1-based");
      p.subset.push_back(i);
    }
  if (node["sigma"]) {
    p.sigma = scalar_as<std::string>(node["sigma"], "sigma");
    if (p.sigma.empty() || p.sigma.find_first_not_of("01") != std::string::npos)
      fail_at(node["sigma"], "sigma must be a string of 0/1 digits");
  }
  if (node["x"]) p.x = static_cast<Point>(uint_of(node["x"], "x"));
  if (node["grid"])
    for (const auto& v : need_sequence(node["grid"], "grid")) p.grid.push_back(uint_of(v, "grid entry"));
  if (node["kind"]) {
    p.kind = scalar_as<std::string>(node["kind"], "kind");
    if (!parse_average_kind(p.kind)) fail_at(node["kind"], "unknown average kind '" + p.kind + "'");
  }
  if (node["functions"])
    for (const auto& v : need_sequence(node["functions"], "functions")) {
      std::string name = scalar_as<std::string>(v, "function name");
      bool known = std::any_of(cfg.functions.begin(), cfg.functions.end(), [&](const auto& f) { return f.first == name; });
      if (!known && !cfg.stream) fail_at(v, "unknown function '" + name + "'");
      p.functions.push_back(std::move(name));
    }
  if (node["nmax"]) p.nmax = uint_of(node["nmax"], "nmax");
  return p;
}

// ---- emission ----------------------------------------------------------------

std::string double_text(double x) { return format_scalar(x); }

void emit_system(YAML::Emitter& out, const SystemSpec& spec) {
  if (!spec.is_inline() && spec.factors.empty()) {
    out << YAML::DoubleQuoted << generator_text(spec);
    return;
  }
  out << YAML::BeginMap;
  if (!spec.is_inline()) {
    out << YAML::Key << "generator" << YAML::Value << spec.generator;
    for (const auto& [k, v] : spec.params) out << YAML::Key << k << YAML::Value << YAML::Load(v);
    out << YAML::Key << "factors" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : spec.factors) emit_system(out, f);
    out << YAML::EndSeq;
  } else {
    out << YAML::Key << "points" << YAML::Value << spec.points;
    out << YAML::Key << "transforms" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : spec.transforms) out << YAML::Flow << t;
    out << YAML::EndSeq;
    if (!spec.weights.empty()) out << YAML::Key << "weights" << YAML::Value << YAML::Flow << spec.weights;
  }
  out << YAML::EndMap;
}

void emit_function(YAML::Emitter& out, const FunctionSpec& f) {
  out << YAML::Flow << YAML::BeginMap;
  switch (f.kind) {
    case FunctionSpec::Kind::Values: break;
    case FunctionSpec::Kind::Indicator: out << YAML::Key << "indicator" << YAML::Value << f.point; break;
    case FunctionSpec::Kind::Character:
      out << YAML::Key << "character" << YAML::Value << f.frequency;
      if (f.modulus) out << YAML::Key << "modulus" << YAML::Value << f.modulus;
      out << YAML::Key << "part" << YAML::Value << (f.sine ? "sin" : "cos");
      break;
    case FunctionSpec::Kind::Random: out << YAML::Key << "random" << YAML::Value << f.seed; break;
  }
  if (!f.values.empty()) out << YAML::Key << "values" << YAML::Value << YAML::Flow << f.values;
  out << YAML::EndMap;
}

void emit_stream(YAML::Emitter& out, const StreamSpec& s) {
  auto doubles = [&](const std::vector<double>& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double x : v) out << double_text(x);
    out << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "generator" << YAML::Value << s.generator;
  if (s.generator == "rotations") {
    out << YAML::Key << "alphas" << YAML::Value;
    doubles(s.alphas);
  } else {
    out << YAML::Key << "alpha" << YAML::Value << double_text(s.alpha);
    out << YAML::Key << "beta" << YAML::Value << double_text(s.beta);
  }
  if (!s.x0.empty()) {
    out << YAML::Key << "x0" << YAML::Value;
    doubles(s.x0);
  }
  if (!s.functions.empty()) {
    out << YAML::Key << "functions" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : s.functions) {
      static const char* names[] = {"constant", "cosine", "sine", "interval"};
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << names[static_cast<int>(f.kind)];
      if (!f.freq.empty()) out << YAML::Key << "freq" << YAML::Value << YAML::Flow << f.freq;
      if (f.kind == StreamFunction::Kind::Interval) {
        out << YAML::Key << "coord" << YAML::Value << f.coord;
        out << YAML::Key << "lo" << YAML::Value << double_text(f.lo);
        out << YAML::Key << "hi" << YAML::Value << double_text(f.hi);
      }
      if (f.kind == StreamFunction::Kind::Constant) out << YAML::Key << "value" << YAML::Value << double_text(f.value);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

// Portable draws: std::shuffle and the std distributions are implementation-defined.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

}  // namespace

SystemSpec parse_generator_text(const std::string& text, std::size_t line, std::size_t column) {
  // split on spaces outside brackets
  std::vector<std::pair<std::string, std::size_t>> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ' || text[i] == '\t') {
      ++i;
      continue;
    }
    std::size_t start = i;
    int depth = 0;
    std::string token;
    while (i < text.size() && (depth > 0 || (text[i] != ' ' && text[i] != '\t'))) {
      if (text[i] == '[') ++depth;
      if (text[i] == ']') --depth;
      token += text[i++];
    }
    tokens.emplace_back(std::move(token), start);
  }
  if (tokens.empty()) throw ParseError(line, column, "empty generator text");
  SystemSpec spec;
  spec.generator = tokens[0].first;
  if (!kGenerators.count(spec.generator)) fail(ErrorCode::UnknownGenerator, "unknown generator '" + spec.generator + "'");
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const auto& [tok, offset] = tokens[t];
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(line, column + offset, "expected key=value, got '" + tok + "'");
    std::string value = tok.substr(eq + 1);
    ParamValue pv = parse_param_value(value, line, column + offset + eq + 1);
    spec.params.emplace_back(tok.substr(0, eq), pv.list ? canonical_list(pv.values) : std::to_string(pv.values[0]));
  }
  check_generator(spec, line, column);
  return spec;
}

std::string generator_text(const SystemSpec& spec) {
  std::string s = spec.generator;
  for (const auto& [k, v] : spec.params) s += " " + k + "=" + v;
  return s;
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(static_cast<std::size_t>(e.mark.line + 1), static_cast<std::size_t>(e.mark.column + 1), e.msg);
  }
  if (!root.IsMap()) throw ParseError(1, 1, "config must be a mapping");
  check_keys(root, {"version", "command", "mode", "seed", "cap", "system", "stream", "functions", "params"}, "config");
  ExperimentConfig cfg;
  if (!root["version"]) throw ParseError(1, 1, "config needs 'version: 1'");
  if (uint_of(root["version"], "version") != 1) fail_at(root["version"], "unsupported config version");
  if (root["command"]) {
    cfg.command = scalar_as<std::string>(root["command"], "command");
    if (!kCommands.count(cfg.command)) fail_at(root["command"], "unknown command '" + cfg.command + "'");
  }
  if (root["mode"]) {
    auto m = parse_mode(scalar_as<std::string>(root["mode"], "mode"));
    if (!m) fail_at(root["mode"], "mode must be float or rational");
    cfg.mode = *m;
  }
  if (root["seed"]) cfg.seed = uint_of(root["seed"], "seed");
  if (root["cap"]) cfg.cap = uint_of(root["cap"], "cap");
  if (root["system"]) cfg.system = parse_system_node(root["system"]);
  if (root["stream"]) cfg.stream = parse_stream_node(root["stream"]);
  if (root["functions"]) {
    const YAML::Node& fns = root["functions"];
    if (!fns.IsMap()) fail_at(fns, "functions must be a mapping from names to definitions");
    for (auto it = fns.begin(); it != fns.end(); ++it) {
      std::string name = scalar_as<std::string>(it->first, "function name");
      cfg.functions.emplace_back(name, parse_function_node(it->second, name));
    }
  }
  if (root["params"]) cfg.params = parse_params_node(root["params"], cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << cfg.version;
  out << YAML::Key << "command" << YAML::Value << cfg.command;
  out << YAML::Key << "mode" << YAML::Value << std::string(mode_name(cfg.mode));
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "cap" << YAML::Value << cfg.cap;
  if (cfg.system) {
    out << YAML::Key << "system" << YAML::Value;
    emit_system(out, *cfg.system);
  }
  if (cfg.stream) {
    out << YAML::Key << "stream" << YAML::Value;
    emit_stream(out, *cfg.stream);
  }
  if (!cfg.functions.empty()) {
    out << YAML::Key << "functions" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, f] : cfg.functions) {
      out << YAML::Key << name << YAML::Value;
      emit_function(out, f);
    }
    out << YAML::EndMap;
  }
  const CommandParams& p = cfg.params;
  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  if (!p.subset.empty()) out << YAML::Key << "subset" << YAML::Value << YAML::Flow << p.subset;
  if (!p.sigma.empty()) out << YAML::Key << "sigma" << YAML::Value << YAML::DoubleQuoted << p.sigma;
  out << YAML::Key << "x" << YAML::Value << p.x;
  if (!p.grid.empty()) out << YAML::Key << "grid" << YAML::Value << YAML::Flow << p.grid;
  out << YAML::Key << "kind" << YAML::Value << p.kind;
  if (!p.functions.empty()) out << YAML::Key << "functions" << YAML::Value << YAML::Flow << p.functions;
  out << YAML::Key << "nmax" << YAML::Value << p.nmax;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

template <class S>
FiniteSystem<S> generate_system(const SystemSpec& spec, const Limits& limits, std::uint64_t default_seed) {
  if (spec.is_inline()) {
    std::vector<S> weights;
    if (spec.weights.empty()) {
      if (spec.points == 0) fail(ErrorCode::BadWeights, "system has no points");
      weights.assign(spec.points, from_rational<S>(Rational(1, static_cast<unsigned long>(spec.points))));
    } else {
      for (const auto& w : spec.weights) weights.push_back(from_rational<S>(parse_rational(w)));
      if (weights.size() != spec.points)
        fail(ErrorCode::DimensionMismatch, "weights list has " + std::to_string(weights.size()) + " entries for " +
                                               std::to_string(spec.points) + " points");
    }
    return validate_system<S>(spec.points, std::move(weights), spec.transforms, limits);
  }

  GeneratorArgs args = check_generator(spec, 1, 1);
  auto positive = [&](const std::string& key, std::int64_t v) {
    if (v < 1) fail(ErrorCode::InvalidArgument, spec.generator + " needs " + key + " >= 1");
    return static_cast<std::size_t>(v);
  };
  auto check_points = [&](std::size_t m) {
    if (m > limits.max_points)
      fail(ErrorCode::CapExceeded, spec.generator + " would have " + std::to_string(m) + " points, above the cap of " +
                                       std::to_string(limits.max_points));
  };
  auto rotation = [](std::size_t q, std::int64_t s) {
    Permutation p(q);
    std::int64_t qq = static_cast<std::int64_t>(q);
    for (std::size_t x = 0; x < q; ++x) p[x] = static_cast<Point>((((static_cast<std::int64_t>(x) + s) % qq) + qq) % qq);
    return p;
  };

  if (spec.generator == "cyclic_rotations" || spec.generator == "power_system") {
    std::size_t q = positive("q", args.integer("q"));
    check_points(q);
    auto steps = args.list(spec.generator == "cyclic_rotations" ? "steps" : "a");
    std::vector<Permutation> ts;
    for (auto s : steps) ts.push_back(rotation(q, s));
    return uniform_system<S>(q, std::move(ts), limits);
  }
  if (spec.generator == "skew_product") {
    std::size_t q = positive("q", args.integer("q"));
    check_points(q * q);
    std::int64_t a = args.integer("a", 1), b = args.integer("b", 1);
    std::int64_t qq = static_cast<std::int64_t>(q);
    auto mod = [qq](std::int64_t v) { return static_cast<std::size_t>(((v % qq) + qq) % qq); };
    Permutation t(q * q), s(q * q);
    for (std::size_t x = 0; x < q; ++x)
      for (std::size_t y = 0; y < q; ++y) {
        auto xi = static_cast<std::int64_t>(x), yi = static_cast<std::int64_t>(y);
        t[x * q + y] = static_cast<Point>(mod(xi + a) * q + mod(yi + xi));
        s[x * q + y] = static_cast<Point>(x * q + mod(yi + b));
      }
    return uniform_system<S>(q * q, {t, s}, limits);
  }
  if (spec.generator == "product_of") {
    FiniteSystem<S> acc = generate_system<S>(spec.factors[0], limits, default_seed);
    for (std::size_t i = 1; i < spec.factors.size(); ++i) {
      FiniteSystem<S> next = generate_system<S>(spec.factors[i], limits, default_seed);
      std::size_t d = std::max(acc.dim(), next.dim());
      check_points(acc.size() * next.size());
      acc = product_system(pad_dimension(acc, d), pad_dimension(next, d), limits);
    }
    return acc;
  }
  // random_commuting: powers of one seeded random permutation
  std::size_t m = positive("m", args.integer("m"));
  std::size_t d = positive("d", args.integer("d"));
  check_points(m);
  if (d > limits.max_generators)
    fail(ErrorCode::CapExceeded, "random_commuting d=" + std::to_string(d) + " is above the generator cap");
  std::uint64_t seed = args.find("seed") ? static_cast<std::uint64_t>(args.integer("seed")) : default_seed;
  std::int64_t max_power = args.integer("max_power", 0);
  if (max_power < 0) fail(ErrorCode::InvalidArgument, "max_power must be nonnegative");
  std::uint64_t powers = max_power == 0 ? m : static_cast<std::uint64_t>(max_power) + 1;
  std::mt19937_64 rng(seed);
  Permutation base = identity_permutation(m);
  for (std::size_t i = m; i > 1; --i) std::swap(base[i - 1], base[draw(rng, i)]);
  std::vector<Permutation> ts;
  for (std::size_t i = 0; i < d; ++i) {
    std::uint64_t k = draw(rng, powers);
    Permutation p = identity_permutation(m);
    for (std::uint64_t r = 0; r < k; ++r) p = compose(base, p);
    ts.push_back(std::move(p));
  }
  if (args.integer("nonuniform", 0) == 0) return uniform_system<S>(m, std::move(ts), limits);
  // weights constant on the cycles of the base permutation
  std::vector<std::uint64_t> cycle_weight(m, 0);
  std::vector<std::uint64_t> raw(m, 0);
  std::vector<char> seen(m, 0);
  for (std::size_t x = 0; x < m; ++x) {
    if (seen[x]) continue;
    std::uint64_t w = 1 + draw(rng, 4);
    for (Point y = static_cast<Point>(x); !seen[y]; y = base[y]) {
      seen[y] = 1;
      raw[y] = w;
    }
  }
  std::uint64_t total = 0;
  for (auto w : raw) total += w;
  std::vector<S> weights;
  for (auto w : raw) {
    Rational q(static_cast<unsigned long>(w), static_cast<unsigned long>(total));
    q.canonicalize();
    weights.push_back(from_rational<S>(q));
  }
  return validate_system<S>(m, std::move(weights), std::move(ts), limits);
}

template <class S>
Observable<S> materialize_function(const FunctionSpec& spec, std::size_t m) {
  Observable<S> f = Observable<S>::constant(m, S(0));
  switch (spec.kind) {
    case FunctionSpec::Kind::Values:
      if (spec.values.size() != m)
        fail(ErrorCode::ArityMismatch, "function has " + std::to_string(spec.values.size()) + " values for " +
                                           std::to_string(m) + " points");
      for (std::size_t i = 0; i < m; ++i) f[static_cast<Point>(i)] = from_rational<S>(parse_rational(spec.values[i]));
      break;
    case FunctionSpec::Kind::Indicator:
      if (spec.point >= m) fail(ErrorCode::InvalidArgument, "indicator point " + std::to_string(spec.point) + " out of range");
      f[spec.point] = 1;
      break;
    case FunctionSpec::Kind::Character: {
      std::uint64_t q = spec.modulus ? spec.modulus : m;
      for (std::size_t x = 0; x < m; ++x) {
        // reduce k x mod q first so the angle stays exact for rational cases
        std::int64_t qq = static_cast<std::int64_t>(q);
        std::int64_t r = ((spec.frequency % qq) * static_cast<std::int64_t>(x % q)) % qq;
        r = (r + qq) % qq;
        if constexpr (is_exact_v<S>) {
          // cos/sin of 2πr/q is rational only at multiples of a quarter or sixth turn
          Rational turn(r, qq);
          turn.canonicalize();
          static const std::map<std::pair<long, long>, std::pair<int, int>> cos_table{
              {{0, 1}, {1, 1}}, {{1, 6}, {1, 2}}, {{1, 4}, {0, 1}}, {{1, 3}, {-1, 2}}, {{1, 2}, {-1, 1}},
              {{2, 3}, {-1, 2}}, {{3, 4}, {0, 1}}, {{5, 6}, {1, 2}}};
          auto angle = [&](const Rational& t) -> std::optional<Rational> {
            auto it = cos_table.find({t.get_num().get_si(), t.get_den().get_si()});
            if (it == cos_table.end()) return std::nullopt;
            return Rational(it->second.first, it->second.second);
          };
          Rational shifted = turn;
          if (spec.sine) {
            // sin(2πt) = cos(2π(t - 1/4))
            shifted = turn - Rational(1, 4);
            if (shifted < 0) shifted += 1;
            shifted.canonicalize();
          }
          auto v = angle(shifted);
          if (!v)
            fail(ErrorCode::InvalidArgument, "character value at x=" + std::to_string(x) +
                                                 " is irrational; use float mode");
          f[static_cast<Point>(x)] = *v;
        } else {
          double t = 2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
          f[static_cast<Point>(x)] = spec.sine ? std::sin(t) : std::cos(t);
        }
      }
      break;
    }
    case FunctionSpec::Kind::Random: {
      std::mt19937_64 rng(spec.seed);
      std::vector<S> pool;
      for (const auto& v : spec.values) pool.push_back(from_rational<S>(parse_rational(v)));
      if (pool.empty()) fail(ErrorCode::InvalidArgument, "random function needs a nonempty value pool");
      for (std::size_t x = 0; x < m; ++x) f[static_cast<Point>(x)] = pool[draw(rng, pool.size())];
      break;
    }
  }
  return f;
}

template FiniteSystem<double> generate_system<double>(const SystemSpec&, const Limits&, std::uint64_t);
template FiniteSystem<Rational> generate_system<Rational>(const SystemSpec&, const Limits&, std::uint64_t);
template Observable<double> materialize_function<double>(const FunctionSpec&, std::size_t);
template Observable<Rational> materialize_function<Rational>(const FunctionSpec&, std::size_t);

}  // namespace ergo
