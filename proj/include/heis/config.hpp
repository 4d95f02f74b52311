#pragma once

// Experiment configuration: plain-text `key = value` lines under one
// `[subcommand]` header per experiment. Every subcommand has a fixed key
// schema; unknown keys are rejected and missing keys take their defaults,
// so serialize() is canonical and parse(serialize(c)) == c.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "heis/continuous.hpp"
#include "heis/corpus.hpp"
#include "heis/criterion.hpp"
#include "heis/error.hpp"
#include "heis/io.hpp"

namespace heis::config {

enum class Type { kInt, kReal, kString };

struct Key {
  std::string name;
  Type type = Type::kString;
  std::string fallback;         // empty: required
  bool affects_output = true;   // false: left out of the config hash
};

struct Command {
  std::string name;
  std::vector<std::string> positional;  // keys filled by bare command-line tokens
  std::vector<Key> keys;
};

inline const std::vector<Command>& commands() {
  using T = Type;
  auto common = [](std::vector<Key> k, const std::string& seed = "1") {
    k.push_back({"seed", T::kInt, seed});
    k.push_back({"out_dir", T::kString, ".", false});
    k.push_back({"threads", T::kInt, "0", false});
    return k;
  };
  auto mc = [&](std::vector<Key> k) {
    for (Key x : std::vector<Key>{{"r", T::kReal, "1"},
                                  {"s_min", T::kReal, "-10"},
                                  {"step", T::kReal, "0.25"},
                                  {"comparability", T::kReal, "8"},
                                  {"budget", T::kInt, "200000"},
                                  {"streams", T::kInt, "16"}})
      k.push_back(x);
    return common(k);
  };
  static const std::vector<Command> all = {
      {"ball", {"R"}, common({{"R", T::kInt, ""}, {"group", T::kString, "h5"}, {"format", T::kString, "text"},
                              {"cap", T::kInt, "67108864"}})},
      {"perimeter", {"set"}, common({{"set", T::kString, ""}, {"p", T::kReal, "4"}})},
      {"iso-scan", {}, common({{"max_ball", T::kInt, "6"}, {"random_count", T::kInt, "200"}, {"p", T::kReal, "4"}}, "7")},
      {"poincare", {"phi"}, common({{"phi", T::kString, ""}, {"p", T::kReal, "1"}, {"mode", T::kString, "global"},
                                    {"n", T::kInt, "1"}, {"alpha", T::kReal, "2"}})},
      {"criterion", {"omega", "R"}, common({{"omega", T::kString, ""}, {"R", T::kReal, ""}, {"c", T::kReal, "0.5"}})},
      {"c1", {"metric"}, common({{"metric", T::kString, ""}})},
      {"negtype", {"metric"}, common({{"metric", T::kString, ""}})},
      {"gap", {"instance"}, common({{"instance", T::kString, ""}})},
      {"heis-gap", {"R"}, common({{"R", T::kInt, ""}, {"group", T::kString, "h3"},
                                  {"transform", T::kString, "raw"}, {"eps", T::kReal, "0.5"}})},
      {"vbar", {"region"}, mc({{"region", T::kString, ""}})},
      {"lipgraph", {"family", "r"}, mc({{"family", T::kString, ""}, {"calibrate", T::kReal, "0"},
                                        {"lip_budget", T::kInt, "20000"}, {"chi", T::kReal, "0.3"}})},
  };
  return all;
}

inline const Command& command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw DomainError("unknown subcommand '" + name + "'");
}

class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  /// Validates `values` against the schema of `subcommand` and fills defaults.
  ExperimentConfig(std::string subcommand, const std::map<std::string, std::string>& values)
      : subcommand_(std::move(subcommand)) {
    const Command& cmd = command(subcommand_);
    for (const auto& [k, v] : values) {
      const auto it = std::find_if(cmd.keys.begin(), cmd.keys.end(), [&](const Key& key) { return key.name == k; });
      if (it == cmd.keys.end()) throw DomainError("unknown key '" + k + "' for " + subcommand_);
      check(*it, v);
      values_[k] = v;
    }
    for (const auto& key : cmd.keys) {
      if (values_.count(key.name)) continue;
      if (key.fallback.empty()) throw DomainError("missing required key '" + key.name + "' for " + subcommand_);
      values_[key.name] = key.fallback;
    }
  }

  const std::string& subcommand() const { return subcommand_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  const std::string& str(const std::string& k) const {
    const auto it = values_.find(k);
    if (it == values_.end()) throw DomainError("no key '" + k + "' in " + subcommand_ + " config");
    return it->second;
  }
  std::int64_t integer(const std::string& k) const { return io::detail::to_int(str(k)); }
  double real(const std::string& k) const { return io::detail::to_double(str(k)); }

  std::string serialize() const { return render(false); }

  /// FNV-1a of the canonical form without the keys that cannot change outputs.
  std::string hash() const { return io::hex64(io::fnv1a(render(true))); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

 private:
  static void check(const Key& key, const std::string& v) {
    if (v.empty() || v.find('\n') != std::string::npos || v != io::detail::trim(v))
      throw DomainError("bad value for '" + key.name + "'");
    if (key.type == Type::kInt) io::detail::to_int(v);
    if (key.type == Type::kReal) io::detail::to_double(v);
  }

  std::string render(bool hashed) const {
    const Command& cmd = command(subcommand_);
    std::ostringstream os;
    os << '[' << subcommand_ << "]\n";
    for (const auto& [k, v] : values_) {
      const auto it = std::find_if(cmd.keys.begin(), cmd.keys.end(), [&](const Key& key) { return key.name == k; });
      if (hashed && !it->affects_output) continue;
      os << k << " = " << v << '\n';
    }
    return os.str();
  }

  std::string subcommand_;
  std::map<std::string, std::string> values_;
};

/// One experiment per `[subcommand]` section; '#' starts a comment line.
inline std::vector<ExperimentConfig> parse(std::istream& in) {
  std::vector<ExperimentConfig> out;
  std::string section;
  std::map<std::string, std::string> values;
  bool open = false;
  auto flush = [&] {
    if (open) out.emplace_back(section, values);
    values.clear();
  };
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = io::detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw DomainError("line " + std::to_string(lineno) + ": unterminated section");
      flush();
      section = io::detail::trim(line.substr(1, line.size() - 2));
      command(section);
      open = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("line " + std::to_string(lineno) + ": expected key = value");
    if (!open) throw DomainError("line " + std::to_string(lineno) + ": key outside a section");
    const auto k = io::detail::trim(line.substr(0, eq));
    if (values.count(k)) throw DomainError("line " + std::to_string(lineno) + ": duplicate key '" + k + "'");
    values[k] = io::detail::trim(line.substr(eq + 1));
  }
  flush();
  if (out.empty()) throw DomainError("config holds no experiment section");
  return out;
}

inline ExperimentConfig parse_one(const std::string& text) {
  std::istringstream in(text);
  auto all = parse(in);
  if (all.size() != 1) throw DomainError("expected exactly one experiment section");
  return all.front();
}

// ---------------------------------------------------------------------------
// Small spec languages used by the keys above.

namespace detail {

inline std::map<std::string, double> named_params(const std::string& body, const std::string& what) {
  std::map<std::string, double> out;
  if (body.empty()) return out;
  for (const auto& part : io::detail::split(body, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw DomainError(what + ": expected name=value, got '" + part + "'");
    out[io::detail::trim(part.substr(0, eq))] = io::detail::to_double(part.substr(eq + 1));
  }
  return out;
}

inline double take(std::map<std::string, double>& m, const std::string& k, const std::string& what,
                   std::optional<double> fallback = {}) {
  const auto it = m.find(k);
  if (it == m.end()) {
    if (fallback) return *fallback;
    throw DomainError(what + ": missing parameter '" + k + "'");
  }
  const double v = it->second;
  m.erase(it);
  return v;
}

inline void no_extra(const std::map<std::string, double>& m, const std::string& what) {
  if (!m.empty()) throw DomainError(what + ": unknown parameter '" + m.begin()->first + "'");
}

}  // namespace detail

/// `linear:D=2`, `power:eps=0.25,D=1`, or `table:t1:w1,t2:w2,...`.
inline Modulus parse_modulus(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& part : io::detail::split(body, ',')) {
      const auto c = part.find(':');
      if (c == std::string::npos) throw DomainError("table modulus knots are t:w pairs");
      knots.emplace_back(io::detail::to_double(part.substr(0, c)), io::detail::to_double(part.substr(c + 1)));
    }
    return Modulus::tabulated(knots);
  }
  auto p = detail::named_params(body, "modulus '" + spec + "'");
  if (kind == "linear") {
    const double D = detail::take(p, "D", spec, 1.0);
    detail::no_extra(p, spec);
    return Modulus::linear(D);
  }
  if (kind == "power") {
    const double eps = detail::take(p, "eps", spec);
    const double D = detail::take(p, "D", spec, 1.0);
    detail::no_extra(p, spec);
    return Modulus::power(eps, D);
  }
  throw DomainError("unknown modulus kind '" + kind + "'");
}

/// Region specs for v̄: `graph:<family>` (the half-space above Γ_f),
/// `x2pos` ({x2 > 0}), `zpos` ({z > 0}), `zslab:h` ({0 < z < h}).
inline Region parse_region(const std::string& spec) {
  if (spec.rfind("graph:", 0) == 0) return half_space(IntrinsicGraphFn::parse(spec.substr(6)));
  if (spec == "x2pos") return [](const ContinuousPoint& u) { return u.x2 > 0; };
  if (spec == "zpos") return [](const ContinuousPoint& u) { return u.z > 0; };
  if (spec.rfind("zslab:", 0) == 0) {
    const double h = io::detail::to_double(spec.substr(6));
    if (!(h > 0)) throw DomainError("slab height must be positive");
    return [h](const ContinuousPoint& u) { return u.z > 0 && u.z < h; };
  }
  throw DomainError("unknown region '" + spec + "'");
}

/// Set specs: a file path, or `ball:R`, `box:a,b,c,d,e`, `segment:n`,
/// `random:seed,index`, `tilted:n,ka,kc`, `singleton`.
inline LatticeSet5 parse_set(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const auto args = [&] {
    std::vector<std::int64_t> v;
    if (colon != std::string::npos)
      for (const auto& s : io::detail::split(spec.substr(colon + 1), ',')) v.push_back(io::detail::to_int(s));
    return v;
  }();
  auto need = [&](std::size_t k) {
    if (args.size() != k) throw DomainError("set family '" + kind + "' takes " + std::to_string(k) + " integers");
  };
  if (kind == "singleton") return need(0), LatticeSet5(std::vector<DiscretePoint>{{0, 0, 0, 0, 0}});
  if (kind == "ball") return need(1), ball_set(static_cast<int>(args[0]));
  if (kind == "box") return need(5), box_set(args[0], args[1], args[2], args[3], args[4]);
  if (kind == "segment") return need(1), vertical_segment(args[0]);
  if (kind == "random")
    return need(2), random_cellular(static_cast<std::uint64_t>(args[0]), static_cast<std::uint64_t>(args[1]));
  if (kind == "tilted") return need(3), tilted_halfspace(args[0], args[1], args[2]);
  throw DomainError("unknown set family '" + kind + "' (set files are read by the caller)");
}

}  // namespace heis::config
