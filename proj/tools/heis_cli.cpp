// heis: experiment runner. Every subcommand takes its positionals, any
// `key=value` tokens, or `--key value` options; `run FILE` executes each
// section of a config file in order.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "heis/config.hpp"
#include "heis/runner.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 2, kResource = 3, kNonConvergence = 4 };

heis::config::ExperimentConfig from_tokens(const heis::config::Command& cmd, const std::vector<std::string>& tokens,
                                           std::map<std::string, std::string> values) {
  std::size_t next = 0;
  for (const auto& t : tokens) {
    const auto eq = t.find('=');
    if (eq != std::string::npos) {
      const auto k = t.substr(0, eq);
      const bool known = std::any_of(cmd.keys.begin(), cmd.keys.end(), [&](const auto& key) { return key.name == k; });
      if (known) {
        if (values.count(k)) throw heis::DomainError("key '" + k + "' given twice");
        values[k] = t.substr(eq + 1);
        continue;
      }
      if (k.find(':') == std::string::npos) throw heis::DomainError("unknown key '" + k + "' for " + cmd.name);
    }
    while (next < cmd.positional.size() && values.count(cmd.positional[next])) ++next;
    if (next == cmd.positional.size()) throw heis::DomainError("unexpected argument '" + t + "'");
    values[cmd.positional[next++]] = t;
  }
  return {cmd.name, values};
}

const std::map<std::string, std::string> kAbout = {
    {"ball", "enumerate the word ball B_R"},
    {"perimeter", "horizontal and vertical perimeter of a finite set"},
    {"iso-scan", "vertical/horizontal perimeter ratio over the set corpus"},
    {"poincare", "global or local Poincare sums for a cut embedding"},
    {"criterion", "integral criterion for a modulus omega"},
    {"c1", "exact L1 distortion with cut and dual certificates"},
    {"negtype", "negative type test with witness"},
    {"gap", "LP, SDP and exact sparsest cut on an instance"},
    {"heis-gap", "relaxation gap on a word ball"},
    {"vbar", "v-bar curve and L2 norm for a region"},
    {"lipgraph", "v-bar norm and slice bounds for an intrinsic graph"},
};

int run_all(const std::vector<heis::config::ExperimentConfig>& cfgs) {
  for (const auto& c : cfgs) {
    const auto r = heis::run_experiment(c, std::cout);
    std::cerr << c.subcommand() << ": " << r.outputs.size() << " file(s), config_hash " << r.config_hash << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg group geometry and sparsest-cut workbench"};
  app.require_subcommand(1);

  struct Sub {
    const heis::config::Command* cmd;
    CLI::App* app;
    std::vector<std::string> tokens;
    std::map<std::string, std::string> opts;
  };
  std::vector<Sub> subs;
  subs.reserve(heis::config::commands().size());
  for (const auto& cmd : heis::config::commands()) {
    auto& s = subs.emplace_back(Sub{&cmd, app.add_subcommand(cmd.name, kAbout.at(cmd.name)), {}, {}});
    s.app->add_option("args", s.tokens, "positionals or key=value pairs");
    for (const auto& key : cmd.keys) {
      std::string dflt = key.fallback.empty() ? "required" : "default " + key.fallback;
      s.app->add_option_function<std::string>(
          "--" + key.name, [&s, name = key.name](const std::string& v) { s.opts[name] = v; }, dflt);
    }
  }
  std::string config_file;
  auto* run = app.add_subcommand("run", "execute every section of a config file");
  run->add_option("file", config_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (run->parsed()) {
      std::ifstream in(config_file);
      if (!in) throw heis::DomainError("cannot read " + config_file);
      return run_all(heis::config::parse(in));
    }
    for (const auto& s : subs)
      if (s.app->parsed()) return run_all({from_tokens(*s.cmd, s.tokens, s.opts)});
  } catch (const heis::NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\nresiduals:";
    for (double r : e.residuals()) std::cerr << ' ' << heis::io::num(r);
    std::cerr << '\n';
    return kNonConvergence;
  } catch (const heis::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResource;
  } catch (const heis::OverflowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
