#pragma once

// Executes one ExperimentConfig: computes, writes the subcommand's CSV/JSON
// artifacts into out_dir, and a manifest.json next to them. Every artifact
// carries the config hash. Data files depend only on the hashed keys; the
// manifest additionally records wall time.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "heis/ball.hpp"
#include "heis/config.hpp"
#include "heis/continuous.hpp"
#include "heis/corpus.hpp"
#include "heis/criterion.hpp"
#include "heis/embed.hpp"
#include "heis/io.hpp"
#include "heis/perimeter.hpp"
#include "heis/poincare.hpp"
#include "heis/sdp.hpp"

namespace heis {

inline constexpr char kVersion[] = "0.1.0";

struct RunResult {
  std::string config_hash;
  std::vector<std::string> outputs;  // file names inside out_dir
  double wall_time = 0;
};

namespace detail {

class Artifacts {
 public:
  Artifacts(const config::ExperimentConfig& cfg) : dir_(cfg.str("out_dir")), hash_(cfg.hash()) {
    std::filesystem::create_directories(dir_);
  }

  const std::string& hash() const { return hash_; }

  std::ofstream open(const std::string& name, bool binary = false) {
    std::ofstream f(dir_ / name, binary ? std::ios::binary : std::ios::out);
    if (!f) throw DomainError("cannot write " + (dir_ / name).string());
    names_.push_back(name);
    return f;
  }

  void json(const std::string& name, io::json j) {
    j["config_hash"] = hash_;
    open(name) << j.dump(2) << '\n';
  }

  std::vector<std::string> names() const { return names_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string hash_;
  std::vector<std::string> names_;
};

inline McOptions mc_options(const config::ExperimentConfig& cfg) {
  McOptions mc;
  mc.budget = static_cast<std::size_t>(cfg.integer("budget"));
  mc.streams = static_cast<int>(cfg.integer("streams"));
  mc.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  mc.threads = static_cast<int>(cfg.integer("threads"));
  if (mc.streams < 1 || mc.streams > 4096) throw DomainError("streams must lie in [1, 4096]");
  return mc;
}

inline VBarOptions vbar_options(const config::ExperimentConfig& cfg) {
  VBarOptions o;
  o.s_min = cfg.real("s_min");
  o.max_step = cfg.real("step");
  o.comparability = cfg.real("comparability");
  o.mc = mc_options(cfg);
  return o;
}

template <class T>
T read_file(const std::string& path, T (*reader)(std::istream&)) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  return reader(in);
}

inline io::json vbar_params(const config::ExperimentConfig& cfg) {
  return {{"r", cfg.real("r")},           {"s_min", cfg.real("s_min")},   {"step", cfg.real("step")},
          {"comparability", cfg.real("comparability")}, {"budget", cfg.integer("budget")},
          {"streams", cfg.integer("streams")}};
}

template <class P>
void run_ball(const config::ExperimentConfig& cfg, Artifacts& art, std::ostream& log) {
  const auto R = cfg.integer("R");
  if (R < 0 || R > 1000) throw DomainError("ball radius must lie in [0, 1000]");
  const auto ball = word_ball<P>(static_cast<int>(R), static_cast<std::size_t>(cfg.integer("cap")));
  const auto recs = io::ball_records(ball);
  const auto& fmt = cfg.str("format");
  if (fmt == "text") {
    auto f = art.open("ball.csv");
    io::write_ball_text(f, recs, art.hash());
  } else if (fmt == "binary") {
    auto f = art.open("ball.bin", true);
    io::write_ball_binary(f, recs, art.hash());
  } else {
    throw DomainError("ball format must be text or binary");
  }
  log << "size " << ball.size() << '\n';
}

inline void run_iso_scan(const config::ExperimentConfig& cfg, Artifacts& art, std::ostream& log) {
  CorpusSpec spec;
  spec.max_ball = static_cast<int>(cfg.integer("max_ball"));
  spec.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  spec.random_count = static_cast<std::uint64_t>(cfg.integer("random_count"));
  const double p = cfg.real("p");
  auto csv = art.open("scan.csv");
  csv << "# config_hash=" << art.hash() << '\n' << io::kScanHeader << '\n';
  double max_ratio = 0;
  std::string argmax;
  std::vector<double> lx, ly;
  std::size_t count = 0;
  for_each_corpus_set(spec, [&](const NamedSet& s) {
    const auto r = perimeter_report(s.set, p);
    csv << io::scan_row(s.family, s.params, r) << '\n';
    ++count;
    if (r.ratio.hi > max_ratio) {
      max_ratio = r.ratio.hi;
      argmax = s.family + " " + s.params;
    }
    lx.push_back(std::log(static_cast<double>(r.size)));
    ly.push_back(std::log(r.ratio.hi));
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) sx += lx[i], sy += ly[i], sxx += lx[i] * lx[i], sxy += lx[i] * ly[i];
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  art.json("scan_summary.json",
           {{"sets", count}, {"max_ratio", max_ratio}, {"argmax", argmax}, {"loglog_slope", slope}, {"p", p}});
  log << "sets " << count << " max_ratio " << io::num(max_ratio) << " slope " << io::num(slope) << '\n';
}

inline void run_poincare(const config::ExperimentConfig& cfg, Artifacts& art, std::ostream& log) {
  std::ifstream in(cfg.str("phi"));
  if (!in) throw DomainError("cannot read " + cfg.str("phi"));
  io::json j;
  try {
    j = io::json::parse(in);
  } catch (const io::json::exception& e) {
    throw DomainError(std::string("embedding file is not JSON: ") + e.what());
  }
  const auto phi = io::parse_embedding(j);
  const double p = cfg.real("p");
  const auto& mode = cfg.str("mode");
  io::json params = {{"p", p}, {"mode", mode}};
  Interval lhs;
  double rhs = 0;
  std::visit(
      [&](const auto& f) {
        if (mode == "global") {
          const auto v = global_poincare(f, p);
          lhs = v.lhs;
          rhs = v.rhs;
          params["z_extent"] = v.z_extent;
          params["rhs_sum"] = v.rhs_sum;
        } else if (mode == "local") {
          const int n = static_cast<int>(cfg.integer("n"));
          lhs = local_lhs(f, n, p);
          rhs = local_rhs(f, n, cfg.real("alpha"), p);
          params["n"] = n;
          params["alpha"] = cfg.real("alpha");
        } else {
          throw DomainError("poincare mode must be global or local");
        }
      },
      phi);
  art.json("poincare.json", io::poincare_json(lhs, rhs, params));
  log << "lhs [" << io::num(lhs.lo) << ", " << io::num(lhs.hi) << "] rhs " << io::num(rhs) << '\n';
}

inline void run_heis_gap(const config::ExperimentConfig& cfg, Artifacts& art, std::ostream& log) {
  const auto& t = cfg.str("transform");
  BallTransform tr;
  if (t == "raw") tr = BallTransform::kRaw;
  else if (t == "sqrt") tr = BallTransform::kSqrt;
  else if (t == "snowflake") tr = BallTransform::kSnowflake;
  else throw DomainError("transform must be raw, sqrt or snowflake");
  const int R = static_cast<int>(cfg.integer("R"));
  const double eps = cfg.real("eps");
  const auto& g = cfg.str("group");
  HeisPipeline h;
  if (g == "h3") h = heis_instance<DiscretePoint3>(R, tr, eps);
  else if (g == "h5") h = heis_instance<DiscretePoint>(R, tr, eps);
  else throw DomainError("group must be h3 or h5");
  io::json j = {{"group", h.group},
                {"R", R},
                {"transform", t},
                {"eps", eps},
                {"n", h.metric.n()},
                {"negative_type", h.negtype.negative_type},
                {"min_eigenvalue", h.negtype.min_eigenvalue}};
  if (h.c1) j["c1"] = io::certificate_json(*h.c1);
  if (h.gap) j["gap"] = io::gap_json(*h.gap);
  if (h.certificate) {
    j["certificate"] = {{"c1", h.certificate->c1},
                        {"ratio", h.certificate->ratio},
                        {"opt", h.certificate->opt},
                        {"gap_lower_bound", h.certificate->gap_lower_bound}};
  }
  art.json("heis_gap.json", j);
  log << h.group << " B_" << R << " n " << h.metric.n() << " negative_type " << h.negtype.negative_type;
  if (h.c1) log << " c1 " << io::num(h.c1->c1);
  log << '\n';
}

inline void run_lipgraph(const config::ExperimentConfig& cfg, Artifacts& art, std::ostream& log) {
  auto f = IntrinsicGraphFn::parse(cfg.str("family"));
  const double r = cfg.real("r");
  const double C = cfg.real("comparability");
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const auto lip_budget = static_cast<std::size_t>(cfg.integer("lip_budget"));
  const double target = cfg.real("calibrate");
  VBox box{r, r, r, r * r};
  if (f.family() == IntrinsicGraphFn::Family::kSinusoid) {
    const double omega = f.params()[1];
    box = sinusoid_box(omega);
    if (target > 0) f = IntrinsicGraphFn::sinusoid(calibrate_sinusoid(target, omega, lip_budget, seed), omega);
  } else if (target > 0) {
    throw DomainError("calibration applies to the sinusoid family only");
  }
  const double lambda = intrinsic_lip_estimate(f, box, lip_budget, seed).lambda;
  const auto curve = vbar_l2(half_space(f), r, vbar_options(cfg));
  {
    auto csv = art.open("curve.csv");
    io::write_curve_csv(csv, curve.points, art.hash());
  }
  io::json j = {{"family", f.describe()},
                {"lambda_hat", lambda},
                {"curve", io::curve_json(curve)},
                {"params", vbar_params(cfg)},
                {"seed", seed}};
  if (lambda < 1) j["scaled_l2"] = curve.l2 * (1 - lambda) / std::pow(r, 5);
  if (1.1 * lambda < 1) {
    // λ̂ only describes f on `box`; slices are sampled inside its horizontal extent.
    const auto s = slice_lip_check(f, cfg.real("chi"), std::min(box.a, box.c), lambda, lip_budget, seed, C);
    j["slice"] = {{"chi", s.chi},   {"rho", s.rho},     {"estimate", s.estimate}, {"lambda_cons", s.lambda_cons},
                  {"K", s.K},       {"bound", s.bound}, {"quasi_bound", s.quasi_bound}, {"within", s.within}};
  }
  art.json("lipgraph.json", j);
  log << f.describe() << " lambda_hat " << io::num(lambda) << " l2 " << io::num(curve.l2) << '\n';
}

}  // namespace detail

inline RunResult run_experiment(const config::ExperimentConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  detail::Artifacts art(cfg);
  const auto& sub = cfg.subcommand();
  if (sub == "ball") {
    const auto& g = cfg.str("group");
    if (g == "h5") detail::run_ball<DiscretePoint>(cfg, art, log);
    else if (g == "h3") detail::run_ball<DiscretePoint3>(cfg, art, log);
    else throw DomainError("group must be h3 or h5");
  } else if (sub == "perimeter") {
    const auto& spec = cfg.str("set");
    const auto set = std::filesystem::is_regular_file(spec) ? detail::read_file(spec, io::read_lattice_set)
                                                              : config::parse_set(spec);
    const auto r = perimeter_report(set, cfg.real("p"));
    art.json("perimeter.json", io::perimeter_json(r));
    log << "size " << r.size << " h_perim " << r.h_count << " v_perim [" << io::num(r.v_perimeter.lo) << ", "
        << io::num(r.v_perimeter.hi) << "]\n";
  } else if (sub == "iso-scan") {
    detail::run_iso_scan(cfg, art, log);
  } else if (sub == "poincare") {
    detail::run_poincare(cfg, art, log);
  } else if (sub == "criterion") {
    const auto omega = config::parse_modulus(cfg.str("omega"));
    const double R = cfg.real("R"), c = cfg.real("c");
    const double v = integral_criterion(omega, R, c);
    art.json("criterion.json", {{"omega", omega.describe()}, {"R", R}, {"c", c}, {"value", v}});
    log << io::num(v) << '\n';
  } else if (sub == "c1") {
    const auto m = detail::read_file(cfg.str("metric"), io::read_metric);
    const auto cert = c1_exact(m);
    art.json("certificate.json", io::certificate_json(cert));
    log << "c1 " << io::num(cert.c1) << '\n';
  } else if (sub == "negtype") {
    const auto m = detail::read_file(cfg.str("metric"), io::read_metric);
    const auto r = is_negative_type(m);
    io::json j = {{"negative_type", r.negative_type}, {"min_eigenvalue", r.min_eigenvalue}};
    if (!r.negative_type) {
      j["witness"] = std::vector<double>(r.witness.data(), r.witness.data() + r.witness.size());
      j["witness_form"] = negtype_form(m, r.witness);
    }
    art.json("negtype.json", j);
    log << "negative_type " << (r.negative_type ? "true" : "false") << '\n';
  } else if (sub == "gap") {
    const auto inst = detail::read_file(cfg.str("instance"), io::read_instance);
    const auto g = integrality_gap(inst);
    art.json("gap.json", io::gap_json(g));
    log << "lp " << io::num(g.lp) << " sdp " << io::num(g.sdp.objective) << " opt " << io::num(g.opt.value) << '\n';
  } else if (sub == "heis-gap") {
    detail::run_heis_gap(cfg, art, log);
  } else if (sub == "vbar") {
    const auto E = config::parse_region(cfg.str("region"));
    const auto curve = vbar_l2(E, cfg.real("r"), detail::vbar_options(cfg));
    {
      auto csv = art.open("curve.csv");
      io::write_curve_csv(csv, curve.points, art.hash());
    }
    auto j = io::curve_json(curve);
    j["region"] = cfg.str("region");
    j["params"] = detail::vbar_params(cfg);
    j["seed"] = cfg.integer("seed");
    art.json("vbar.json", j);
    log << "l2 " << io::num(curve.l2) << " tail " << io::num(curve.tail) << '\n';
  } else if (sub == "lipgraph") {
    detail::run_lipgraph(cfg, art, log);
  } else {
    throw DomainError("unknown subcommand '" + sub + "'");
  }

  RunResult res;
  res.config_hash = art.hash();
  res.outputs = art.names();
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::json manifest = {
      {"config_hash", res.config_hash},
      {"seed", cfg.integer("seed")},
      {"subcommand", sub},
      {"config", cfg.serialize()},
      {"outputs", res.outputs},
      {"versions",
       {{"heis", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION}}},
      {"wall_time", res.wall_time}};
  std::ofstream(art.dir() / "manifest.json") << manifest.dump(2) << '\n';
  return res;
}

}  // namespace heis
