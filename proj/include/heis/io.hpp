#pragma once

// Text and binary formats: ball dumps, lattice sets, metrics, instances,
// embeddings, and the CSV/JSON reports written by the command-line tool.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heis/ball.hpp"
#include "heis/continuous.hpp"
#include "heis/embed.hpp"
#include "heis/error.hpp"
#include "heis/perimeter.hpp"
#include "heis/poincare.hpp"
#include "heis/sdp.hpp"

namespace heis::io {

using nlohmann::json;

/// Shortest round-trip-safe decimal form, identical on every run.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::int64_t to_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(trim(s), &used);
    if (used != trim(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("expected an integer, got '" + s + "'");
  }
}

inline double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(s), &used);
    if (used != trim(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("expected a number, got '" + s + "'");
  }
}

// Next line that is neither empty nor a '#' comment.
inline bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty() && t[0] != '#') {
      line = t;
      return true;
    }
  }
  return false;
}

inline DiscretePoint as_point5(const DiscretePoint& p) { return p; }
inline DiscretePoint as_point5(const DiscretePoint3& p) { return embed(p); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Balls

inline constexpr char kBallHeader[] = "a,b,c,d,e,dist";
inline constexpr char kBallMagic[8] = {'H', 'E', 'I', 'S', 'B', 'A', 'L', 'L'};

struct BallRecord {
  DiscretePoint p;
  int dist = 0;
  friend bool operator==(const BallRecord&, const BallRecord&) = default;
};

/// Records sorted by distance, then by packed key. H^3 points are written
/// with b = d = 0.
template <class P>
std::vector<BallRecord> ball_records(const Ball<P>& ball) {
  std::vector<BallRecord> out;
  for (const auto& p : ball.points()) out.push_back({detail::as_point5(p), *ball.distance(p)});
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.dist < y.dist; });
  return out;
}

inline void write_ball_text(std::ostream& os, const std::vector<BallRecord>& recs,
                            const std::string& config_hash = {}) {
  if (!config_hash.empty()) os << "# config_hash=" << config_hash << '\n';
  os << kBallHeader << '\n';
  for (const auto& r : recs)
    os << r.p.a << ',' << r.p.b << ',' << r.p.c << ',' << r.p.d << ',' << r.p.e << ',' << r.dist << '\n';
}

inline std::vector<BallRecord> read_ball_text(std::istream& in) {
  std::string line;
  if (!detail::next_data_line(in, line) || line != kBallHeader)
    throw DomainError(std::string("ball dump must start with the header ") + kBallHeader);
  std::vector<BallRecord> out;
  while (detail::next_data_line(in, line)) {
    const auto f = detail::split(line, ',');
    if (f.size() != 6) throw DomainError("ball record needs 6 fields: " + line);
    out.push_back({{detail::to_int(f[0]), detail::to_int(f[1]), detail::to_int(f[2]),
                    detail::to_int(f[3]), detail::to_int(f[4])},
                   static_cast<int>(detail::to_int(f[5]))});
  }
  return out;
}

/// Magic "HEISBALL", 16-byte config hash (zero padded), u64 count, then per
/// record five little-endian i64 and one i32.
inline void write_ball_binary(std::ostream& os, const std::vector<BallRecord>& recs,
                              const std::string& config_hash = {}) {
  auto put = [&](auto v) {
    unsigned char b[sizeof v];
    for (std::size_t i = 0; i < sizeof v; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), sizeof v);
  };
  os.write(kBallMagic, 8);
  char hash[16] = {};
  std::memcpy(hash, config_hash.data(), std::min<std::size_t>(16, config_hash.size()));
  os.write(hash, 16);
  put(static_cast<std::uint64_t>(recs.size()));
  for (const auto& r : recs) {
    for (auto v : {r.p.a, r.p.b, r.p.c, r.p.d, r.p.e}) put(static_cast<std::uint64_t>(v));
    put(static_cast<std::uint32_t>(r.dist));
  }
}

inline std::vector<BallRecord> read_ball_binary(std::istream& in) {
  auto get = [&](auto& v) {
    unsigned char b[sizeof v];
    if (!in.read(reinterpret_cast<char*>(b), sizeof v)) throw DomainError("truncated binary ball dump");
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < sizeof v; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    v = static_cast<std::remove_reference_t<decltype(v)>>(x);
  };
  char magic[8], hash[16];
  if (!in.read(magic, 8) || std::memcmp(magic, kBallMagic, 8) != 0)
    throw DomainError("not a binary ball dump");
  if (!in.read(hash, 16)) throw DomainError("truncated binary ball dump");
  std::uint64_t n = 0;
  get(n);
  std::vector<BallRecord> out(n);
  for (auto& r : out) {
    std::uint64_t v[5];
    for (auto& x : v) get(x);
    r.p = {static_cast<std::int64_t>(v[0]), static_cast<std::int64_t>(v[1]), static_cast<std::int64_t>(v[2]),
           static_cast<std::int64_t>(v[3]), static_cast<std::int64_t>(v[4])};
    std::uint32_t d = 0;
    get(d);
    r.dist = static_cast<int>(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lattice sets: one point `a,b,c,d,e` per line, '#' comments, optional header.

inline LatticeSet5 read_lattice_set(std::istream& in) {
  std::vector<DiscretePoint> pts;
  std::string line;
  while (detail::next_data_line(in, line)) {
    if (line == "a,b,c,d,e") continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 5) throw DomainError("set file line needs 5 integers: " + line);
    pts.push_back({detail::to_int(f[0]), detail::to_int(f[1]), detail::to_int(f[2]),
                   detail::to_int(f[3]), detail::to_int(f[4])});
  }
  return LatticeSet5(pts);
}

inline void write_lattice_set(std::ostream& os, const LatticeSet5& s) {
  os << "a,b,c,d,e\n";
  for (const auto& p : s.points()) os << p.a << ',' << p.b << ',' << p.c << ',' << p.d << ',' << p.e << '\n';
}

// ---------------------------------------------------------------------------
// Metrics and instances

namespace detail {

inline Eigen::MatrixXd read_rows(std::istream& in, int n, const char* what) {
  Eigen::MatrixXd M(n, n);
  std::string line;
  for (int i = 0; i < n; ++i) {
    if (!next_data_line(in, line)) throw DomainError(std::string(what) + ": too few rows");
    std::istringstream ls(line);
    for (int j = 0; j < n; ++j) {
      std::string tok;
      if (!(ls >> tok)) throw DomainError(std::string(what) + ": row " + std::to_string(i) + " is short");
      M(i, j) = to_double(tok);
    }
    std::string extra;
    if (ls >> extra) throw DomainError(std::string(what) + ": row " + std::to_string(i) + " is long");
  }
  return M;
}

inline int read_size(std::istream& in, const char* what) {
  std::string line;
  if (!next_data_line(in, line)) throw DomainError(std::string(what) + " is empty");
  const auto n = to_int(line);
  if (n < 1 || n > 4096) throw DomainError(std::string(what) + ": bad size " + line);
  return static_cast<int>(n);
}

inline void write_rows(std::ostream& os, const Eigen::MatrixXd& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? " " : "") << num(M(i, j));
    os << '\n';
  }
}

}  // namespace detail

/// First line n, then n lines of n reals.
inline FiniteMetric read_metric(std::istream& in) {
  const int n = detail::read_size(in, "metric file");
  return FiniteMetric(detail::read_rows(in, n, "metric file"));
}

inline void write_metric(std::ostream& os, const FiniteMetric& m) {
  os << m.n() << '\n';
  detail::write_rows(os, m.dist);
}

/// First line n, n rows of C, a blank line, n rows of D.
inline Instance read_instance(std::istream& in) {
  const int n = detail::read_size(in, "instance file");
  Instance inst;
  inst.C = detail::read_rows(in, n, "instance capacities");
  inst.D = detail::read_rows(in, n, "instance demands");
  inst.validate();
  return inst;
}

inline void write_instance(std::ostream& os, const Instance& inst) {
  os << inst.n() << '\n';
  detail::write_rows(os, inst.C);
  os << '\n';
  detail::write_rows(os, inst.D);
}

inline json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Embeddings φ: Z^5 → L_1 as JSON.
//
//   cut form:    {"cuts": [{"weight": w, "points": [[a,b,c,d,e], ...]}, ...],
//                 "domain": [[...], ...]}            (domain optional)
//   vector form: {"points": [[...], ...], "values": [[...], ...],
//                 "background": [...], "finitely_supported": true}

using Embedding = std::variant<CutEmbedding, VectorEmbedding>;

namespace detail {

inline DiscretePoint point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 5) throw DomainError("a point is an array of 5 integers");
  for (const auto& x : j)
    if (!x.is_number_integer()) throw DomainError("point coordinates must be integers");
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(),
          j[3].get<std::int64_t>(), j[4].get<std::int64_t>()};
}

inline LatticeSet5 set_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("a point set is an array of points");
  std::vector<DiscretePoint> pts;
  for (const auto& p : j) pts.push_back(point_from_json(p));
  return LatticeSet5(pts);
}

inline json set_to_json(const LatticeSet5& s) {
  json a = json::array();
  for (const auto& p : s.points()) a.push_back({p.a, p.b, p.c, p.d, p.e});
  return a;
}

}  // namespace detail

inline Embedding parse_embedding(const json& j) {
  try {
    if (j.contains("cuts")) {
      CutEmbedding phi;
      for (const auto& c : j.at("cuts")) {
        const double w = c.at("weight").get<double>();
        if (!(w >= 0) || !std::isfinite(w)) throw DomainError("cut weights must be finite and nonnegative");
        phi.cuts.push_back({w, detail::set_from_json(c.at("points"))});
      }
      if (j.contains("domain")) phi.domain = detail::set_from_json(j.at("domain"));
      return phi;
    }
    VectorEmbedding v;
    for (const auto& p : j.at("points")) v.points.push_back(detail::point_from_json(p));
    for (const auto& row : j.at("values")) v.values.push_back(row.get<std::vector<double>>());
    v.background = j.at("background").get<std::vector<double>>();
    v.finitely_supported = j.value("finitely_supported", true);
    if (v.values.size() != v.points.size()) throw DomainError("one value row per point is required");
    for (const auto& row : v.values)
      if (row.size() != v.background.size()) throw DomainError("value rows must match the background length");
    return v;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed embedding: ") + e.what());
  }
}

inline json embedding_json(const CutEmbedding& phi) {
  json cuts = json::array();
  for (const auto& c : phi.cuts) cuts.push_back({{"weight", c.weight}, {"points", detail::set_to_json(c.set)}});
  json j = {{"cuts", cuts}};
  if (phi.domain) j["domain"] = detail::set_to_json(*phi.domain);
  return j;
}

// ---------------------------------------------------------------------------
// Reports

inline constexpr char kScanHeader[] =
    "family,params,size,h_perim,v_perim_lo,v_perim_hi,ratio_hi,sup_rate,p4_norm";

inline std::string scan_row(const std::string& family, const std::string& params, const PerimeterReport& r) {
  std::ostringstream os;
  os << family << ',' << params << ',' << r.size << ',' << r.h_count << ',' << num(r.v_perimeter.lo) << ','
     << num(r.v_perimeter.hi) << ',' << num(r.ratio.hi) << ',' << num(r.sup_rate) << ',' << num(r.p_norm.hi);
  return os.str();
}

inline json perimeter_json(const PerimeterReport& r) {
  return {{"size", r.size},
          {"h_perim", r.h_count},
          {"z_extent", r.z_extent},
          {"v_counts", std::vector<std::int64_t>(r.v_counts.begin() + (r.v_counts.empty() ? 0 : 1), r.v_counts.end())},
          {"v_perim_lo", r.v_perimeter.lo},
          {"v_perim_hi", r.v_perimeter.hi},
          {"ratio_lo", r.ratio.lo},
          {"ratio_hi", r.ratio.hi},
          {"sup_rate", r.sup_rate},
          {"p", r.p},
          {"p_norm_lo", r.p_norm.lo},
          {"p_norm_hi", r.p_norm.hi}};
}

inline json poincare_json(const Interval& lhs, double rhs, const json& params) {
  const double ratio = rhs > 0 ? lhs.hi / rhs : (lhs.hi > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  return {{"lhs_lo", lhs.lo},
          {"lhs_hi", lhs.hi},
          {"rhs", rhs},
          {"ratio", std::isfinite(ratio) ? json(ratio) : json("inf")},
          {"tail_width", lhs.hi - lhs.lo},
          {"params", params}};
}

inline json certificate_json(const DistortionCertificate& c) {
  json cuts = json::array();
  for (const auto& cw : c.cuts) cuts.push_back({{"mask", cw.mask}, {"weight", cw.weight}});
  return {{"c1", c.c1},
          {"cuts", cuts},
          {"capacity", matrix_json(c.capacity)},
          {"demand", matrix_json(c.demand)},
          {"primal_objective", c.primal_objective},
          {"dual_objective", c.dual_objective}};
}

inline json residuals_json(const SdpResiduals& r) {
  return {{"psd_violation", r.psd_violation},
          {"triangle_violation", r.triangle_violation},
          {"normalization_error", r.normalization_error},
          {"stationarity", r.stationarity}};
}

inline json gap_json(const GapReport& g) {
  return {{"n", g.n},
          {"lp", g.lp},
          {"sdp", g.sdp.objective},
          {"opt", g.opt.value},
          {"gap", g.gap},
          {"residuals", residuals_json(g.sdp.residuals)},
          {"optimal_cut_mask", g.opt.mask}};
}

inline constexpr char kCurveHeader[] = "s,vbar,stderr,trivial_bound";

inline void write_curve_csv(std::ostream& os, const std::vector<VBarPoint>& pts, const std::string& config_hash = {}) {
  if (!config_hash.empty()) os << "# config_hash=" << config_hash << '\n';
  os << kCurveHeader << '\n';
  for (const auto& p : pts)
    os << num(p.s) << ',' << num(p.value) << ',' << num(p.stderr_) << ',' << num(p.trivial_bound) << '\n';
}

inline std::vector<VBarPoint> read_curve_csv(std::istream& in) {
  std::string line;
  if (!detail::next_data_line(in, line) || line != kCurveHeader)
    throw DomainError(std::string("curve file must start with the header ") + kCurveHeader);
  std::vector<VBarPoint> out;
  while (detail::next_data_line(in, line)) {
    const auto f = detail::split(line, ',');
    if (f.size() != 4) throw DomainError("curve row needs 4 fields: " + line);
    out.push_back({detail::to_double(f[0]), detail::to_double(f[1]), detail::to_double(f[2]), detail::to_double(f[3])});
  }
  return out;
}

inline json curve_json(const VBarCurve& c) {
  return {{"r", c.r},
          {"comparability", c.comparability},
          {"grid_points", c.points.size()},
          {"l2", c.l2},
          {"l2_grid", c.l2_grid},
          {"l2_stderr", c.l2_stderr},
          {"tail", c.tail},
          {"cutoff_bound", c.cutoff_bound},
          {"decay_slope", std::isfinite(c.decay_slope) ? json(c.decay_slope) : json(nullptr)}};
}

/// Reads "# config_hash=..." from the first line of a CSV written above.
inline std::string csv_config_hash(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config_hash=", 0) != 0) return {};
  return line.substr(14);
}

}  // namespace heis::io
