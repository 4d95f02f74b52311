#include <gtest/gtest.h>

#include <sstream>

#include "heis/config.hpp"
#include "heis/io.hpp"

using namespace heis;

TEST(Config, RoundTripThroughText) {
  for (const auto& cmd : config::commands()) {
    std::map<std::string, std::string> v;
    for (const auto& k : cmd.keys)
      if (k.fallback.empty()) v[k.name] = k.type == config::Type::kString ? "x" : "3";
    v["seed"] = "42";
    const config::ExperimentConfig cfg(cmd.name, v);
    const auto back = config::parse_one(cfg.serialize());
    EXPECT_EQ(back, cfg) << cmd.name;
    EXPECT_EQ(back.serialize(), cfg.serialize());
    EXPECT_EQ(back.hash(), cfg.hash());
  }
}

TEST(Config, MultipleSectionsAndComments) {
  std::istringstream in("# two runs\n[ball]\nR = 2\n\n[criterion]\nomega = linear:D=2\nR = 100\n");
  const auto all = config::parse(in);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].integer("R"), 2);
  EXPECT_EQ(all[0].str("group"), "h5");
  EXPECT_EQ(all[1].real("c"), 0.5);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config::parse_one("[ball]\nR = 2\nradius = 3\n"), DomainError);
  EXPECT_THROW(config::parse_one("[ball]\ngroup = h3\n"), DomainError);
  EXPECT_THROW(config::parse_one("[ball]\nR = two\n"), DomainError);
  EXPECT_THROW(config::parse_one("[ball]\nR = 2\nR = 3\n"), DomainError);
  EXPECT_THROW(config::parse_one("[nothing]\n"), DomainError);
  EXPECT_THROW(config::parse_one("R = 2\n"), DomainError);
  EXPECT_THROW(config::parse_one("[ball\nR = 2\n"), DomainError);
  EXPECT_THROW(config::parse_one(""), DomainError);
}

TEST(Config, HashIgnoresOnlyPlacementKeys) {
  const config::ExperimentConfig a("vbar", {{"region", "zpos"}});
  const config::ExperimentConfig b("vbar", {{"region", "zpos"}, {"out_dir", "elsewhere"}, {"threads", "3"}});
  const config::ExperimentConfig c("vbar", {{"region", "zpos"}, {"seed", "2"}});
  const config::ExperimentConfig d("vbar", {{"region", "zpos"}, {"streams", "8"}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_NE(a.hash(), d.hash());
  EXPECT_NE(a.serialize(), b.serialize());
}

TEST(Config, SpecParsers) {
  EXPECT_DOUBLE_EQ(config::parse_modulus("linear:D=2")(6), 3);
  EXPECT_DOUBLE_EQ(config::parse_modulus("power:eps=0.5,D=2")(4), 1);
  EXPECT_DOUBLE_EQ(config::parse_modulus("table:1:1,3:2")(2), 1.5);
  EXPECT_THROW(config::parse_modulus("linear:D=2,Q=1"), DomainError);
  EXPECT_DOUBLE_EQ(config::parse_modulus("linear")(5), 5);  // D defaults to 1
  EXPECT_THROW(config::parse_modulus("power:D=2"), DomainError);
  EXPECT_THROW(config::parse_modulus("cubic:D=2"), DomainError);
  EXPECT_EQ(config::parse_set("singleton").size(), 1u);
  EXPECT_EQ(config::parse_set("ball:1").size(), 9u);
  EXPECT_EQ(config::parse_set("segment:4").size(), 4u);
  EXPECT_THROW(config::parse_set("box:1,2"), DomainError);
  EXPECT_THROW(config::parse_set("blob:1"), DomainError);
  const auto slab = config::parse_region("zslab:0.5");
  EXPECT_TRUE(slab({0, 0, 0, 0, 0.25}));
  EXPECT_FALSE(slab({0, 0, 0, 0, 0.75}));
  EXPECT_TRUE(config::parse_region("graph:zero")({0, 1, 0, 0, 0}));
  EXPECT_THROW(config::parse_region("zslab:-1"), DomainError);
  EXPECT_THROW(config::parse_region("sphere"), DomainError);
}

TEST(Io, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3, 2.5651000319910842, -1e-300, 6.02e23}) EXPECT_EQ(io::detail::to_double(io::num(x)), x);
  EXPECT_THROW(io::detail::to_double("1.5x"), DomainError);
  EXPECT_THROW(io::detail::to_int("7.0"), DomainError);
  EXPECT_EQ(io::hex64(io::fnv1a("")), "cbf29ce484222325");  // FNV-1a offset basis
}

TEST(Io, BallDumpsRoundTrip) {
  const auto recs = io::ball_records(word_ball(2));
  std::stringstream text;
  io::write_ball_text(text, recs, "00ff");
  EXPECT_EQ(io::csv_config_hash(text), "00ff");
  text.seekg(0);
  EXPECT_EQ(io::read_ball_text(text), recs);
  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  io::write_ball_binary(bin, recs, "00ff");
  EXPECT_EQ(io::read_ball_binary(bin), recs);
  EXPECT_EQ(recs.front().dist, 0);
  EXPECT_EQ(recs.back().dist, 2);
  const auto h3 = io::ball_records(word_ball<DiscretePoint3>(1));
  EXPECT_EQ(h3.size(), 5u);
  for (const auto& r : h3) EXPECT_EQ(r.p.b, 0);
  std::stringstream junk("HEISBALX");
  EXPECT_THROW(io::read_ball_binary(junk), DomainError);
}

TEST(Io, MetricsInstancesAndSets) {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
  std::stringstream ms;
  io::write_metric(ms, FiniteMetric(d));
  EXPECT_EQ(io::read_metric(ms).dist, d);
  Instance inst{d, Eigen::MatrixXd::Constant(3, 3, 1) - Eigen::MatrixXd::Identity(3, 3)};
  std::stringstream is;
  io::write_instance(is, inst);
  const auto back = io::read_instance(is);
  EXPECT_EQ(back.C, inst.C);
  EXPECT_EQ(back.D, inst.D);
  std::stringstream ss;
  const auto set = config::parse_set("box:2,1,2,1,3");
  io::write_lattice_set(ss, set);
  EXPECT_EQ(io::read_lattice_set(ss).keys(), set.keys());
  std::stringstream short_rows("3\n0 1 2\n1 0\n");
  EXPECT_THROW(io::read_metric(short_rows), DomainError);
}

TEST(Io, EmbeddingJson) {
  CutEmbedding phi{{{0.5, config::parse_set("ball:1")}, {2.0, config::parse_set("segment:3")}}, {}};
  const auto back = io::parse_embedding(io::embedding_json(phi));
  ASSERT_TRUE(std::holds_alternative<CutEmbedding>(back));
  const auto& c = std::get<CutEmbedding>(back);
  ASSERT_EQ(c.cuts.size(), 2u);
  EXPECT_EQ(c.cuts[1].weight, 2.0);
  EXPECT_EQ(c.cuts[0].set.keys(), phi.cuts[0].set.keys());
  const auto vec = io::parse_embedding(io::json::parse(
      R"({"points": [[0,0,0,0,0],[1,0,0,0,0]], "values": [[1,2],[3,4]], "background": [0,0]})"));
  ASSERT_TRUE(std::holds_alternative<VectorEmbedding>(vec));
  EXPECT_EQ(std::get<VectorEmbedding>(vec).values[1][0], 3.0);
  EXPECT_THROW(io::parse_embedding(io::json::parse(R"({"cuts": [{"weight": -1, "points": []}]})")), DomainError);
  EXPECT_THROW(io::parse_embedding(io::json::parse(R"({"points": [[0,0,0]], "values": [[1]], "background": [0]})")),
               DomainError);
}

TEST(Io, CurveCsvRoundTrip) {
  std::vector<VBarPoint> pts{{-1, 0.25, 0.01, 3.5}, {-0.75, 1.0 / 3, 0.02, 2.9}};
  std::stringstream s;
  io::write_curve_csv(s, pts, "abc");
  EXPECT_EQ(io::csv_config_hash(s), "abc");
  s.seekg(0);
  const auto back = io::read_curve_csv(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].value, 1.0 / 3);
  EXPECT_EQ(back[0].trivial_bound, 3.5);
}
