#include "ggmrecon/io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "support/oracles.hpp"

namespace ggmrecon::io {
namespace {

namespace fs = std::filesystem;

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in, "g.txt");
}

template <typename F>
ParseError capture(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError thrown";
  return ParseError("", 0, 0, "");
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "ggmrecon_io_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(GraphFile, ParsesWithCommentsAndBlankLines) {
  Graph g = parse("# path\n\nn 4\ne 0 1\n  # mid\ne 2 1\ne 3 2\n");
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(testing::edge_set(g), (std::set<std::pair<Vertex, Vertex>>{{0, 1}, {1, 2}, {2, 3}}));
}

TEST(GraphFile, SelfLoopNamesLineAndColumn) {
  auto e = capture([] { parse("n 3\ne 0 0\n"); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 3u);
  EXPECT_NE(std::string(e.what()).find("g.txt:2:3"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
}

TEST(GraphFile, DuplicateCitesBothLines) {
  auto e = capture([] { parse("n 3\ne 0 1\ne 1 2\ne 1 0\n"); });
  EXPECT_EQ(e.line(), 4u);
  EXPECT_NE(std::string(e.what()).find("first given on line 2"), std::string::npos);
}

TEST(GraphFile, RejectsMalformedInput) {
  EXPECT_EQ(capture([] { parse("e 0 1\n"); }).line(), 1u);
  EXPECT_EQ(capture([] { parse(""); }).line(), 1u);
  EXPECT_EQ(capture([] { parse("n 2\ne 0 2\n"); }).column(), 5u);
  EXPECT_EQ(capture([] { parse("n 2\ne 0\n"); }).line(), 2u);
  EXPECT_EQ(capture([] { parse("n 2\nv 0 1\n"); }).line(), 2u);
  EXPECT_EQ(capture([] { parse("n two\n"); }).column(), 3u);
  EXPECT_EQ(capture([] { parse("n 3\ne 0 -1\n"); }).column(), 5u);
}

TEST(GraphFile, RoundTripsRandomGraphs) {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 50; ++round) {
    Graph g = testing::random_graph(1 + rng() % 40, 0.2, rng);
    std::ostringstream out;
    write_graph(out, g);
    Graph back = parse(out.str());
    EXPECT_EQ(back.size(), g.size());
    EXPECT_TRUE(std::ranges::equal(back.edges(), g.edges()));
    std::ostringstream again;
    write_graph(again, back);
    EXPECT_EQ(again.str(), out.str());
  }
}

TEST(RoadFile, BuildsTheTwoIntersectionGraph) {
  std::istringstream in(
      "road 1\nroad 2\nroad 3\nroad 4\nroad 5\nroad 6\n"
      "x 1 2 3 4\n"
      "x 3 4 5 6\n");
  Graph g = build_road_graph(parse_road_network(in));
  EXPECT_EQ(g.edge_count(), 11u);
  EXPECT_TRUE(g.adjacent(2, 3));
  EXPECT_FALSE(g.adjacent(0, 4));
}

TEST(RoadFile, RejectsMalformedInput) {
  std::istringstream late("road a\nx a b\nroad b\n");
  EXPECT_EQ(capture([&] { parse_road_network(late); }).line(), 3u);
  std::istringstream lonely("road a\nx a\n");
  EXPECT_EQ(capture([&] { parse_road_network(lonely); }).line(), 2u);
  std::istringstream junk("road a\nstreet b\n");
  EXPECT_EQ(capture([&] { parse_road_network(junk); }).line(), 2u);
}

TEST(ParamsFile, RoundTripsBitExactly) {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 20; ++round) {
    GgmParams p = testing::random_params(1 + rng() % 30, rng);
    p.h[0] = 0.1;
    p.xi = std::nextafter(1.0, 2.0);
    std::stringstream buf;
    write_params(buf, p);
    GgmParams back = parse_params(buf);
    EXPECT_EQ(std::memcmp(&back.xi, &p.xi, sizeof p.xi), 0);
    EXPECT_EQ(std::memcmp(&back.j, &p.j, sizeof p.j), 0);
    ASSERT_EQ(back.h.size(), p.h.size());
    for (Eigen::Index i = 0; i < p.h.size(); ++i) EXPECT_EQ(back.h[i], p.h[i]);
  }
}

TEST(ParamsFile, RejectsMissingFields) {
  std::istringstream no_j(R"({"xi": 1, "h": [0]})");
  EXPECT_THROW(parse_params(no_j), InputError);
  std::istringstream broken(R"({"xi": 1,)");
  EXPECT_THROW(parse_params(broken), InputError);
  std::istringstream wrong_type(R"({"xi": 1, "j": 0, "h": "zero"})");
  EXPECT_THROW(parse_params(wrong_type), InputError);
}

TEST(MatrixCsv, RoundTripsBitExactly) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(7, 5);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = gauss(rng) * std::pow(10.0, r - 3);
  }
  m(0, 0) = -0.0;
  m(1, 1) = 5e-324;
  std::stringstream buf;
  write_matrix_csv(buf, m);
  EXPECT_EQ(buf.str().substr(0, 15), "x0,x1,x2,x3,x4\n");
  Eigen::MatrixXd back = parse_matrix_csv(buf);
  ASSERT_EQ(back.rows(), m.rows());
  ASSERT_EQ(back.cols(), m.cols());
  EXPECT_EQ(std::memcmp(back.data(), m.data(), sizeof(double) * m.size()), 0);
}

TEST(MatrixCsv, RejectsRaggedAndNonFiniteRows) {
  std::istringstream ragged("x0,x1\n1,2\n3\n");
  EXPECT_EQ(capture([&] { parse_matrix_csv(ragged); }).line(), 3u);
  std::istringstream nan("x0,x1\n1,nan\n");
  auto e = capture([&] { parse_matrix_csv(nan); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 3u);
  std::istringstream empty("");
  EXPECT_THROW(parse_matrix_csv(empty), ParseError);
  std::istringstream huge("x0\n1e999\n");
  EXPECT_THROW(parse_matrix_csv(huge), ParseError);
  std::istringstream header_only("x0\n");
  EXPECT_EQ(parse_matrix_csv(header_only).rows(), 0);
}

TEST(IndexFile, ParsesOnePerLine) {
  std::istringstream in("# missing\n3\n 0\n7\n");
  EXPECT_EQ(parse_index_list(in), (std::vector<Vertex>{3, 0, 7}));
  std::istringstream two("1 2\n");
  EXPECT_EQ(capture([&] { parse_index_list(two); }).column(), 3u);
  std::istringstream neg("-1\n");
  EXPECT_THROW(parse_index_list(neg), ParseError);
}

TEST(Digest, KnownVectors) {
  auto path = scratch("abc.txt");
  {
    std::ofstream out(path, std::ios::binary);
    out << "abc";
  }
  EXPECT_EQ(file_digest(path), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
  }
  EXPECT_EQ(file_digest(path), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_THROW(file_digest(scratch("does-not-exist")), InputError);
}

TEST(Manifest, WritesSiblingJson) {
  auto out = scratch("result.csv");
  RunManifest m{"sample", {{"count", "10"}, {"graph", "g.txt"}}, {{"g.txt", "00ff"}}, 42, "0.1.0"};
  write_manifest(out, m);
  std::ifstream in(out.string() + ".manifest.json");
  ASSERT_TRUE(in);
  auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["subcommand"], "sample");
  EXPECT_EQ(doc["flags"]["count"], "10");
  EXPECT_EQ(doc["input_digests"]["g.txt"], "00ff");
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_EQ(doc["version"], "0.1.0");

  m.seed.reset();
  EXPECT_TRUE(nlohmann::json::parse(m.to_json())["seed"].is_null());
}

TEST(FormatDouble, UsesSeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace ggmrecon::io
