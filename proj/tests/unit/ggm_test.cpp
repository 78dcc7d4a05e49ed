#include "ggmrecon/ggm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ggmrecon/error.hpp"
#include "support/oracles.hpp"

namespace ggmrecon {
namespace {

using testing::dense_precision;

Graph path3() { return Graph::from_edges(3, {{0, 1}, {1, 2}}); }

TEST(Precision, SingleVertex) {
  Eigen::MatrixXd q = precision_matrix(Graph(1), {Eigen::VectorXd::Zero(1), 2.0, 5.0});
  ASSERT_EQ(q.rows(), 1);
  EXPECT_EQ(q(0, 0), 2.0);
}

TEST(Precision, PathGraph) {
  Eigen::MatrixXd q = precision_matrix(path3(), {Eigen::VectorXd::Zero(3), 1.0, 1.0});
  Eigen::Matrix3d expected;
  expected << 2, -1, 0, -1, 3, -1, 0, -1, 2;
  EXPECT_EQ(q, expected);
}

TEST(Precision, CompleteGraphWithScaledCoupling) {
  const std::size_t n = 7;
  const double xi = 0.3;
  const double j = 1.7;
  const double coupling = j / n;
  Eigen::MatrixXd q = precision_matrix(make_complete(n), {Eigen::VectorXd::Zero(n), xi, coupling});
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (Eigen::Index b = 0; b < q.cols(); ++b) {
      double expected = a == b ? xi + (n - 1.0) * j / n : -j / n;
      EXPECT_NEAR(q(a, b), expected, 1e-15);
    }
  }
}

TEST(Precision, MatchesExpandedQuadraticForm) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20; ++round) {
    Graph g = testing::random_graph(1 + rng() % 20, 0.25, rng);
    GgmParams p = testing::random_params(g.size(), rng);
    Eigen::MatrixXd q = precision_matrix(g, p);
    EXPECT_TRUE(q.isApprox(dense_precision(g, p.xi, p.j), 1e-14) || q.size() == 0);
  }
}

TEST(Precision, ZeroPatternIsExactlyNonAdjacency) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    Graph g = testing::random_graph(2 + rng() % 20, 0.3, rng);
    GgmParams p = testing::random_params(g.size(), rng);
    p.j = 0.1 + p.j;  // J > 0 so every edge carries a nonzero entry
    Eigen::MatrixXd q = precision_matrix(g, p);
    for (Vertex a = 0; a < g.size(); ++a) {
      for (Vertex b = 0; b < g.size(); ++b) {
        if (a == b) continue;
        EXPECT_EQ(q(a, b) != 0.0, g.adjacent(a, b)) << a << "," << b;
      }
    }
  }
}

TEST(Params, Validation) {
  Graph g(2);
  EXPECT_THROW(GgmParams({Eigen::VectorXd::Zero(2), 0.0, 1.0}).validate(2), ParameterError);
  EXPECT_THROW(GgmParams({Eigen::VectorXd::Zero(2), 1.0, -0.1}).validate(2), ParameterError);
  EXPECT_THROW(GgmParams({Eigen::VectorXd::Zero(3), 1.0, 0.0}).validate(2), InputError);
  EXPECT_THROW(precision_matrix(g, {Eigen::VectorXd::Zero(2), -1.0, 0.0}), ParameterError);
}

TEST(ExactMoments, IsolatedVertex) {
  auto m = exact_moments(Graph(1), {Eigen::VectorXd::Constant(1, 3.0), 1.5, 4.0});
  EXPECT_NEAR(m.mean()[0], 2.0, 1e-15);
  EXPECT_NEAR(m.covariance(0, 0), 1.0 / 1.5, 1e-15);
}

TEST(ExactMoments, FullyConnectedClosedForm) {
  std::mt19937_64 rng(9);
  for (std::size_t n : {2u, 5u, 17u, 60u}) {
    const double xi = 0.4;
    const double j = 1.3;
    Eigen::VectorXd h = testing::random_vector(n, rng);
    auto m = exact_moments(make_complete(n), {h, xi, j / n});
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      double expected = h[i] / (xi + j) + j / (n * (xi + j) * xi) * h.sum();
      EXPECT_NEAR(m.mean()[i], expected, 1e-12 * (1 + std::abs(expected)));
    }
    double shared = j / (n * (xi + j) * xi);
    EXPECT_NEAR(m.covariance(0, 0), 1.0 / (xi + j) + shared, 1e-12);
    EXPECT_NEAR(m.covariance(1, 0), shared, 1e-12);
  }
}

TEST(ExactMoments, MatchesDenseInverse) {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 30; ++round) {
    Graph g = testing::random_graph(1 + rng() % 10, 0.4, rng);
    GgmParams p = testing::random_params(g.size(), rng);
    Eigen::MatrixXd cov = dense_precision(g, p.xi, p.j).inverse();
    auto m = exact_moments(g, p);
    EXPECT_LT((m.mean() - cov * p.h).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((m.covariance_dense() - cov).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ExactMoments, PermutationEquivariant) {
  std::mt19937_64 rng(17);
  Graph g = testing::random_graph(15, 0.3, rng);
  GgmParams p = testing::random_params(g.size(), rng);
  std::vector<Vertex> perm(g.size());
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<Edge> relabeled;
  for (const auto& e : g.edges()) relabeled.push_back({perm[e.u], perm[e.v]});
  Graph g2 = Graph::from_edges(g.size(), relabeled);
  GgmParams p2 = p;
  for (Vertex i = 0; i < g.size(); ++i) p2.h[perm[i]] = p.h[i];

  auto m1 = exact_moments(g, p);
  auto m2 = exact_moments(g2, p2);
  for (Vertex i = 0; i < g.size(); ++i) EXPECT_NEAR(m2.mean()[perm[i]], m1.mean()[i], 1e-12);
}

TEST(PrecisionFactor, DenseAndSparseBackendsAgree) {
  std::mt19937_64 rng(19);
  Graph g = make_lattice(12, 9);
  GgmParams p = testing::random_params(g.size(), rng);
  auto sparse = factorize_precision(g, p.xi, p.j);
  ASSERT_EQ(sparse.backend(), PrecisionFactor::Backend::Sparse);
  auto dense = PrecisionFactor::dense(dense_precision(g, p.xi, p.j));
  EXPECT_LT((sparse.solve(p.h) - dense.solve(p.h)).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_NEAR(sparse.log_determinant(), dense.log_determinant(), 1e-9);
  EXPECT_NEAR(dense.log_determinant(),
              std::log(dense_precision(g, p.xi, p.j).determinant()), 1e-8);

  auto small = factorize_precision(make_complete(30), p.xi, p.j);
  EXPECT_EQ(small.backend(), PrecisionFactor::Backend::Dense);
}

TEST(PrecisionFactor, RejectsIndefiniteMatrix) {
  Eigen::MatrixXd q(2, 2);
  q << 1, 2, 2, 1;
  EXPECT_THROW(PrecisionFactor::dense(q), NumericalError);
  EXPECT_THROW(PrecisionFactor::sparse(q.sparseView()), NumericalError);
}

TEST(Conditional, EmptyMissingSetIsDegenerate) {
  Observation obs(Eigen::VectorXd::Ones(3), {});
  EXPECT_THROW(conditional_params(path3(), {Eigen::VectorXd::Zero(3), 1, 1}, obs),
               DegenerateInputError);
}

TEST(Conditional, NothingObservedGivesFullSystem) {
  std::mt19937_64 rng(23);
  Graph g = testing::random_graph(8, 0.4, rng);
  GgmParams p = testing::random_params(8, rng);
  Observation obs(testing::random_vector(8, rng), {0, 1, 2, 3, 4, 5, 6, 7});
  auto sys = conditional_params(g, p, obs);
  EXPECT_EQ(sys.bias, p.h);
  EXPECT_TRUE(Eigen::MatrixXd(sys.precision).isApprox(Eigen::MatrixXd(precision_matrix(g, p))));
}

TEST(Conditional, PathMiddleVertex) {
  const double a = 0.7, b = -1.9, xi = 0.6, j = 1.4, h1 = 0.25;
  Observation obs(Eigen::Vector3d(a, 123.0, b), {1});
  auto sys = conditional_params(path3(), {Eigen::Vector3d(9, h1, 9), xi, j}, obs);
  ASSERT_EQ(sys.precision.rows(), 1);
  EXPECT_DOUBLE_EQ(sys.precision.coeff(0, 0), xi + 2 * j);
  EXPECT_DOUBLE_EQ(sys.bias[0], h1 + j * (a + b));
  EXPECT_NEAR(sys.bias[0] / sys.precision.coeff(0, 0), (h1 + j * (a + b)) / (xi + 2 * j), 1e-15);
}

TEST(Conditional, SingleSiteMatchesMeanFieldUpdate) {
  std::mt19937_64 rng(29);
  Graph g = testing::random_graph(12, 0.3, rng);
  GgmParams p = testing::random_params(12, rng);
  Eigen::VectorXd y = testing::random_vector(12, rng);
  for (Vertex i = 0; i < g.size(); ++i) {
    auto sys = conditional_params(g, p, Observation(y, {i}));
    double field = 0.0;
    for (Vertex nb : g.neighbors(i)) field += y[nb];
    double update = (p.h[i] + p.j * field) / (p.xi + g.degree(i) * p.j);
    EXPECT_DOUBLE_EQ(sys.bias[0] / sys.precision.coeff(0, 0), update);
  }
}

TEST(Observation, RejectsBadIndices) {
  EXPECT_THROW(Observation(Eigen::VectorXd::Zero(3), {3}), InputError);
  EXPECT_THROW(Observation(Eigen::VectorXd::Zero(3), {1, 1}), InputError);
  Observation obs(Eigen::VectorXd::Zero(4), {3, 1});
  EXPECT_EQ(std::vector<Vertex>(obs.missing().begin(), obs.missing().end()),
            (std::vector<Vertex>{1, 3}));
  EXPECT_EQ(std::vector<Vertex>(obs.observed().begin(), obs.observed().end()),
            (std::vector<Vertex>{0, 2}));
}

TEST(Sample, IsolatedVertexLawOfLargeNumbers) {
  const double h = 1.2, xi = 0.8;
  const std::size_t count = 20000;
  Eigen::MatrixXd x = sample(Graph(1), {Eigen::VectorXd::Constant(1, h), xi, 0.0}, count, 42);
  double mean = x.col(0).mean();
  double std_error = std::sqrt(1.0 / xi / count);
  EXPECT_NEAR(mean, h / xi, 4 * std_error);
}

void expect_covariance_matches(const Graph& g, const GgmParams& p, std::size_t count,
                               std::uint64_t seed) {
  Eigen::MatrixXd x = sample(g, p, count, seed);
  Eigen::MatrixXd cov = dense_precision(g, p.xi, p.j).inverse();
  Eigen::VectorXd mu = cov * p.h;
  Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
  Eigen::MatrixXd emp = centered.transpose() * centered / static_cast<double>(count);
  for (Eigen::Index a = 0; a < cov.rows(); ++a) {
    EXPECT_NEAR(x.col(a).mean(), mu[a], 5 * std::sqrt(cov(a, a) / count));
    for (Eigen::Index b = 0; b < cov.cols(); ++b) {
      double se = std::sqrt((cov(a, a) * cov(b, b) + cov(a, b) * cov(a, b)) / count);
      EXPECT_NEAR(emp(a, b), cov(a, b), 5 * se) << a << "," << b;
    }
  }
}

TEST(Sample, EmpiricalCovarianceDenseBackend) {
  Graph g = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}});
  expect_covariance_matches(g, {Eigen::VectorXd::LinSpaced(5, -1, 1), 0.5, 0.8}, 40000, 1);
}

TEST(Sample, EmpiricalCovarianceSparseBackend) {
  Graph g = make_lattice(10, 8);
  ASSERT_EQ(factorize_precision(g, 0.5, 0.7).backend(), PrecisionFactor::Backend::Sparse);
  std::mt19937_64 rng(31);
  GgmParams p{testing::random_vector(g.size(), rng), 0.5, 0.7};
  expect_covariance_matches(g, p, 40000, 2);
}

TEST(Sample, DeterministicGivenSeed) {
  Graph g = make_lattice(4, 4);
  GgmParams p{Eigen::VectorXd::Ones(16), 1.0, 0.5};
  Eigen::MatrixXd a = sample(g, p, 50, 99);
  Eigen::MatrixXd b = sample(g, p, 50, 99);
  EXPECT_EQ(a, b);
  Eigen::MatrixXd c = sample(g, p, 50, 100);
  EXPECT_NE(a, c);
}

}  // namespace
}  // namespace ggmrecon
