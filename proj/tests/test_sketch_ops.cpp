#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"
#include "sketch_infer/estimators.hpp"
#include "sketch_infer/ks.hpp"
#include "sketch_infer/rng.hpp"
#include "sketch_infer/sketch_ops.hpp"

using namespace sketch_infer;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  Eigen::MatrixXd a(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) a(i, j) = draw_normal(eng);
  return a;
}

const SketchKind kAllKinds[] = {SketchKind::Gaussian, SketchKind::Hadamard, SketchKind::ClarksonWoodruff};

}  // namespace

TEST_CASE("sketch names") {
  CHECK(parse_sketch_kind("gaussian") == SketchKind::Gaussian);
  CHECK(parse_sketch_kind("srht") == SketchKind::Hadamard);
  CHECK(parse_sketch_kind("countsketch") == SketchKind::ClarksonWoodruff);
  CHECK(to_string(SketchKind::ClarksonWoodruff) == "clarkson_woodruff");
  try {
    parse_sketch_kind("fourier");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("gaussian") != std::string::npos);
  }
}

TEST_CASE("expected sketched gram matrix") {
  const int n = 50, p = 2, k = 10, m = 10000;
  const Eigen::MatrixXd X = random_matrix(n, p, 1);
  const DataSet data(X, random_matrix(n, 1, 2));
  const Eigen::MatrixXd G = X.transpose() * X;
  for (SketchKind kind : kAllKinds) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(p, p), sumsq = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < m; ++i) {
      const SketchedData sk = apply_sketch(data, {kind, k, derive_seed(3, "s", i)}, false);
      const Eigen::MatrixXd g = sk.Xs.transpose() * sk.Xs;
      sum += g;
      sumsq += g.cwiseProduct(g);
    }
    const Eigen::MatrixXd mean = sum / m;
    const Eigen::MatrixXd var = (sumsq / m - mean.cwiseProduct(mean)) * (double(m) / (m - 1));
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        CAPTURE(to_string(kind));
        CHECK(std::abs(mean(a, b) - G(a, b)) < 3 * std::sqrt(var(a, b) / m));
      }
  }
}

TEST_CASE("hadamard preserves a constant column in expectation") {
  const int n = 64, k = 8, m = 4000;
  Eigen::MatrixXd X(n, 2);
  X.col(0).setOnes();
  X.col(1) = random_matrix(n, 1, 4);
  const DataSet data(X, X.col(1));
  double sum = 0, sumsq = 0;
  for (int i = 0; i < m; ++i) {
    const double v = apply_hadamard(data, {SketchKind::Hadamard, k, derive_seed(4, "s", i)}, false).Xs.col(0).squaredNorm();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / m, se = std::sqrt((sumsq / m - mean * mean) / m);
  CHECK(std::abs(mean - n) < 3 * se + 1e-9);
}

TEST_CASE("square gaussian sketch reproduces the full fit") {
  // S invertible: the whitened fit undoes S exactly, the plain sketched fit is
  // weighted least squares with weight SᵀS and only matches in exact-fit cases
  const int n = 12, p = 3;
  const Eigen::MatrixXd X = random_matrix(n, p, 5);
  const DataSet data(X, random_matrix(n, 1, 6));
  const SketchedData sk = apply_gaussian(data, {SketchKind::Gaussian, n, 7}, true);
  const FullFit full = fit_full(data);
  CHECK((fit_efficient_star(sk).beta - full.beta_F).norm() < 1e-8 * full.beta_F.norm());
  const Eigen::Vector3d b(1, -1, 2);
  const SketchedData exact = apply_gaussian(DataSet(X, X * b), {SketchKind::Gaussian, n, 7}, false);
  CHECK((fit_complete(exact).beta - b).norm() < 1e-8);
}

TEST_CASE("sketching is deterministic in the seed") {
  const DataSet data(random_matrix(40, 3, 8), random_matrix(40, 1, 9));
  for (SketchKind kind : kAllKinds) {
    const SketchedData a = apply_sketch(data, {kind, 10, 77}, true);
    const SketchedData b = apply_sketch(data, {kind, 10, 77}, true);
    const SketchedData c = apply_sketch(data, {kind, 10, 78}, true);
    CAPTURE(to_string(kind));
    CHECK(a.Xs == b.Xs);
    CHECK(a.ys == b.ys);
    CHECK(*a.W_star == *b.W_star);
    CHECK(a.Xs != c.Xs);
  }
}

TEST_CASE("output shape ignores padding") {
  const DataSet data(random_matrix(3, 1, 10), random_matrix(3, 1, 11));
  const SketchedData sk = apply_hadamard(data, {SketchKind::Hadamard, 2, 1}, false);
  CHECK(sk.Xs.rows() == 2);
  CHECK(sk.Xs.cols() == 1);
  CHECK(sk.ys.size() == 2);
  // k above the padded length is rejected
  CHECK_THROWS_AS(apply_hadamard(data, {SketchKind::Hadamard, 5, 1}, false), Error);
}

TEST_CASE("countsketch of a single row") {
  Eigen::MatrixXd X(1, 2);
  X << 3.0, -1.5;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 2.0);
  const SketchedData sk = apply_sketch(X, y, {SketchKind::ClarksonWoodruff, 4, 5}, false);
  int nonzero = 0;
  for (int i = 0; i < 4; ++i) {
    if (sk.Xs.row(i).norm() == 0.0) continue;
    ++nonzero;
    CHECK((sk.Xs.row(i) == X.row(0) || sk.Xs.row(i) == -X.row(0)));
    CHECK(std::abs(sk.ys(i)) == 2.0);
  }
  CHECK(nonzero == 1);
}

TEST_CASE("zero column stays zero") {
  Eigen::MatrixXd X = random_matrix(30, 3, 12);
  X.col(1).setZero();
  const Eigen::VectorXd y = random_matrix(30, 1, 13);
  for (SketchKind kind : kAllKinds) {
    const SketchedData sk = apply_sketch(X, y, {kind, 8, 14}, false);
    CHECK(sk.Xs.col(1).norm() == 0.0);
  }
}

TEST_CASE("linearity across columns") {
  const int n = 33;
  const Eigen::MatrixXd X = random_matrix(n, 2, 15);
  const Eigen::VectorXd y = random_matrix(n, 1, 16);
  Eigen::MatrixXd Xy(n, 3);
  Xy << y, X;
  const Eigen::VectorXd y2 = X.col(0) + 2 * y;
  for (SketchKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    const SketchedData a = apply_sketch(X, y, {kind, 9, 17}, false);
    const SketchedData b = apply_sketch(Xy, X.col(1), {kind, 9, 17}, false);
    CHECK((b.Xs.col(0) - a.ys).norm() <= 1e-12 * a.ys.norm());
    CHECK((b.Xs.rightCols(2) - a.Xs).norm() <= 1e-12 * a.Xs.norm());
    const SketchedData c = apply_sketch(X, y2, {kind, 9, 17}, false);
    CHECK((c.ys - (a.Xs.col(0) + 2 * a.ys)).norm() <= 1e-12 * c.ys.norm());
  }
}

TEST_CASE("gaussian gram diagonal is chi-square over k") {
  const int n = 40, k = 10;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, 2, 18));
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 2);
  const DataSet data(Q, random_matrix(n, 1, 19));
  std::vector<double> d0, d1;
  for (int i = 0; i < 10000; ++i) {
    const SketchedData sk = apply_gaussian(data, {SketchKind::Gaussian, k, derive_seed(5, "s", i)}, false);
    d0.push_back(k * sk.Xs.col(0).squaredNorm());
    d1.push_back(k * sk.Xs.col(1).squaredNorm());
  }
  auto cdf = [&](double x) { return dist_cdf(Chi2{double(k)}, x); };
  CHECK(ks_statistic(d0, cdf).statistic < 0.02);
  CHECK(ks_statistic(d1, cdf).statistic < 0.02);
}

TEST_CASE("w_star is symmetric positive definite") {
  const DataSet data(random_matrix(200, 2, 20), random_matrix(200, 1, 21));
  for (SketchKind kind : kAllKinds) {
    const SketchedData sk = apply_sketch(data, {kind, 12, 22}, true);
    REQUIRE(sk.W_star.has_value());
    const Eigen::MatrixXd& W = *sk.W_star;
    CHECK(W.rows() == 12);
    CHECK((W - W.transpose()).norm() < 1e-12 * W.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W).eigenvalues().minCoeff() > 0.0);
    CHECK_FALSE(apply_sketch(data, {kind, 12, 22}, false).W_star.has_value());
  }
  // countsketch W★ counts rows per bucket
  const SketchedData cw = apply_sketch(data, {SketchKind::ClarksonWoodruff, 5, 23}, true);
  CHECK(cw.W_star->diagonal().sum() == doctest::Approx(200.0));
  CHECK((cw.W_star->diagonal().asDiagonal().toDenseMatrix() - *cw.W_star).norm() == 0.0);
}

TEST_CASE("countsketch with an empty bucket has no w_star") {
  const Eigen::MatrixXd X = random_matrix(3, 1, 26);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    try {
      apply_sketch(X, X.col(0), {SketchKind::ClarksonWoodruff, 3, seed}, true);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPositiveDefinite);
      ++hits;
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("w_star paths reject k above n") {
  const DataSet data(random_matrix(8, 2, 24), random_matrix(8, 1, 25));
  CHECK_THROWS_AS(apply_gaussian(data, {SketchKind::Gaussian, 9, 1}, true), Error);
  CHECK_NOTHROW(apply_gaussian(data, {SketchKind::Gaussian, 9, 1}, false));
}
