#include "sketch_infer/sketch_ops.hpp"

#include <algorithm>
#include <bit>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sketch_infer/distributions.hpp"
#include "sketch_infer/error.hpp"

namespace sketch_infer {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Eigen::Index kGaussianBlock = 256;

Eigen::MatrixXd stack(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::MatrixXd z(X.rows(), X.cols() + 1);
  z.col(0) = y;
  z.rightCols(X.cols()) = X;
  return z;
}

SketchedData unstack(const Eigen::MatrixXd& out, const SketchSpec& spec, int n, int p) {
  SketchedData sk;
  sk.ys = out.col(0);
  sk.Xs = out.rightCols(p);
  sk.spec = spec;
  sk.n = n;
  sk.p = p;
  return sk;
}

void check_common(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SketchSpec& spec, bool want_w_star) {
  require(X.rows() == y.size(), ErrorCode::DimensionMismatch, "X rows differ from y length");
  require(X.cols() >= 1 && X.rows() >= 1, ErrorCode::DimensionMismatch, "empty design");
  require(spec.k >= 1, ErrorCode::DimensionMismatch, "sketch size k must be >= 1");
  require(!want_w_star || spec.k <= X.rows(), ErrorCode::DimensionMismatch,
          "W* requires k <= n (k=" + std::to_string(spec.k) + ", n=" + std::to_string(X.rows()) + ")");
}

SketchedData gaussian(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SketchSpec& spec, bool want) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = spec.k;
  const Eigen::MatrixXd z = stack(X, y);
  Engine engine = make_engine(spec.seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(k));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, z.cols());
  Eigen::MatrixXd w;
  if (want) w = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd block(k, kGaussianBlock);
  for (Eigen::Index c0 = 0; c0 < n; c0 += kGaussianBlock) {
    const Eigen::Index width = std::min(kGaussianBlock, n - c0);
    auto s = block.leftCols(width);
    for (Eigen::Index c = 0; c < width; ++c)
      for (Eigen::Index r = 0; r < k; ++r) s(r, c) = sd * draw_normal(engine);
    out.noalias() += s * z.middleRows(c0, width);
    if (want) w.selfadjointView<Eigen::Lower>().rankUpdate(s);
  }
  SketchedData sk = unstack(out, spec, static_cast<int>(n), static_cast<int>(X.cols()));
  if (want) sk.W_star = Eigen::MatrixXd(w.selfadjointView<Eigen::Lower>());
  return sk;
}

void fwht_rows(RowMatrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index w = a.cols();
  double* base = a.data();
  for (Eigen::Index h = 1; h < m; h <<= 1) {
    for (Eigen::Index i = 0; i < m; i += 2 * h) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        double* u = base + j * w;
        double* v = base + (j + h) * w;
        for (Eigen::Index c = 0; c < w; ++c) {
          const double t = u[c];
          u[c] = t + v[c];
          v[c] = t - v[c];
        }
      }
    }
  }
  a *= 1.0 / std::sqrt(static_cast<double>(m));
}

SketchedData hadamard(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SketchSpec& spec, bool want) {
  const Eigen::Index n = X.rows();
  const Eigen::Index n_pad = static_cast<Eigen::Index>(std::bit_ceil(static_cast<std::uint64_t>(n)));
  const Eigen::Index k = spec.k;
  require(k <= n_pad, ErrorCode::DimensionMismatch,
          "Hadamard sketch samples without replacement, so k must be <= padded n " + std::to_string(n_pad));
  Engine engine = make_engine(spec.seed);
  RowMatrix a = RowMatrix::Zero(n_pad, X.cols() + 1);
  a.topRows(n) = stack(X, y);
  boost::random::bernoulli_distribution<double> coin(0.5);
  for (Eigen::Index i = 0; i < n; ++i)
    if (coin(engine)) a.row(i) *= -1.0;
  fwht_rows(a);
  // Partial Fisher–Yates for k distinct rows.
  std::vector<Eigen::Index> idx(n_pad);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    boost::random::uniform_int_distribution<Eigen::Index> pick(i, n_pad - 1);
    std::swap(idx[i], idx[pick(engine)]);
  }
  const double scale = std::sqrt(static_cast<double>(n_pad) / static_cast<double>(k));
  Eigen::MatrixXd out(k, X.cols() + 1);
  for (Eigen::Index i = 0; i < k; ++i) out.row(i) = scale * a.row(idx[i]);
  SketchedData sk = unstack(out, spec, static_cast<int>(n), static_cast<int>(X.cols()));
  if (want) {
    // Signs cancel in S Sᵀ; only the sampled Hadamard rows restricted to the
    // first n coordinates matter.
    Eigen::MatrixXd w(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i; j < k; ++j) {
        const std::uint64_t diff = static_cast<std::uint64_t>(idx[i] ^ idx[j]);
        long acc = 0;
        for (Eigen::Index c = 0; c < n; ++c) acc += (std::popcount(diff & static_cast<std::uint64_t>(c)) & 1) ? -1 : 1;
        w(i, j) = w(j, i) = static_cast<double>(acc) / static_cast<double>(k);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(w);
    require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, "Hadamard W* is singular");
    sk.W_star = std::move(w);
  }
  return sk;
}

SketchedData count_sketch(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SketchSpec& spec, bool want) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = spec.k;
  Engine engine = make_engine(spec.seed);
  boost::random::uniform_int_distribution<Eigen::Index> bucket(0, k - 1);
  boost::random::bernoulli_distribution<double> coin(0.5);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, X.cols() + 1);
  std::vector<long> counts(k, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index b = bucket(engine);
    const double sign = coin(engine) ? -1.0 : 1.0;
    out(b, 0) += sign * y(i);
    out.row(b).tail(X.cols()) += sign * X.row(i);
    ++counts[b];
  }
  SketchedData sk = unstack(out, spec, static_cast<int>(n), static_cast<int>(X.cols()));
  if (want) {
    require(std::all_of(counts.begin(), counts.end(), [](long c) { return c > 0; }),
            ErrorCode::NotPositiveDefinite, "CountSketch left a bucket empty, so W* is singular");
    Eigen::VectorXd d(k);
    for (Eigen::Index b = 0; b < k; ++b) d(b) = static_cast<double>(counts[b]);
    sk.W_star = Eigen::MatrixXd(d.asDiagonal());
  }
  return sk;
}

}  // namespace

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::Hadamard: return "hadamard";
    case SketchKind::ClarksonWoodruff: return "clarkson_woodruff";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "gaussian") return SketchKind::Gaussian;
  if (name == "hadamard" || name == "srht") return SketchKind::Hadamard;
  if (name == "clarkson_woodruff" || name == "countsketch" || name == "cw") return SketchKind::ClarksonWoodruff;
  fail(ErrorCode::ParseError,
       "unknown sketch '" + std::string(name) + "' (valid: gaussian, hadamard, clarkson_woodruff)");
}

SketchedData apply_sketch(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SketchSpec& spec,
                          bool want_w_star) {
  check_common(X, y, spec, want_w_star);
  switch (spec.kind) {
    case SketchKind::Gaussian: return gaussian(X, y, spec, want_w_star);
    case SketchKind::Hadamard: return hadamard(X, y, spec, want_w_star);
    case SketchKind::ClarksonWoodruff: return count_sketch(X, y, spec, want_w_star);
  }
  fail(ErrorCode::DomainError, "unknown sketch kind");
}

SketchedData apply_sketch(const DataSet& data, const SketchSpec& spec, bool want_w_star) {
  return apply_sketch(data.X(), data.y(), spec, want_w_star);
}

SketchedData apply_gaussian(const DataSet& data, const SketchSpec& spec, bool want_w_star) {
  require(spec.kind == SketchKind::Gaussian, ErrorCode::DomainError, "apply_gaussian needs a Gaussian spec");
  return apply_sketch(data, spec, want_w_star);
}

SketchedData apply_hadamard(const DataSet& data, const SketchSpec& spec, bool want_w_star) {
  require(spec.kind == SketchKind::Hadamard, ErrorCode::DomainError, "apply_hadamard needs a Hadamard spec");
  return apply_sketch(data, spec, want_w_star);
}

SketchedData apply_clarkson_woodruff(const DataSet& data, const SketchSpec& spec, bool want_w_star) {
  require(spec.kind == SketchKind::ClarksonWoodruff, ErrorCode::DomainError,
          "apply_clarkson_woodruff needs a ClarksonWoodruff spec");
  return apply_sketch(data, spec, want_w_star);
}

}  // namespace sketch_infer
