#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "sketch_infer/core_model.hpp"

namespace sketch_infer {

enum class SketchKind { Gaussian, Hadamard, ClarksonWoodruff };

std::string_view to_string(SketchKind kind);
/// Accepts "gaussian", "hadamard", "clarkson_woodruff" (also "srht", "countsketch", "cw").
SketchKind parse_sketch_kind(std::string_view name);

struct SketchSpec {
  SketchKind kind = SketchKind::Gaussian;
  int k = 1;
  std::uint64_t seed = 0;
};

struct SketchedData {
  Eigen::MatrixXd Xs;                    // k×p
  Eigen::VectorXd ys;                    // k
  std::optional<Eigen::MatrixXd> W_star; // S Sᵀ, k×k
  SketchSpec spec;
  int n = 0;
  int p = 0;

  int k() const { return static_cast<int>(Xs.rows()); }
};

/// S_ij ~ N(0, 1/k), generated and applied in column blocks of S to [y | X].
SketchedData apply_gaussian(const DataSet& data, const SketchSpec& spec, bool want_w_star);
/// Subsampled randomized Hadamard transform: zero-pad to n' = 2^m, random signs,
/// normalized Walsh–Hadamard transform, k rows without replacement, scale √(n'/k).
SketchedData apply_hadamard(const DataSet& data, const SketchSpec& spec, bool want_w_star);
/// CountSketch: row i goes to bucket h(i) with sign σ(i); unscaled.
SketchedData apply_clarkson_woodruff(const DataSet& data, const SketchSpec& spec, bool want_w_star);

SketchedData apply_sketch(const DataSet& data, const SketchSpec& spec, bool want_w_star);

/// Same as apply_sketch on raw arrays; skips the DataSet rank check so the
/// simulation harness can sketch a fresh response against a fixed, already
/// validated design.
SketchedData apply_sketch(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SketchSpec& spec,
                          bool want_w_star);

}  // namespace sketch_infer
