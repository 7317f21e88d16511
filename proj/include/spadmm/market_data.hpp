#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spadmm/types.hpp"

namespace spadmm {

/// Historical returns: rows are observation periods, columns are assets.
///
/// Construct through make_returns() or load_returns_csv(), both of which
/// enforce at least two periods, at least two assets and finite entries.
struct ReturnsMatrix {
  Mat values;
  std::vector<std::string> asset_names;

  std::size_t periods() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t assets() const { return static_cast<std::size_t>(values.cols()); }
};

/// Validates and wraps a returns matrix. Empty names are replaced by A0, A1, ...
ReturnsMatrix make_returns(Mat values, std::vector<std::string> asset_names = {});

/// Mean vector and (conditioned) sample covariance of a returns matrix.
struct AssetStats {
  Vec mu;
  Mat cov;
  /// Multiple of the identity added to the raw covariance; zero when none.
  double jitter_applied = 0.0;
  /// Number of periods the statistics were estimated from.
  std::size_t periods = 0;
};

inline constexpr double kDefaultJitterFloor = 1e-10;

/// Column means and the unbiased 1/(m-1) sample covariance.
///
/// If the smallest eigenvalue of the raw covariance does not exceed
/// `jitter_floor`, the diagonal is shifted so the smallest eigenvalue
/// becomes 2 * jitter_floor. The shift is recorded in `jitter_applied`.
AssetStats estimate_stats(const ReturnsMatrix& returns,
                          double jitter_floor = kDefaultJitterFloor);

/// Raw (unconditioned) sample covariance, exposed for diagnostics and tests.
Mat sample_covariance(const Mat& values);

struct SyntheticMarketSpec {
  std::size_t assets = 10;
  std::size_t periods = 200;
  std::uint64_t seed = 0;
  std::size_t factor_count = 3;
  double noise_scale = 0.01;
};

/// Linear factor-model returns: mean + loadings * factors + noise.
///
/// Per-asset drift is drawn uniformly from [0, 0.02]. Output depends only on `spec`,
/// so equal inputs give bitwise-identical matrices.
ReturnsMatrix generate_synthetic_returns(const SyntheticMarketSpec& spec);

ReturnsMatrix load_returns_csv(const std::filesystem::path& path);
ReturnsMatrix parse_returns_csv(std::istream& in);
void write_returns_csv(const ReturnsMatrix& returns, std::ostream& out);
void save_returns_csv(const ReturnsMatrix& returns, const std::filesystem::path& path);

/// Shortest round-trip decimal representation without exponent notation.
std::string format_plain_decimal(double value);

}  // namespace spadmm
