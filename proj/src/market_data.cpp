#include "spadmm/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>

#include "spadmm/errors.hpp"

namespace spadmm {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

void check_dimensions(std::size_t periods, std::size_t assets) {
  if (periods < 2) {
    throw InputError("returns need at least 2 periods (rows), got " + std::to_string(periods));
  }
  if (assets < 2) {
    throw InputError("returns need at least 2 assets (columns), got " + std::to_string(assets));
  }
}

}  // namespace

ReturnsMatrix make_returns(Mat values, std::vector<std::string> asset_names) {
  check_dimensions(static_cast<std::size_t>(values.rows()), static_cast<std::size_t>(values.cols()));
  if (!values.allFinite()) throw InputError("returns contain non-finite entries");
  const auto n = static_cast<std::size_t>(values.cols());
  if (asset_names.empty()) {
    asset_names.reserve(n);
    for (std::size_t j = 0; j < n; ++j) asset_names.push_back("A" + std::to_string(j));
  }
  if (asset_names.size() != n) {
    throw InputError("expected " + std::to_string(n) + " asset names, got " +
                     std::to_string(asset_names.size()));
  }
  return ReturnsMatrix{std::move(values), std::move(asset_names)};
}

Mat sample_covariance(const Mat& values) {
  const Eigen::RowVectorXd mean = values.colwise().mean();
  const Mat centered = values.rowwise() - mean;
  Mat cov = (centered.transpose() * centered) / static_cast<double>(values.rows() - 1);
  // Symmetrize to remove rounding asymmetry from the product.
  return 0.5 * (cov + cov.transpose());
}

AssetStats estimate_stats(const ReturnsMatrix& returns, double jitter_floor) {
  if (!(jitter_floor >= 0.0)) throw InputError("jitter floor must be nonnegative");
  check_dimensions(returns.periods(), returns.assets());

  AssetStats stats;
  stats.periods = returns.periods();
  stats.mu = returns.values.colwise().mean().transpose();
  stats.cov = sample_covariance(returns.values);

  const Eigen::SelfAdjointEigenSolver<Mat> eig(stats.cov, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig <= jitter_floor) {
    // Zero floor still needs a strictly positive shift.
    const double floor = jitter_floor > 0.0 ? jitter_floor : 1e-300;
    stats.jitter_applied = floor - min_eig + floor;
    stats.cov.diagonal().array() += stats.jitter_applied;
  }
  return stats;
}

ReturnsMatrix generate_synthetic_returns(const SyntheticMarketSpec& spec) {
  if (spec.assets < 2) throw InputError("synthetic market needs at least 2 assets");
  if (spec.periods < 2) throw InputError("synthetic market needs at least 2 periods");
  if (spec.factor_count < 1) throw InputError("synthetic market needs at least 1 factor");
  if (!(spec.noise_scale >= 0.0) || !std::isfinite(spec.noise_scale)) {
    throw InputError("noise scale must be finite and nonnegative");
  }

  const auto n = static_cast<Eigen::Index>(spec.assets);
  const auto m = static_cast<Eigen::Index>(spec.periods);
  const auto f = static_cast<Eigen::Index>(spec.factor_count);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> drift_dist(0.0, 0.02);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vec drift(n);
  for (Eigen::Index i = 0; i < n; ++i) drift(i) = drift_dist(rng);

  constexpr double kLoadingScale = 0.01;
  Mat loadings(n, f);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < f; ++k) loadings(i, k) = kLoadingScale * normal(rng);
  }

  Mat values(m, n);
  Vec factors(f);
  for (Eigen::Index t = 0; t < m; ++t) {
    for (Eigen::Index k = 0; k < f; ++k) factors(k) = normal(rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double noise = spec.noise_scale > 0.0 ? spec.noise_scale * normal(rng) : 0.0;
      values(t, i) = drift(i) + loadings.row(i).dot(factors) + noise;
    }
  }
  return make_returns(std::move(values));
}

ReturnsMatrix parse_returns_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;

  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError("returns CSV is empty: missing header line", 1, 1);
  for (const auto field : split_fields(line)) {
    if (field.empty()) {
      throw ParseError("empty asset name in header at line " + std::to_string(line_no) +
                           ", column " + std::to_string(names.size() + 1),
                       line_no, names.size() + 1);
    }
    names.emplace_back(field);
  }
  const std::size_t n = names.size();

  std::vector<double> flat;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n) {
      throw ParseError("ragged row at line " + std::to_string(line_no) + ": expected " +
                           std::to_string(n) + " fields, got " + std::to_string(fields.size()),
                       line_no, std::min(fields.size(), n) + 1);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double value = 0.0;
      if (!parse_double(fields[j], value)) {
        throw ParseError("non-numeric field '" + std::string(fields[j]) + "' at line " +
                             std::to_string(line_no) + ", column " + std::to_string(j + 1),
                         line_no, j + 1);
      }
      flat.push_back(value);
    }
    ++rows;
  }

  check_dimensions(rows, n);
  Mat values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = flat[r * n + j];
    }
  }
  return make_returns(std::move(values), std::move(names));
}

ReturnsMatrix load_returns_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open returns file '" + path.string() + "'");
  return parse_returns_csv(in);
}

std::string format_plain_decimal(double value) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  if (ec != std::errc()) throw std::runtime_error("cannot format value");
  return std::string(buf, ptr);
}

void write_returns_csv(const ReturnsMatrix& returns, std::ostream& out) {
  for (std::size_t j = 0; j < returns.asset_names.size(); ++j) {
    if (j > 0) out << ',';
    out << returns.asset_names[j];
  }
  out << '\n';
  for (Eigen::Index t = 0; t < returns.values.rows(); ++t) {
    for (Eigen::Index j = 0; j < returns.values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_plain_decimal(returns.values(t, j));
    }
    out << '\n';
  }
}

void save_returns_csv(const ReturnsMatrix& returns, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write returns file '" + path.string() + "'");
  write_returns_csv(returns, out);
  out.flush();
  if (!out) throw InputError("failed writing returns file '" + path.string() + "'");
}

}  // namespace spadmm
