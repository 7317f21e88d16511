#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace spadmm {

enum class LambdaMode { Fixed, AutoInitial, Adaptive };

std::string_view to_string(LambdaMode mode);

/// lambda0 = 1 / (m n) for m observation periods and n assets.
double initial_lambda(std::size_t periods, std::size_t assets);

struct LambdaSchedule {
  double lambda0 = 0.0;
  double lambda_current = 0.0;
  std::size_t sn = 0;  // tolerated number of short positions
  std::size_t adjustments_made = 0;
  std::size_t max_adjustments = 50;
  LambdaMode mode = LambdaMode::Fixed;

  /// Fixed lambda (may be zero); never adjusted.
  static LambdaSchedule fixed(double lambda);
  /// lambda0 = 1/(mn); never adjusted.
  static LambdaSchedule auto_initial(std::size_t periods, std::size_t assets);
  /// Starts at lambda0 > 0 and grows when shorts exceed sn.
  static LambdaSchedule adaptive(double lambda0, std::size_t sn, std::size_t max_adjustments = 50);

  void validate() const;
};

/// Short-sale guard. In adaptive mode with sm > sn and adjustments left,
/// scales lambda by sm / max(sn, 1) and counts the adjustment. Otherwise the
/// schedule is returned unchanged. A factor of exactly 1 (sn = 0, sm = 1) is
/// replaced by 2 so every adjustment strictly increases lambda.
LambdaSchedule maybe_adjust(LambdaSchedule schedule, std::size_t short_count);

}  // namespace spadmm
