#include "spadmm/lambda_controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spadmm/errors.hpp"

namespace spadmm {

std::string_view to_string(LambdaMode mode) {
  switch (mode) {
    case LambdaMode::Fixed: return "fixed";
    case LambdaMode::AutoInitial: return "auto-initial";
    case LambdaMode::Adaptive: return "adaptive";
  }
  return "unknown";
}

double initial_lambda(std::size_t periods, std::size_t assets) {
  if (periods < 2 || assets < 2) {
    throw InputError("initial lambda needs m >= 2 and n >= 2, got m = " + std::to_string(periods) +
                     ", n = " + std::to_string(assets));
  }
  return 1.0 / (static_cast<double>(periods) * static_cast<double>(assets));
}

LambdaSchedule LambdaSchedule::fixed(double lambda) {
  LambdaSchedule s;
  s.lambda0 = lambda;
  s.lambda_current = lambda;
  s.mode = LambdaMode::Fixed;
  s.validate();
  return s;
}

LambdaSchedule LambdaSchedule::auto_initial(std::size_t periods, std::size_t assets) {
  LambdaSchedule s;
  s.lambda0 = initial_lambda(periods, assets);
  s.lambda_current = s.lambda0;
  s.mode = LambdaMode::AutoInitial;
  return s;
}

LambdaSchedule LambdaSchedule::adaptive(double lambda0, std::size_t sn, std::size_t max_adjustments) {
  LambdaSchedule s;
  s.lambda0 = lambda0;
  s.lambda_current = lambda0;
  s.sn = sn;
  s.max_adjustments = max_adjustments;
  s.mode = LambdaMode::Adaptive;
  s.validate();
  return s;
}

void LambdaSchedule::validate() const {
  if (!std::isfinite(lambda_current) || lambda_current < 0.0) {
    throw InputError("lambda must be finite and nonnegative");
  }
  if (mode == LambdaMode::Adaptive && !(lambda_current > 0.0)) {
    throw InputError("adaptive lambda needs a positive starting value");
  }
  if (adjustments_made > max_adjustments) {
    throw InputError("lambda adjustments exceed max_adjustments");
  }
}

LambdaSchedule maybe_adjust(LambdaSchedule schedule, std::size_t short_count) {
  if (schedule.mode != LambdaMode::Adaptive) return schedule;
  if (short_count <= schedule.sn || schedule.adjustments_made >= schedule.max_adjustments) {
    return schedule;
  }
  const double denom = static_cast<double>(std::max<std::size_t>(schedule.sn, 1));
  double factor = static_cast<double>(short_count) / denom;
  if (factor <= 1.0) factor = 2.0;
  schedule.lambda_current *= factor;
  ++schedule.adjustments_made;
  return schedule;
}

}  // namespace spadmm
