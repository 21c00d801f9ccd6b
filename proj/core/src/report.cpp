#include "metallab/report.hpp"

#include <cmath>

namespace metallab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skipped: return "skipped";
  }
  return "unknown";
}

void ResidualTally::add(double residual, std::size_t sample_index, const Vec& point, std::string detail) {
  ++applicable_;
  if (std::isnan(residual)) {
    nan_seen_ = true;
    worst_ = WorstSample{sample_index, point, "NaN residual: " + detail};
    return;
  }
  sum_ += residual;
  if (!worst_ || residual > max_) {
    max_ = residual;
    if (!nan_seen_) worst_ = WorstSample{sample_index, point, std::move(detail)};
  }
}

CheckReport ResidualTally::finish(std::string note) const {
  CheckReport r;
  r.check_id = check_id_;
  r.scenario = scenario_;
  r.samples = samples_;
  r.applicable = applicable_;
  r.max_residual = nan_seen_ ? std::nan("") : max_;
  r.mean_residual = applicable_ == 0 ? 0.0 : sum_ / static_cast<double>(applicable_);
  r.tolerance = tolerance_;
  r.verdict = (!nan_seen_ && max_ < tolerance_) ? Verdict::Pass : Verdict::Fail;
  r.note = std::move(note);
  r.worst = worst_;
  return r;
}

CheckReport skipped_report(std::string check_id, std::string scenario, std::string reason) {
  CheckReport r;
  r.check_id = std::move(check_id);
  r.scenario = std::move(scenario);
  r.verdict = Verdict::Skipped;
  r.note = std::move(reason);
  return r;
}

}  // namespace metallab
