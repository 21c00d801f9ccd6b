#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "metallab/numlin.hpp"

namespace metallab {

enum class Verdict { Pass, Fail, Skipped };

std::string to_string(Verdict v);

struct WorstSample {
  std::size_t sample_index = 0;
  Vec point;
  std::string detail;
};

/// Residual statistics of one identity over a set of samples.
struct CheckReport {
  std::string check_id;
  std::string scenario;
  std::size_t samples = 0;
  /// Samples on which the identity's hypothesis held and it was evaluated.
  std::size_t applicable = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string note;
  std::optional<WorstSample> worst;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// Accumulates residuals and produces a CheckReport with
/// verdict = (max_residual < tolerance).
class ResidualTally {
public:
  ResidualTally(std::string check_id, std::string scenario, double tolerance)
      : check_id_(std::move(check_id)), scenario_(std::move(scenario)), tolerance_(tolerance) {}

  void add(double residual, std::size_t sample_index, const Vec& point, std::string detail = {});
  void count_sample() { ++samples_; }

  CheckReport finish(std::string note = {}) const;

private:
  std::string check_id_;
  std::string scenario_;
  double tolerance_;
  std::size_t samples_ = 0;
  std::size_t applicable_ = 0;
  double max_ = 0.0;
  double sum_ = 0.0;
  bool nan_seen_ = false;
  std::optional<WorstSample> worst_;
};

CheckReport skipped_report(std::string check_id, std::string scenario, std::string reason);

}  // namespace metallab
