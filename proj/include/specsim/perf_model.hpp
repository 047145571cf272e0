#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specsim/rng.hpp"

namespace specsim {

struct LatencyPoint {
  int n = 0;            // batch size (tokens decoded in parallel)
  double latency_ms = 0.0;
};

// Profiled target-model decode latency T(n) plus the static draft-step
// latency D0. Batch sizes must be strictly increasing and latencies
// positive and non-decreasing.
class LatencyProfile {
 public:
  LatencyProfile(std::string model_name, std::vector<LatencyPoint> points,
                 double d0_ms);

  // Reads a profile CSV: `# key: value` metadata lines (model, d0_ms)
  // followed by a `n,latency_ms` header and one row per profiled point.
  static LatencyProfile from_csv(const std::filesystem::path& path);

  const std::string& model_name() const { return model_name_; }
  const std::vector<LatencyPoint>& points() const { return points_; }
  double d0_ms() const { return d0_ms_; }

  // T(n): exact at profiled points, piecewise linear between them,
  // clamped to T(n_min) below the grid, slope-extrapolated above it.
  double latency_ms(double n) const;

 private:
  std::string model_name_;
  std::vector<LatencyPoint> points_;
  double d0_ms_ = 0.0;
};

struct SpeculationConfig {
  int gamma = 3;                  // candidate tokens per speculation step
  double hysteresis_margin = 0.02;  // extra predicted speedup required to enable
  double monitor_lambda = 0.995;  // decay of the drafter's accept-length EMA
  bool initial_on = true;         // speculation state until warm-up completes

  void validate() const;
};

// E[l] = (1 - alpha^(gamma+1)) / (1 - alpha), evaluated as the power sum
// so alpha = 1 hits the gamma+1 limit exactly.
double expected_accept_length(double alpha, int gamma);

// One speculation step: accepted draft prefix plus the bonus token.
// P(k) = alpha^(k-1)(1-alpha) for k <= gamma, P(gamma+1) = alpha^gamma.
int sample_accept_length(Rng& rng, double alpha, int gamma);

// beta(b) = T(b(gamma+1)) / T(b), verification cost inflation.
double beta_ratio(const LatencyProfile& profile, double batch, int gamma);

// c(b) = D0 / T(b), draft cost relative to one target decode step.
double c_ratio(const LatencyProfile& profile, double batch);

// Memory-bound ideal: E[l] / (c*gamma + 1). Requires alpha < 1.
double theoretical_speedup(double alpha, int gamma, double c);

// Batch-aware speedup: E[l] / (c(b)*gamma + beta(b)). Accepts alpha in [0,1].
double practical_speedup(const LatencyProfile& profile, double alpha,
                         int gamma, double batch);

// Smallest alpha at which speculation breaks even at this batch size:
// E[l](alpha) = c(b)*gamma + beta(b). Returns nullopt when no alpha in
// [0,1] suffices (speculation can never pay off at this batch size).
std::optional<double> min_acceptance_for_gain(const LatencyProfile& profile,
                                              int gamma, double batch);

// Inverse of expected_accept_length in alpha, for ell in [1, gamma+1].
double alpha_from_accept_length(double ell, int gamma);

// Absolute tolerance of the bisection solvers above.
inline constexpr double kBisectionTol = 1e-6;

}  // namespace specsim
