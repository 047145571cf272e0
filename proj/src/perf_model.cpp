#include "specsim/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "specsim/errors.hpp"

namespace specsim {
namespace {

[[noreturn]] void domain_error(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    domain_error("alpha must be in [0,1], got " + std::to_string(alpha));
  }
}

void check_gamma(int gamma) {
  if (gamma < 1) {
    domain_error("gamma must be >= 1, got " + std::to_string(gamma));
  }
}

// Smallest x in [lo, hi] with f(x) >= target, for non-decreasing f.
template <typename F>
double bisect_increasing(double lo, double hi, double target, F&& f) {
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LatencyProfile::LatencyProfile(std::string model_name,
                               std::vector<LatencyPoint> points, double d0_ms)
    : model_name_(std::move(model_name)),
      points_(std::move(points)),
      d0_ms_(d0_ms) {
  std::vector<std::string> problems;
  if (points_.empty()) problems.push_back("profile has no points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].n < 1) {
      problems.push_back("point " + std::to_string(i) + ": batch size < 1");
    }
    if (!(points_[i].latency_ms > 0.0)) {
      problems.push_back("point " + std::to_string(i) + ": latency not > 0");
    }
    if (i > 0) {
      if (points_[i].n <= points_[i - 1].n) {
        problems.push_back("point " + std::to_string(i) +
                           ": batch sizes not strictly increasing");
      }
      if (points_[i].latency_ms < points_[i - 1].latency_ms) {
        problems.push_back("point " + std::to_string(i) +
                           ": latency decreases with batch size");
      }
    }
  }
  if (d0_ms_ < 0.0) problems.push_back("d0_ms must be >= 0");
  if (!problems.empty()) {
    std::string msg = "invalid latency profile '" + model_name_ + "':";
    for (const auto& p : problems) msg += "\n  - " + p;
    domain_error(msg);
  }
}

LatencyProfile LatencyProfile::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile: " + path.string());

  std::string model = path.stem().string();
  double d0 = -1.0;
  std::vector<LatencyPoint> points;
  bool header_seen = false;
  std::string line;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line);
      if (line.empty()) continue;
      if (line[0] == '#') {
        const auto body = trim(line.substr(1));
        const auto colon = body.find(':');
        if (colon == std::string::npos) continue;
        const auto key = trim(body.substr(0, colon));
        const auto value = trim(body.substr(colon + 1));
        if (key == "model") model = value;
        if (key == "d0_ms") d0 = std::stod(value);
        continue;
      }
      if (!header_seen) {
        if (line != "n,latency_ms") {
          throw ConfigError("expected header 'n,latency_ms'");
        }
        header_seen = true;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ConfigError("missing comma");
      points.push_back({std::stoi(line.substr(0, comma)),
                        std::stod(line.substr(comma + 1))});
    }
    if (!header_seen) throw ConfigError("no 'n,latency_ms' header found");
    if (d0 < 0.0) throw ConfigError("missing '# d0_ms:' metadata line");
    return LatencyProfile(model, std::move(points), d0);
  } catch (const std::exception& e) {
    throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " +
                      e.what());
  }
}

double LatencyProfile::latency_ms(double n) const {
  if (!(n >= 1.0)) {
    domain_error("batch size must be >= 1, got " + std::to_string(n));
  }
  if (n <= points_.front().n) return points_.front().latency_ms;
  if (points_.size() < 2) {
    domain_error("profile '" + model_name_ +
                 "' has a single point; cannot interpolate at n = " +
                 std::to_string(n));
  }
  // Last point at or below n.
  std::size_t i = points_.size() - 1;
  while (points_[i].n > n) --i;
  if (i == points_.size() - 1) i -= 1;  // extrapolate with the last segment
  const auto& a = points_[i];
  const auto& b = points_[i + 1];
  const double slope = (b.latency_ms - a.latency_ms) / (b.n - a.n);
  return a.latency_ms + slope * (n - a.n);
}

void SpeculationConfig::validate() const {
  check_gamma(gamma);
  if (hysteresis_margin < 0.0) domain_error("hysteresis_margin must be >= 0");
  if (!(monitor_lambda > 0.0 && monitor_lambda < 1.0)) {
    domain_error("monitor_lambda must be in (0,1)");
  }
}

double expected_accept_length(double alpha, int gamma) {
  check_alpha(alpha);
  check_gamma(gamma);
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k <= gamma; ++k) {
    term *= alpha;
    sum += term;
  }
  return sum;
}

int sample_accept_length(Rng& rng, double alpha, int gamma) {
  check_alpha(alpha);
  check_gamma(gamma);
  int accepted = 0;
  while (accepted < gamma && rng.uniform() < alpha) ++accepted;
  return accepted + 1;
}

double beta_ratio(const LatencyProfile& profile, double batch, int gamma) {
  check_gamma(gamma);
  return profile.latency_ms(batch * (gamma + 1)) / profile.latency_ms(batch);
}

double c_ratio(const LatencyProfile& profile, double batch) {
  return profile.d0_ms() / profile.latency_ms(batch);
}

double theoretical_speedup(double alpha, int gamma, double c) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    domain_error("theoretical_speedup requires alpha in [0,1)");
  }
  if (c < 0.0) domain_error("draft cost ratio c must be >= 0");
  return expected_accept_length(alpha, gamma) / (c * gamma + 1.0);
}

double practical_speedup(const LatencyProfile& profile, double alpha,
                         int gamma, double batch) {
  return expected_accept_length(alpha, gamma) /
         (c_ratio(profile, batch) * gamma + beta_ratio(profile, batch, gamma));
}

std::optional<double> min_acceptance_for_gain(const LatencyProfile& profile,
                                              int gamma, double batch) {
  const double rhs =
      c_ratio(profile, batch) * gamma + beta_ratio(profile, batch, gamma);
  if (rhs > gamma + 1.0) return std::nullopt;  // never beneficial
  if (rhs <= 1.0) return 0.0;
  return bisect_increasing(0.0, 1.0, rhs, [gamma](double a) {
    return expected_accept_length(a, gamma);
  });
}

double alpha_from_accept_length(double ell, int gamma) {
  check_gamma(gamma);
  if (!(ell >= 1.0 && ell <= gamma + 1.0)) {
    domain_error("accept length must be in [1, gamma+1], got " +
                 std::to_string(ell));
  }
  if (ell <= 1.0) return 0.0;
  if (ell >= gamma + 1.0) return 1.0;
  return bisect_increasing(0.0, 1.0, ell, [gamma](double a) {
    return expected_accept_length(a, gamma);
  });
}

}  // namespace specsim
