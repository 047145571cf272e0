#include "specsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specsim/errors.hpp"
#include "specsim/rng.hpp"

namespace specsim {
namespace {

void append_phase_problems(const PhaseSpec& phase, int index,
                           std::vector<std::string>& problems) {
  const std::string tag = "phase " + std::to_string(index) +
                          (phase.name.empty() ? "" : " ('" + phase.name + "')");
  if (phase.name.empty()) problems.push_back(tag + ": name is empty");
  if (phase.num_requests < 1) problems.push_back(tag + ": num_requests < 1");
  if (phase.concurrency < 1) problems.push_back(tag + ": concurrency < 1");
  if (phase.mean_output_tokens < 1) {
    problems.push_back(tag + ": mean_output_tokens < 1");
  }
  if (!(phase.alpha_start >= 0.0 && phase.alpha_start <= 1.0)) {
    problems.push_back(tag + ": alpha_start outside [0,1]");
  }
  if (!(phase.alpha_ceiling >= 0.0 && phase.alpha_ceiling <= 1.0)) {
    problems.push_back(tag + ": alpha_ceiling outside [0,1]");
  }
  if (phase.alpha_start > phase.alpha_ceiling) {
    problems.push_back(tag + ": alpha_start > alpha_ceiling");
  }
  if (!(phase.tau_samples > 0.0)) problems.push_back(tag + ": tau_samples <= 0");
  if (phase.alpha_noise_sd < 0.0) problems.push_back(tag + ": alpha_noise_sd < 0");
}

}  // namespace

double current_alpha(const PhaseSpec& phase, double trained_samples) {
  const double n = std::max(0.0, trained_samples);
  const double alpha = phase.alpha_ceiling -
                       (phase.alpha_ceiling - phase.alpha_start) *
                           std::exp(-n / phase.tau_samples);
  return std::clamp(alpha, 0.0, 1.0);
}

double effective_alpha(const PhaseSpec& phase, double trained_samples,
                       double jitter) {
  return std::clamp(current_alpha(phase, trained_samples) + jitter, 0.0, 1.0);
}

WorkloadScript::WorkloadScript(std::vector<PhaseSpec> phases,
                               std::uint64_t rng_seed)
    : phases_(std::move(phases)), rng_seed_(rng_seed) {
  std::vector<std::string> problems;
  if (phases_.empty()) problems.push_back("script has no phases");
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    append_phase_problems(phases_[i], static_cast<int>(i), problems);
  }
  if (!problems.empty()) {
    std::string msg = "invalid workload script:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }

  Rng rng(rng_seed_);
  int id = 0;
  for (std::size_t p = 0; p < phases_.size(); ++p) {
    const auto& phase = phases_[p];
    for (int r = 0; r < phase.num_requests; ++r) {
      Request req;
      req.id = id++;
      req.phase_index = static_cast<int>(p);
      req.output_tokens_remaining = rng.geometric(phase.mean_output_tokens);
      req.alpha_jitter = rng.normal(0.0, phase.alpha_noise_sd);
      total_output_tokens_ += req.output_tokens_remaining;
      requests_.push_back(req);
    }
  }
}

WorkloadScript WorkloadScript::from_json_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open workload: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

WorkloadScript WorkloadScript::from_json_text(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    std::vector<PhaseSpec> phases;
    for (const auto& entry : doc.at("phases")) {
      PhaseSpec phase;
      phase.name = entry.at("name").get<std::string>();
      phase.num_requests = entry.at("num_requests").get<int>();
      phase.concurrency = entry.at("concurrency").get<int>();
      phase.mean_output_tokens = entry.at("mean_output_tokens").get<int>();
      phase.alpha_start = entry.at("alpha_start").get<double>();
      phase.alpha_ceiling = entry.at("alpha_ceiling").get<double>();
      phase.tau_samples = entry.at("tau_samples").get<double>();
      phase.alpha_noise_sd = entry.value("alpha_noise_sd", 0.0);
      phases.push_back(std::move(phase));
    }
    const auto seed = doc.at("rng_seed").get<std::uint64_t>();
    return WorkloadScript(std::move(phases), seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("workload json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int ScriptCursor::current_phase() const {
  if (exhausted()) {
    return script_->total_requests() > 0
               ? script_->request(script_->total_requests() - 1).phase_index
               : 0;
  }
  return script_->request(next_).phase_index;
}

int ScriptCursor::target_concurrency() const {
  return script_->phases()[current_phase()].concurrency;
}

std::optional<Request> ScriptCursor::admit() {
  if (exhausted()) return std::nullopt;
  return script_->request(next_++);
}

void refill_batch(ScriptCursor& cursor, std::vector<Request>& batch) {
  std::erase_if(batch,
                [](const Request& r) { return r.output_tokens_remaining <= 0; });
  while (!cursor.exhausted() &&
         static_cast<int>(batch.size()) < cursor.target_concurrency()) {
    batch.push_back(*cursor.admit());
  }
}

}  // namespace specsim
