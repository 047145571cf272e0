#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specsim {

// One scripted request phase. Alignment of the deployed draft follows a
// saturating exponential in the number of trained samples:
//   alpha(n) = alpha_ceiling - (alpha_ceiling - alpha_start) * exp(-n / tau)
struct PhaseSpec {
  std::string name;
  int num_requests = 0;
  int concurrency = 0;        // closed-loop batch size b
  int mean_output_tokens = 0;
  double alpha_start = 0.0;   // alignment at phase entry, before adaptation
  double alpha_ceiling = 0.0; // achievable alignment after adaptation
  double tau_samples = 1.0;   // saturation time constant, in training samples
  double alpha_noise_sd = 0.0;  // per-request jitter on alpha
};

double current_alpha(const PhaseSpec& phase, double trained_samples);

// current_alpha plus a per-request jitter, clamped to [0,1].
double effective_alpha(const PhaseSpec& phase, double trained_samples,
                       double jitter);

struct Request {
  int id = 0;
  int phase_index = 0;
  long long output_tokens_remaining = 0;
  double alpha_jitter = 0.0;  // pre-drawn N(0, alpha_noise_sd)
};

// Deterministic request schedule: per-request output lengths (geometric,
// minimum 1) and alpha jitters are drawn once at construction from rng_seed.
class WorkloadScript {
 public:
  WorkloadScript(std::vector<PhaseSpec> phases, std::uint64_t rng_seed);

  static WorkloadScript from_json_file(const std::filesystem::path& path);
  static WorkloadScript from_json_text(const std::string& text);

  const std::vector<PhaseSpec>& phases() const { return phases_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  int total_requests() const { return static_cast<int>(requests_.size()); }
  long long total_output_tokens() const { return total_output_tokens_; }
  const Request& request(int index) const { return requests_[index]; }

 private:
  std::vector<PhaseSpec> phases_;
  std::uint64_t rng_seed_ = 0;
  std::vector<Request> requests_;  // admission order, phases back to back
  long long total_output_tokens_ = 0;
};

// Single-owner admission cursor over a script.
class ScriptCursor {
 public:
  explicit ScriptCursor(const WorkloadScript& script) : script_(&script) {}

  bool exhausted() const { return next_ >= script_->total_requests(); }

  // Phase of the next request to admit (last phase once exhausted).
  int current_phase() const;
  int target_concurrency() const;

  std::optional<Request> admit();

 private:
  const WorkloadScript* script_;
  int next_ = 0;
};

// Closed-loop refill: drops completed requests, then admits from the cursor
// until the batch reaches the current phase's concurrency. An empty batch
// after refill signals the end of the simulation.
void refill_batch(ScriptCursor& cursor, std::vector<Request>& batch);

}  // namespace specsim
