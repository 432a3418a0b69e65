#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qchsh/channels.hpp"
#include "qchsh/protocols.hpp"
#include "qchsh/seesaw.hpp"

namespace qchsh {

inline constexpr const char* kVersion = "0.1.0";

struct BreakingReport {
  ChannelParam channel{ChannelFamily::Depolarizing, 0.0};
  bool breaking = false;
  double threshold = 0.0;
  double numeric_max = 0.0;  // single-channel see-saw cross-check

  bool operator==(const BreakingReport&) const = default;
};

struct ActivationSummary {
  double best_value = 0.0;
  bool activated = false;
  bool channel1_breaking = false;
  bool channel2_breaking = false;
  bool converged = false;
  int restart_index = -1;
  std::vector<double> restart_values;

  bool operator==(const ActivationSummary&) const = default;
};

ActivationSummary summarize(const ActivationResult& result);

struct SuperactivationSummary {
  double pair_value = 0.0;
  double swapped_branch_value = 0.0;
  double scheme_value = 0.0;
  double single_copy_max = 0.0;
  double sigma1_horodecki = 0.0;
  double sigma2_horodecki = 0.0;
  bool symmetric = false;
  bool superactivated = false;
  bool converged = false;
  std::vector<double> restart_values;

  bool operator==(const SuperactivationSummary&) const = default;
};

SuperactivationSummary summarize(const SuperactivationResult& result);

// One serializable record per CLI invocation. Exactly one of the result
// payloads is set, matching `command`.
struct RunRecord {
  std::string command;
  SeesawConfig config;
  std::optional<ProtocolDescriptor> descriptor;
  std::optional<BreakingReport> breaking;
  std::optional<ActivationSummary> activation;
  std::optional<SweepResult> sweep;
  std::optional<SuperactivationSummary> superactivation;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds; varies run to run, everything else is seeded
  std::string version = kVersion;

  bool operator==(const RunRecord&) const = default;
};

std::string to_json(const RunRecord& record, int indent = 2);
RunRecord parse_run_record(const std::string& text);

// Flat key=value file; unknown keys are errors. Returns `base` with the
// file's assignments applied.
SeesawConfig apply_config_file(const std::string& path, const SeesawConfig& base);

// Header `p1,p2,chsh,activated`; 10 significant digits, activated as 0/1.
std::string sweep_csv(const SweepResult& grid);

}  // namespace qchsh
