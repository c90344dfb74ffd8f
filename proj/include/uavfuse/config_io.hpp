#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavfuse/pipeline.hpp"
#include "uavfuse/sim.hpp"

namespace uavfuse {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

// Configs are JSON with a versioned schema. Unknown keys are rejected so a
// typo cannot silently change a run.

SensorScenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const SensorScenario& sc);

FusionConfig load_fusion_config(const std::filesystem::path& path);
void save_fusion_config(const std::filesystem::path& path, const FusionConfig& cfg);

/// Everything needed to reproduce a run, written verbatim into the output
/// directory of every subcommand.
struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::vector<std::string> input_paths;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> extra_args;
};

void write_run_manifest(const std::filesystem::path& out_dir,
                        const RunManifest& manifest);

}  // namespace uavfuse
