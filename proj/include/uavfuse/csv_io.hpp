#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "uavfuse/calib.hpp"
#include "uavfuse/measurement.hpp"
#include "uavfuse/pipeline.hpp"

namespace uavfuse {

// Measurement CSV schema (exact header):
//   t_s,modality,x_m,y_m,z_m,track_id
// modality is "radar" or "rf"; rf rows leave z_m and track_id empty.
//
// Ground-truth CSV schema: t_s,x_m,y_m,z_m
// Track CSV schema:        t,x,y,z,vx,vy,vz,kind,source,nis

void write_measurements_csv(const std::filesystem::path& path,
                            std::span<const Measurement> ms);
std::vector<Measurement> read_measurements_csv(const std::filesystem::path& path);

void write_ground_truth_csv(const std::filesystem::path& path,
                            std::span<const GroundTruthSample> gt);
std::vector<GroundTruthSample> read_ground_truth_csv(const std::filesystem::path& path);

/// Track row as stored on disk (covariances are not serialized).
struct TrackRow {
  double timestamp{0.0};
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Eigen::Vector3d velocity{Eigen::Vector3d::Zero()};
  StepKind kind{StepKind::Updated};
  std::optional<Modality> source;
  std::optional<double> nis;
};

void write_track_csv(const std::filesystem::path& path,
                     std::span<const TrackPoint> track);
std::vector<TrackRow> read_track_csv(const std::filesystem::path& path);

void write_cdf_csv(const std::filesystem::path& path,
                   std::span<const std::pair<double, double>> cdf);

}  // namespace uavfuse
