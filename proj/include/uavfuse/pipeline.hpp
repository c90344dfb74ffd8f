#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavfuse/filter.hpp"
#include "uavfuse/geo.hpp"
#include "uavfuse/measurement.hpp"

namespace uavfuse {

/// Where radar range gating happens. InLoop keeps over-range detections in
/// the stream so the filter can coast through them (see coast_on_range_reject);
/// Preprocess removes them before the filter sees anything, which matches
/// treating range gating as a dataset-cleaning step.
enum class RangeGatePlacement { InLoop, Preprocess };

struct FusionConfig {
  NoiseConfig noise;
  double gate_confidence{0.95};
  bool gate_enabled{true};
  double radar_max_range_m{800.0};
  EnuPosition radar_origin;
  RangeGatePlacement range_gate_placement{RangeGatePlacement::InLoop};
  /// With in-loop gating, emit the predicted state at range-rejected radar
  /// timestamps. This is what extends fused coverage over regions the radar
  /// can see but not measure reliably.
  bool coast_on_range_reject{true};
  bool radar_first_on_ties{true};
  InitOptions init;

  void validate() const;
};

/// One emitted estimate of the fused track.
struct TrackPoint {
  double timestamp{0.0};
  CvState state;
  Covariance6 covariance{Covariance6::Zero()};
  StepKind kind{StepKind::Updated};
  std::optional<Modality> source;  // modality of the triggering measurement
  std::optional<double> nis;       // absent for the initial fix and range coasts
};

struct RunCounts {
  int radar_raw{0};
  int rf_raw{0};
  int track_discarded{0};  // radar fixes outside the selected track
  int range_rejected{0};
  int nis_rejected_radar{0};
  int nis_rejected_rf{0};
  int updated_radar{0};  // includes the initializing fix
  int updated_rf{0};
  int coasted{0};

  int updated() const { return updated_radar + updated_rf; }
  /// Measurements that reached the filter loop after track selection (and
  /// after range gating when it is applied as preprocessing).
  int processed() const {
    return updated() + coasted + skipped_range_rejects;
  }
  int skipped_range_rejects{0};  // range rejects that emitted nothing
};

struct RunReport {
  RunCounts counts;
  double radar_acceptance_rate{0.0};  // accepted / radar fixes seen by the loop
  double rf_acceptance_rate{0.0};
};

struct FusionResult {
  std::vector<TrackPoint> track;
  RunReport report;
  std::vector<Measurement> accepted;  // measurements that produced updates
};

/// Keep only the radar track with the most measurements; ties broken by
/// longer time span, then lower id. Measurements without a track id are
/// dropped.
std::vector<Measurement> select_largest_track(std::span<const Measurement> ms);

/// True iff the fix lies within max_range_m of the radar origin. Applies to
/// radar measurements only; throws InputError for RF.
bool range_gate(const Measurement& m, const EnuPosition& radar_origin,
                double max_range_m);

/// Merge both time-sorted streams (ties radar-first by default), initialize
/// from the first surviving fix, then predict/gate/update through the rest.
/// NIS-rejected measurements emit the coasted prediction at their timestamp.
FusionResult run_fusion(std::span<const Measurement> radar,
                        std::span<const Measurement> rf,
                        const FusionConfig& cfg);

}  // namespace uavfuse
