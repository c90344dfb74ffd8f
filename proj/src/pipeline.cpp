#include "uavfuse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "uavfuse/errors.hpp"

namespace uavfuse {

void FusionConfig::validate() const {
  noise.validate();
  if (!(gate_confidence > 0.0) || !(gate_confidence < 1.0)) {
    throw ConfigError("gate_confidence must lie in (0, 1)");
  }
  if (!(radar_max_range_m > 0.0)) {
    throw ConfigError("radar_max_range_m must be positive");
  }
}

std::vector<Measurement> select_largest_track(std::span<const Measurement> ms) {
  struct TrackInfo {
    int count{0};
    double t_min{0.0};
    double t_max{0.0};
  };
  std::map<int, TrackInfo> tracks;
  for (const Measurement& m : ms) {
    if (!m.track_id) continue;
    auto [it, fresh] = tracks.try_emplace(*m.track_id);
    TrackInfo& info = it->second;
    if (fresh) {
      info = {1, m.timestamp, m.timestamp};
    } else {
      ++info.count;
      info.t_min = std::min(info.t_min, m.timestamp);
      info.t_max = std::max(info.t_max, m.timestamp);
    }
  }
  if (tracks.empty()) return {};

  int best_id = tracks.begin()->first;
  for (const auto& [id, info] : tracks) {
    const TrackInfo& best = tracks.at(best_id);
    const double span = info.t_max - info.t_min;
    const double best_span = best.t_max - best.t_min;
    if (info.count > best.count ||
        (info.count == best.count && span > best_span)) {
      best_id = id;  // std::map iterates ids ascending, so lowest id wins ties
    }
  }

  std::vector<Measurement> out;
  for (const Measurement& m : ms) {
    if (m.track_id && *m.track_id == best_id) out.push_back(m);
  }
  return out;
}

bool range_gate(const Measurement& m, const EnuPosition& radar_origin,
                double max_range_m) {
  if (m.modality != Modality::Radar3D) {
    throw InputError("range_gate applies to radar measurements only");
  }
  return (m.value - radar_origin.vec()).norm() <= max_range_m;
}

namespace {

void check_sorted(std::span<const Measurement> ms, const char* label) {
  for (size_t i = 0; i < ms.size(); ++i) {
    validate(ms[i]);
    if (i > 0 && ms[i].timestamp < ms[i - 1].timestamp) {
      throw InputError(std::string(label) + " measurements are not time-sorted");
    }
  }
}

std::vector<Measurement> merge_streams(std::span<const Measurement> radar,
                                       std::span<const Measurement> rf,
                                       bool radar_first_on_ties) {
  std::vector<Measurement> merged;
  merged.reserve(radar.size() + rf.size());
  size_t i = 0, j = 0;
  while (i < radar.size() || j < rf.size()) {
    const bool take_radar =
        j == rf.size() ||
        (i < radar.size() &&
         (radar[i].timestamp < rf[j].timestamp ||
          (radar[i].timestamp == rf[j].timestamp && radar_first_on_ties)));
    merged.push_back(take_radar ? radar[i++] : rf[j++]);
  }
  return merged;
}

}  // namespace

FusionResult run_fusion(std::span<const Measurement> radar,
                        std::span<const Measurement> rf,
                        const FusionConfig& cfg) {
  cfg.validate();
  check_sorted(radar, "radar");
  check_sorted(rf, "rf");
  for (const Measurement& m : radar) {
    if (m.modality != Modality::Radar3D) {
      throw InputError("radar stream contains a non-radar measurement");
    }
  }
  for (const Measurement& m : rf) {
    if (m.modality != Modality::Rf2D) {
      throw InputError("rf stream contains a non-rf measurement");
    }
  }

  FusionResult result;
  RunCounts& counts = result.report.counts;
  counts.radar_raw = static_cast<int>(radar.size());
  counts.rf_raw = static_cast<int>(rf.size());

  std::vector<Measurement> radar_kept(radar.begin(), radar.end());
  if (cfg.range_gate_placement == RangeGatePlacement::Preprocess) {
    std::vector<Measurement> filtered;
    filtered.reserve(radar_kept.size());
    for (const Measurement& m : radar_kept) {
      if (range_gate(m, cfg.radar_origin, cfg.radar_max_range_m)) {
        filtered.push_back(m);
      } else {
        ++counts.range_rejected;
      }
    }
    radar_kept = std::move(filtered);
  }

  const std::vector<Measurement> merged =
      merge_streams(radar_kept, rf, cfg.radar_first_on_ties);
  if (merged.empty() && counts.range_rejected == 0) {
    throw InsufficientDataError("no measurements to fuse");
  }

  const bool in_loop_gate = cfg.range_gate_placement == RangeGatePlacement::InLoop;
  FilterState fs;
  bool initialized = false;

  for (const Measurement& m : merged) {
    const bool is_radar = m.modality == Modality::Radar3D;
    const bool in_range =
        !is_radar || !in_loop_gate ||
        range_gate(m, cfg.radar_origin, cfg.radar_max_range_m);

    if (!initialized) {
      if (!in_range) {
        // No state to coast yet; the detection is simply discarded.
        ++counts.range_rejected;
        ++counts.skipped_range_rejects;
        continue;
      }
      fs = initialize(m.value, m.modality, cfg.noise, m.timestamp, cfg.init);
      initialized = true;
      result.track.push_back({fs.timestamp, fs.estimate, fs.covariance,
                              StepKind::Updated, m.modality, std::nullopt});
      result.accepted.push_back(m);
      (is_radar ? counts.updated_radar : counts.updated_rf)++;
      continue;
    }

    const double dt = m.timestamp - fs.timestamp;
    if (!in_range) {
      ++counts.range_rejected;
      if (cfg.coast_on_range_reject) {
        if (dt > 0.0) fs = predict(fs, dt, cfg.noise);
        ++counts.coasted;
        result.track.push_back({fs.timestamp, fs.estimate, fs.covariance,
                                StepKind::Coasted, m.modality, std::nullopt});
      } else {
        ++counts.skipped_range_rejects;
      }
      continue;
    }

    if (dt > 0.0) fs = predict(fs, dt, cfg.noise);

    if (cfg.gate_enabled) {
      auto [next, outcome] =
          validated_update(fs, m.value, m.modality, cfg.noise, cfg.gate_confidence);
      if (outcome.kind == StepKind::Updated) {
        fs = next;
        result.track.push_back({fs.timestamp, fs.estimate, fs.covariance,
                                StepKind::Updated, m.modality, outcome.nis});
        result.accepted.push_back(m);
        (is_radar ? counts.updated_radar : counts.updated_rf)++;
      } else {
        (is_radar ? counts.nis_rejected_radar : counts.nis_rejected_rf)++;
        ++counts.coasted;
        result.track.push_back({fs.timestamp, fs.estimate, fs.covariance,
                                StepKind::Coasted, m.modality, outcome.nis});
      }
    } else {
      auto [next, outcome] = update(fs, m.value, m.modality, cfg.noise);
      fs = next;
      result.track.push_back({fs.timestamp, fs.estimate, fs.covariance,
                              StepKind::Updated, m.modality, outcome.nis});
      result.accepted.push_back(m);
      (is_radar ? counts.updated_radar : counts.updated_rf)++;
    }
  }

  if (!initialized) {
    throw InsufficientDataError("no measurement survived gating; track is empty");
  }

  const int radar_seen =
      counts.updated_radar + counts.nis_rejected_radar + counts.range_rejected;
  const int rf_seen = counts.updated_rf + counts.nis_rejected_rf;
  result.report.radar_acceptance_rate =
      radar_seen > 0 ? static_cast<double>(counts.updated_radar) / radar_seen : 0.0;
  result.report.rf_acceptance_rate =
      rf_seen > 0 ? static_cast<double>(counts.updated_rf) / rf_seen : 0.0;
  return result;
}

}  // namespace uavfuse
