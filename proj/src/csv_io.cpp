#include "uavfuse/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "uavfuse/errors.hpp"

namespace uavfuse {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(path.string() + ":" + std::to_string(line) +
                     ": expected a number, got \"" + s + "\"");
  }
}

void expect_header(std::ifstream& in, const std::string& expected,
                   const std::filesystem::path& path) {
  std::string header;
  if (!std::getline(in, header)) {
    throw InputError(path.string() + ": empty file");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != expected) {
    throw InputError(path.string() + ":1: expected header \"" + expected +
                     "\", got \"" + header + "\"");
  }
}

}  // namespace

void write_measurements_csv(const std::filesystem::path& path,
                            std::span<const Measurement> ms) {
  auto out = open_out(path);
  out << "t_s,modality,x_m,y_m,z_m,track_id\n";
  for (const Measurement& m : ms) {
    out << fmt(m.timestamp) << ',' << modality_name(m.modality) << ','
        << fmt(m.value(0)) << ',' << fmt(m.value(1)) << ',';
    if (m.modality == Modality::Radar3D) out << fmt(m.value(2));
    out << ',';
    if (m.track_id) out << *m.track_id;
    out << '\n';
  }
}

std::vector<Measurement> read_measurements_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "t_s,modality,x_m,y_m,z_m,track_id", path);
  std::vector<Measurement> out;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 6 fields, got " + std::to_string(f.size()));
    }
    Measurement m;
    m.timestamp = parse_double(f[0], path, line_no);
    if (f[1] == "radar") {
      m.modality = Modality::Radar3D;
      m.value.resize(3);
      m.value << parse_double(f[2], path, line_no), parse_double(f[3], path, line_no),
          parse_double(f[4], path, line_no);
    } else if (f[1] == "rf") {
      m.modality = Modality::Rf2D;
      if (!f[4].empty()) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": rf rows must leave z_m empty");
      }
      m.value.resize(2);
      m.value << parse_double(f[2], path, line_no), parse_double(f[3], path, line_no);
    } else {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": modality must be radar or rf, got \"" + f[1] + "\"");
    }
    if (!f[5].empty()) {
      m.track_id = static_cast<int>(parse_double(f[5], path, line_no));
    }
    validate(m);
    out.push_back(std::move(m));
  }
  return out;
}

void write_ground_truth_csv(const std::filesystem::path& path,
                            std::span<const GroundTruthSample> gt) {
  auto out = open_out(path);
  out << "t_s,x_m,y_m,z_m\n";
  for (const GroundTruthSample& s : gt) {
    out << fmt(s.timestamp) << ',' << fmt(s.position.east_m) << ','
        << fmt(s.position.north_m) << ',' << fmt(s.position.up_m) << '\n';
  }
}

std::vector<GroundTruthSample> read_ground_truth_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "t_s,x_m,y_m,z_m", path);
  std::vector<GroundTruthSample> out;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 4 fields, got " + std::to_string(f.size()));
    }
    GroundTruthSample s;
    s.timestamp = parse_double(f[0], path, line_no);
    s.position = {parse_double(f[1], path, line_no), parse_double(f[2], path, line_no),
                  parse_double(f[3], path, line_no)};
    if (!out.empty() && s.timestamp <= out.back().timestamp) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": ground-truth timestamps must strictly increase");
    }
    out.push_back(s);
  }
  return out;
}

void write_track_csv(const std::filesystem::path& path,
                     std::span<const TrackPoint> track) {
  auto out = open_out(path);
  out << "t,x,y,z,vx,vy,vz,kind,source,nis\n";
  for (const TrackPoint& tp : track) {
    out << fmt(tp.timestamp);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(tp.state.position(i));
    for (int i = 0; i < 3; ++i) out << ',' << fmt(tp.state.velocity(i));
    out << ',' << step_kind_name(tp.kind) << ',';
    if (tp.source) out << modality_name(*tp.source);
    out << ',';
    if (tp.nis) out << fmt(*tp.nis);
    out << '\n';
  }
}

std::vector<TrackRow> read_track_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "t,x,y,z,vx,vy,vz,kind,source,nis", path);
  std::vector<TrackRow> out;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 10) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 10 fields, got " + std::to_string(f.size()));
    }
    TrackRow row;
    row.timestamp = parse_double(f[0], path, line_no);
    for (int i = 0; i < 3; ++i) row.position(i) = parse_double(f[1 + i], path, line_no);
    for (int i = 0; i < 3; ++i) row.velocity(i) = parse_double(f[4 + i], path, line_no);
    if (f[7] == "updated") {
      row.kind = StepKind::Updated;
    } else if (f[7] == "coasted") {
      row.kind = StepKind::Coasted;
    } else {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": kind must be updated or coasted, got \"" + f[7] + "\"");
    }
    if (f[8] == "radar") {
      row.source = Modality::Radar3D;
    } else if (f[8] == "rf") {
      row.source = Modality::Rf2D;
    } else if (!f[8].empty()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": source must be radar, rf or empty");
    }
    if (!f[9].empty()) row.nis = parse_double(f[9], path, line_no);
    out.push_back(row);
  }
  return out;
}

void write_cdf_csv(const std::filesystem::path& path,
                   std::span<const std::pair<double, double>> cdf) {
  auto out = open_out(path);
  out << "error_m,fraction\n";
  for (const auto& [error_m, fraction] : cdf) {
    out << fmt(error_m) << ',' << fmt(fraction) << '\n';
  }
}

}  // namespace uavfuse
