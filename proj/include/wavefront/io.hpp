#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "wavefront/heteroclinic.hpp"
#include "wavefront/pde.hpp"
#include "wavefront/profile.hpp"

namespace wavefront {

/// All writers emit doubles with %.17g so files round-trip exactly and
/// reruns are byte-identical.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvData read_csv(const std::string& path);

void write_trajectory_csv(const std::string& path, const Trajectory& tr);
void write_profile_csv(const std::string& path, const WaveProfile& p);
void write_snapshots_csv(const std::string& path, const PdeResult& r);
void write_front_csv(const std::string& path, const PdeResult& r);

void write_json(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace wavefront
