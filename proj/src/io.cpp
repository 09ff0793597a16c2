#include "wavefront/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavefront {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path);
  CsvData d;
  std::string line;
  if (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) d.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    d.rows.push_back(std::move(row));
  }
  return d;
}

namespace {

std::vector<std::string> state_header(const std::string& prefix, int n) {
  std::vector<std::string> h{"t"};
  for (int c = 0; c < n; ++c) h.push_back(prefix + std::to_string(c + 1));
  for (int c = 0; c < n; ++c) h.push_back("d" + prefix + std::to_string(c + 1));
  return h;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
  const int n = tr.dim();
  std::vector<std::vector<double>> rows;
  rows.reserve(tr.u.size());
  for (size_t i = 0; i < tr.u.size(); ++i) {
    std::vector<double> row{tr.time(i)};
    for (int c = 0; c < n; ++c) row.push_back(tr.u[i][c]);
    for (int c = 0; c < n; ++c) row.push_back(tr.du[i][c]);
    rows.push_back(std::move(row));
  }
  write_csv(path, state_header("u", n), rows);
}

void write_profile_csv(const std::string& path, const WaveProfile& p) {
  const int n = p.dim();
  std::vector<std::vector<double>> rows;
  rows.reserve(p.psi.size());
  for (size_t i = 0; i < p.psi.size(); ++i) {
    std::vector<double> row{p.time(i)};
    for (int c = 0; c < n; ++c) row.push_back(p.psi[i][c]);
    for (int c = 0; c < n; ++c) row.push_back(p.dpsi[i][c]);
    rows.push_back(std::move(row));
  }
  write_csv(path, state_header("psi", n), rows);
}

void write_snapshots_csv(const std::string& path, const PdeResult& r) {
  std::vector<std::string> h{"t", "x"};
  for (int c = 0; c < r.n; ++c) h.push_back("u" + std::to_string(c + 1));
  std::vector<std::vector<double>> rows;
  for (const auto& snap : r.snapshots)
    for (size_t i = 0; i < r.x.size(); ++i) {
      std::vector<double> row{snap.t, r.x[i]};
      for (int c = 0; c < r.n; ++c) row.push_back(snap.u[i * r.n + c]);
      rows.push_back(std::move(row));
    }
  write_csv(path, h, rows);
}

void write_front_csv(const std::string& path, const PdeResult& r) {
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < r.front_t.size(); ++i)
    rows.push_back({r.front_t[i], r.front_x[i]});
  write_csv(path, {"t", "x_front"}, rows);
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace wavefront
