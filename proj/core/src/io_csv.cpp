#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "crackcell/error.hpp"
#include "crackcell/io.hpp"

namespace crackcell {

namespace {

constexpr const char* kForceStrainHeader =
    "step,applied_mm,force_N,strain_microstrain,stag_iterations,converged";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string f;
  std::istringstream is(line);
  while (std::getline(is, f, ',')) fields.push_back(f);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str())
    throw Error("csv '" + path + "' line " + std::to_string(line) +
                ": expected a number, got '" + s + "'");
  return v;
}

}  // namespace

void write_force_strain_csv(std::span<const ForceStrainRecord> records,
                            const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << kForceStrainHeader << "\n";
  char line[256];
  for (const auto& r : records) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%d,%d\n", r.step,
                  r.applied, r.force, r.strain_micro, r.stag_iterations,
                  r.converged ? 1 : 0);
    out << line;
  }
  if (!out) throw Error("short write on '" + path + "'");
}

std::vector<ForceStrainRecord> read_force_strain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != kForceStrainHeader)
    throw Error("csv '" + path + "': missing header '" +
                std::string(kForceStrainHeader) + "'");
  std::vector<ForceStrainRecord> records;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6)
      throw Error("csv '" + path + "' line " + std::to_string(lineno) +
                  ": expected 6 fields, got " + std::to_string(f.size()));
    ForceStrainRecord r;
    r.step = static_cast<int>(parse_double(f[0], path, lineno));
    r.applied = parse_double(f[1], path, lineno);
    r.force = parse_double(f[2], path, lineno);
    r.strain_micro = parse_double(f[3], path, lineno);
    r.stag_iterations = static_cast<int>(parse_double(f[4], path, lineno));
    r.converged = parse_double(f[5], path, lineno) != 0.0;
    records.push_back(r);
  }
  return records;
}

std::vector<MeasuredPoint> read_measured_data(const std::string& values_csv,
                                              const std::string& points_csv) {
  auto read_rows = [](const std::string& path, std::size_t nfields,
                      const char* header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != header)
      throw Error("csv '" + path + "': missing header '" +
                  std::string(header) + "'");
    std::vector<std::vector<std::string>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto f = split_csv_line(line);
      if (f.size() != nfields)
        throw Error("csv '" + path + "' line " + std::to_string(lineno) +
                    ": expected " + std::to_string(nfields) + " fields");
      rows.push_back(std::move(f));
    }
    return rows;
  };

  std::map<std::string, Eigen::Vector3d> positions;
  for (const auto& row : read_rows(points_csv, 4, "id,x,y,z")) {
    Eigen::Vector3d x(parse_double(row[1], points_csv, 0),
                      parse_double(row[2], points_csv, 0),
                      parse_double(row[3], points_csv, 0));
    if (!positions.emplace(row[0], x).second)
      throw Error("csv '" + points_csv + "': duplicate id '" + row[0] + "'");
  }

  std::vector<MeasuredPoint> points;
  std::set<std::string> seen;
  for (const auto& row : read_rows(values_csv, 2, "id,value")) {
    if (!seen.insert(row[0]).second)
      throw Error("csv '" + values_csv + "': duplicate id '" + row[0] + "'");
    auto it = positions.find(row[0]);
    if (it == positions.end())
      throw Error("measured id '" + row[0] + "' has no coordinates in '" +
                  points_csv + "'");
    MeasuredPoint p;
    p.id = row[0];
    p.value = parse_double(row[1], values_csv, 0);
    p.position = it->second;
    points.push_back(std::move(p));
  }
  if (points.empty())
    throw Error("measured data '" + values_csv + "': no rows");
  return points;
}

}  // namespace crackcell
