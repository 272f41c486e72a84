#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "embcal/problem.hpp"

namespace embcal {

// Numeric CSV with a header row.  Values are written with 17 significant
// digits so a load/save round trip is exact.
struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd data;  // rows x header.size()

  int column(const std::string& name) const;  // -1 when absent
};

void save_table(const std::string& path, const std::vector<std::string>& header,
                const Eigen::MatrixXd& data);
Table load_table(const std::string& path);

// Mixed-content CSV (summary tables carrying label columns).
void save_text_table(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

// Observation files: "x,value" for plain coordinates, or
// "time_min,sensor,value" when per-entry sensor ids are present.
// noise_std travels in the experiment metadata, not in the table.
void save_observations(const std::string& path, const ObservationSet& obs);
ObservationSet load_observations(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Exact shortest-round-trip decimal rendering used across all outputs.
std::string format_double(double v);

}  // namespace embcal
