#include "embcal/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace embcal {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

void save_table(const std::string& path, const std::vector<std::string>& header,
                const Eigen::MatrixXd& data) {
  if (static_cast<Eigen::Index>(header.size()) != data.cols())
    throw std::invalid_argument("save_table: header/column count mismatch");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_table: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (c) out << ',';
      out << format_double(data(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_table: write failed for " + path);
}

void save_text_table(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_text_table: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("save_text_table: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_text_table: write failed for " + path);
}

Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_table: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_table: empty file " + path);
  Table table;
  for (auto& name : split_line(strip_cr(line))) table.header.push_back(name);
  const auto cols = static_cast<Eigen::Index>(table.header.size());
  if (cols == 0) throw std::runtime_error("load_table: missing header in " + path);

  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols)
      throw std::runtime_error("load_table: ragged row in " + path);
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str()) throw std::runtime_error("load_table: non-numeric cell in " + path);
      values.push_back(v);
    }
    ++rows;
  }
  table.data.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      table.data(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return table;
}

void save_observations(const std::string& path, const ObservationSet& obs) {
  if (obs.x.size() != obs.y.size())
    throw std::invalid_argument("save_observations: coordinate/value length mismatch");
  const bool with_sensor = obs.sensor.size() > 0;
  if (with_sensor && obs.sensor.size() != obs.y.size())
    throw std::invalid_argument("save_observations: sensor id length mismatch");
  Eigen::MatrixXd data(obs.y.size(), with_sensor ? 3 : 2);
  data.col(0) = obs.x;
  if (with_sensor) {
    data.col(1) = obs.sensor.cast<double>();
    data.col(2) = obs.y;
    save_table(path, {"time_min", "sensor", "value"}, data);
  } else {
    data.col(1) = obs.y;
    save_table(path, {"x", "value"}, data);
  }
}

ObservationSet load_observations(const std::string& path) {
  const Table table = load_table(path);
  ObservationSet obs;
  const int sensor_col = table.column("sensor");
  const int value_col = table.column("value");
  if (value_col < 0) throw std::runtime_error("load_observations: no value column in " + path);
  obs.x = table.data.col(0);
  obs.y = table.data.col(value_col);
  if (sensor_col >= 0) obs.sensor = table.data.col(sensor_col).cast<int>();
  return obs;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out << text;
  if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace embcal
