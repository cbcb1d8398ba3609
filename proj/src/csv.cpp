#include "respclass/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "respclass/errors.hpp"

namespace respclass {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_double17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

double parse_field_double(const std::string& raw, std::size_t line_no,
                          const std::string& column) {
  const std::string text = trim(raw);
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || text.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse '" +
                    raw + "' in column " + column);
  }
  return value;
}

int parse_label(const std::string& raw, std::size_t line_no,
                const std::string& column, bool zero_one) {
  const double v = parse_field_double(raw, line_no, column);
  if (zero_one) {
    if (v == 0.0) return -1;
    if (v == 1.0) return +1;
  } else {
    if (v == -1.0) return -1;
    if (v == 1.0) return +1;
  }
  throw DataError("line " + std::to_string(line_no) + ": column " + column +
                  " must be " + (zero_one ? "0 or 1" : "-1 or +1") + ", got '" +
                  raw + "'");
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  std::size_t d = 0;
  while (d < header.size() &&
         trim(header[d]) == "x" + std::to_string(d + 1)) {
    ++d;
  }
  if (d == 0) {
    throw DataError(path + ": header must start with x1,x2,...");
  }
  bool has_e = false;
  if (header.size() == d + 2 && trim(header[d]) == "t" &&
      trim(header[d + 1]) == "y") {
    has_e = false;
  } else if (header.size() == d + 3 && trim(header[d]) == "t" &&
             trim(header[d + 1]) == "y" && trim(header[d + 2]) == "e") {
    has_e = true;
  } else {
    throw DataError(path + ": header must be x1..x" + std::to_string(d) +
                    ",t,y with an optional trailing e column");
  }

  Dataset ds;
  ds.d = d;
  std::vector<double> es;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::size_t expected = d + 2 + (has_e ? 1 : 0);
    if (fields.size() != expected) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Observation obs;
    obs.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      obs.x[j] = parse_field_double(fields[j], line_no, "x" + std::to_string(j + 1));
    }
    obs.t = parse_label(fields[d], line_no, "t", opts.zero_one_labels);
    obs.y = parse_label(fields[d + 1], line_no, "y", opts.zero_one_labels);
    if (has_e) {
      const double e = parse_field_double(fields[d + 2], line_no, "e");
      if (!(e > 0.0 && e < 1.0)) {
        throw DataError("line " + std::to_string(line_no) +
                        ": e must lie strictly inside (0,1)");
      }
      es.push_back(e);
    }
    ds.observations.push_back(std::move(obs));
  }

  ds.propensity = has_e ? PropensitySpec::per_observation(std::move(es))
                        : PropensitySpec::constant(opts.default_e);
  require_valid(ds);
  return ds;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out = open_for_write(path);
  const bool per_row = !ds.propensity.is_constant();
  for (std::size_t j = 0; j < ds.d; ++j) {
    out << 'x' << (j + 1) << ',';
  }
  out << "t,y";
  if (per_row) out << ",e";
  out << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Observation& obs = ds.observations[i];
    for (double v : obs.x) out << format_double(v) << ',';
    out << obs.t << ',' << obs.y;
    if (per_row) out << ',' << format_double(ds.propensity.e_at(i));
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<GroundTruthUnit> read_ground_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  std::size_t d = 0;
  while (d < header.size() && trim(header[d]) == "x" + std::to_string(d + 1)) {
    ++d;
  }
  const std::vector<std::string> tail = {"y_plus", "y_minus", "r", "a"};
  if (d == 0 || header.size() != d + tail.size()) {
    throw DataError(path + ": header must be x1..xd,y_plus,y_minus,r,a");
  }
  for (std::size_t j = 0; j < tail.size(); ++j) {
    if (trim(header[d + j]) != tail[j]) {
      throw DataError(path + ": header must be x1..xd,y_plus,y_minus,r,a");
    }
  }

  std::vector<GroundTruthUnit> units;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != d + tail.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(d + tail.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    GroundTruthUnit unit;
    unit.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      unit.x[j] = parse_field_double(fields[j], line_no, "x" + std::to_string(j + 1));
    }
    unit.y_plus = parse_label(fields[d], line_no, "y_plus", false);
    unit.y_minus = parse_label(fields[d + 1], line_no, "y_minus", false);
    unit.r = parse_label(fields[d + 2], line_no, "r", false);
    unit.a = parse_label(fields[d + 3], line_no, "a", false);
    units.push_back(std::move(unit));
  }
  return units;
}

void write_ground_truth_csv(const std::string& path,
                            std::span<const GroundTruthUnit> units) {
  std::ofstream out = open_for_write(path);
  const std::size_t d = units.empty() ? 0 : units.front().x.size();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << (j + 1) << ',';
  out << "y_plus,y_minus,r,a\n";
  for (const GroundTruthUnit& unit : units) {
    for (double v : unit.x) out << format_double(v) << ',';
    out << unit.y_plus << ',' << unit.y_minus << ',' << unit.r << ',' << unit.a
        << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace respclass
