#pragma once

#include <span>
#include <string>
#include <vector>

#include "respclass/core.hpp"

namespace respclass {

// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

// Fixed 17-significant-digit form used by model files.
std::string format_double17(double v);

struct CsvReadOptions {
  bool zero_one_labels = false;  // accept t,y in {0,1}, mapped to {-1,+1}
  double default_e = 0.5;        // constant propensity when no e column
};

// Dataset files: header x1,...,xd,t,y with an optional trailing e column.
// Parse or validation failures throw DataError with 1-based line numbers.
Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& opts = {});

// Writes the e column only for per-observation propensities.
void write_dataset_csv(const std::string& path, const Dataset& ds);

// Ground-truth files: header x1,...,xd,y_plus,y_minus,r,a.
std::vector<GroundTruthUnit> read_ground_truth_csv(const std::string& path);
void write_ground_truth_csv(const std::string& path,
                            std::span<const GroundTruthUnit> units);

// Minimal RFC-agnostic CSV splitter for plain (unquoted) files.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace respclass
