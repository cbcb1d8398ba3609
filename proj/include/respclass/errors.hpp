#pragma once

#include <stdexcept>
#include <string>

namespace respclass {

// Error categories, mapped to process exit codes by the CLI:
// UsageError -> 2, DataError -> 3, NumericError -> 4.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace respclass
