#pragma once

#include <stdexcept>
#include <string>

namespace unmix {

// File and format problems (bad header, truncated payload, ragged CSV).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures (non-finite values mid-chain, solver non-convergence).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace unmix
