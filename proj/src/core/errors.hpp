#pragma once

#include <stdexcept>
#include <string>

namespace interformer {

// File-system failures (open/read/write); everything else that goes wrong at
// runtime stays a plain std::runtime_error.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace interformer
