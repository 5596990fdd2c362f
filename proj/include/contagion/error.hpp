#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

// Raised when a caller-supplied parameter is outside its domain. `field()`
// names the offending parameter so front ends can report it verbatim.
class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace contagion
