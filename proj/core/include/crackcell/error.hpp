#pragma once

#include <stdexcept>
#include <string>

namespace crackcell {

// Thrown for recoverable domain errors: bad input files, invalid configs,
// solver breakdown. The CLI maps these to stderr + nonzero exit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crackcell
