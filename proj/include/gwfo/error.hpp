#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gwfo {

// Library error with a stable machine-readable category. The CLI maps
// categories to exit codes; tests match on category, not message text.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(std::string category, const std::string& message) {
  throw Error(std::move(category), message);
}

}  // namespace gwfo
