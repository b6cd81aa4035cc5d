#pragma once

#include <stdexcept>
#include <string>

namespace topicstream {

// Bad or inconsistent input: unreadable files, parse failures, failed
// validation, unsatisfiable construction parameters. Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while running: ranker sessions, protocol errors. Maps to exit code 3.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topicstream
