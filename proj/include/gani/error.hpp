#pragma once

#include <stdexcept>
#include <string>

namespace gani {

// Base for every error the library raises. `kind()` is a short stable token
// the CLI prints so failures are machine-parseable.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error("invalid_argument", what) {}
};

class DatasetError : public Error {
 public:
  explicit DatasetError(const std::string& what) : Error("dataset", what) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what) : Error("training", what) {}
};

class AttackError : public Error {
 public:
  explicit AttackError(const std::string& what) : Error("attack", what) {}
};

}  // namespace gani
