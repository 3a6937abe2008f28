#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bogwatch {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ChannelError : public Error {
 public:
  using Error::Error;
};

class OutOfFieldError : public Error {
 public:
  using Error::Error;
};

class InvalidDirectionError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class NoSunError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

class UndefinedVarianceError : public Error {
 public:
  using Error::Error;
};

// Raised when a required input file or directory does not exist.
class MissingInputError : public Error {
 public:
  explicit MissingInputError(std::string path)
      : Error("missing input: " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// One or more rows violated a record invariant; all offending lines are listed.
class RowValidationError : public Error {
 public:
  RowValidationError(std::vector<std::size_t> lines, const std::string& what);
  const std::vector<std::size_t>& lines() const noexcept { return lines_; }

 private:
  std::vector<std::size_t> lines_;
};

class DivisionGuardError : public Error {
 public:
  explicit DivisionGuardError(std::vector<std::size_t> indices);
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(int epoch)
      : Error("training diverged (non-finite loss) at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace bogwatch
