#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace zsworld {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a precondition: mismatched dimensions, k == 0, an action id
/// outside the vocabulary, a non-finite parameter.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Problems with dataset contents or files. The CLI maps every DataError to
/// exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public DataError {
 public:
  using DataError::DataError;
};

class VersionMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class TruncatedFileError : public DataError {
 public:
  using DataError::DataError;
};

class ActionOutOfRangeError : public DataError {
 public:
  using DataError::DataError;
};

class ManifestMismatchError : public DataError {
 public:
  using DataError::DataError;
};

/// A stored record breaks a dataset invariant (sigma <= 0, non-finite value,
/// broken successor chain). Carries the offending location.
class InvariantViolationError : public DataError {
 public:
  InvariantViolationError(const std::string& what, std::size_t trajectory,
                          std::size_t index)
      : DataError(what + " (trajectory " + std::to_string(trajectory) +
                  ", index " + std::to_string(index) + ")"),
        trajectory_(trajectory),
        index_(index) {}

  std::size_t trajectory() const noexcept { return trajectory_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t trajectory_;
  std::size_t index_;
};

/// Pearson correlation of a series with zero variance.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

/// Retrieval found no transition passing the action mask (or a fit was asked
/// for on an empty batch). During rollouts the failing step is attached.
class EmptyRetrievalError : public Error {
 public:
  explicit EmptyRetrievalError(const std::string& what,
                               std::optional<std::size_t> step = std::nullopt)
      : Error(step ? what + " at step " + std::to_string(*step) : what),
        step_(step) {}

  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  std::optional<std::size_t> step_;
};

}  // namespace zsworld
