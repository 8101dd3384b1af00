/*
 Copyright 2026 The stochtumor Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stumor {

enum class ErrorKind {
  GridMismatch,
  NonZeroMean,
  NoConvergence,
  LinearSolveFailure,
  PicardNoConvergence,
  NonFiniteState,
  StepMismatch,
  EmptyEnsemble,
  BaseTrajectoryMismatch,
  LineSearchFailure,
  Unsupported,
  ConfigInvalid,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonZeroMean: return "NonZeroMean";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::PicardNoConvergence: return "PicardNoConvergence";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::StepMismatch: return "StepMismatch";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::BaseTrajectoryMismatch: return "BaseTrajectoryMismatch";
    case ErrorKind::LineSearchFailure: return "LineSearchFailure";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception. `kind` is the structured category, the message
/// carries the detail (key path, step index, residual, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the category prefix.
  const std::string& detail() const noexcept { return detail_; }

 protected:
  Error(ErrorKind kind, const std::string& what, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(detail) {}

 private:
  ErrorKind kind_;
  std::string detail_;
};

/// Raised by configuration validation; `assumption` names the violated
/// model assumption ("A1", "A5", ...) or the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string assumption, const std::string& what)
      : Error(ErrorKind::ConfigInvalid, assumption + ": " + what), assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

/// Solver failure tagged with the step (and path, when known) where it happened.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, long step = -1, long path = -1)
      : Error(kind,
              what + (step >= 0 ? " [step " + std::to_string(step) + "]" : std::string()) +
                  (path >= 0 ? " [path " + std::to_string(path) + "]" : std::string()),
              what),
        step_(step),
        path_(path) {}

  long step() const noexcept { return step_; }
  long path() const noexcept { return path_; }

 private:
  long step_;
  long path_;
};

}  // namespace stumor
