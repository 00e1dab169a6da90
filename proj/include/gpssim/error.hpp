#pragma once

#include <stdexcept>
#include <string>

namespace gpssim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ServerUnsynchronized : public Error {
 public:
  using Error::Error;
};

class ChainBroken : public Error {
 public:
  using Error::Error;
};

class EmptySampleSet : public Error {
 public:
  using Error::Error;
};

class SingularGeometry : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class ZeroSpeed : public Error {
 public:
  using Error::Error;
};

class OverlappingCoverage : public Error {
 public:
  using Error::Error;
};

class EmptyFixSet : public Error {
 public:
  using Error::Error;
};

class InfeasibleDeployment : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected by the schema validator. `path` is the JSON
/// pointer-like location of the offending field (e.g. "deployment.v_max_kmh").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace gpssim
