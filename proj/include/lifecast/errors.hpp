#pragma once

#include <stdexcept>
#include <string>

namespace lifecast {

/// Data or configuration supplied by the user is malformed.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A text input (HMD table, CSV, JSON) could not be parsed.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// The log-ratio transform saw a cell it cannot map (d <= 0).
class ZeroOrNegativeCountError : public std::runtime_error {
 public:
  ZeroOrNegativeCountError(int year, int age_index, const std::string& what)
      : std::runtime_error(what), year(year), age_index(age_index) {}
  int year;
  int age_index;
};

/// The cumulative distribution hit 0 or 1 before the last age, so its
/// logit is infinite.
class DegenerateCdfError : public std::runtime_error {
 public:
  DegenerateCdfError(int year, int age_index, const std::string& what)
      : std::runtime_error(what), year(year), age_index(age_index) {}
  int year;
  int age_index;
};

/// A coordinate has zero spread but nonzero residuals, so no finite
/// ratio exists there.
class DegenerateGammaError : public std::runtime_error {
 public:
  DegenerateGammaError(int age_index, const std::string& what)
      : std::runtime_error(what), age_index(age_index) {}
  int age_index;
};

}  // namespace lifecast
