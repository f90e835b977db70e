#pragma once

#include <stdexcept>
#include <string>

namespace andes {

/// Base class for every error the library reports. The CLI maps these to
/// exit code 1 (user/data error); anything else escaping is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: invalid UTF-8, mismatched line counts, bad TSV rows,
/// subsequence violations.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (wrong split, language
/// mismatch, empty input, invalid configuration).
class ContractError : public Error {
 public:
  using Error::Error;
};

class UnknownLanguageError : public ContractError {
 public:
  explicit UnknownLanguageError(const std::string& code)
      : ContractError("unknown language code '" + code + "'") {}
};

/// A translation backend failed or violated its output contract.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace andes
