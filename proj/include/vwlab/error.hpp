#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace vwlab {

enum class ErrorKind {
  InvalidParameter,
  InvalidInput,
  UnsupportedDimension,
  DivergentConstant,
  OutOfDomain,
  MissingHistory,
  TableTooShort,
  UndefinedDistance,
  Config,
  Hypothesis,
  SolverAbort,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// Message conversion is deferred to the failure path.
template <class Msg>
inline void require(bool cond, ErrorKind kind, Msg&& what) {
  if (!cond) [[unlikely]] fail(kind, std::string(std::forward<Msg>(what)));
}

// Warnings go to a process-wide sink; default writes to stderr.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace vwlab
