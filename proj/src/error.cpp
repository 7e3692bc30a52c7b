#include "vwlab/error.hpp"

#include <iostream>
#include <mutex>

namespace vwlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::DivergentConstant: return "divergent-constant";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::MissingHistory: return "missing-history";
    case ErrorKind::TableTooShort: return "extend-table";
    case ErrorKind::UndefinedDistance: return "undefined-distance";
    case ErrorKind::Config: return "config";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::SolverAbort: return "solver-abort";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

namespace {
std::mutex sink_mutex;
WarningSink& sink_ref() {
  static WarningSink sink = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return sink;
}
}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  sink_ref() = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (sink_ref()) sink_ref()(message);
}

}  // namespace vwlab
