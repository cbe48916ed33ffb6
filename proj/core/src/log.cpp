#include "lrnlm/log.hpp"

#include <iostream>
#include <mutex>

namespace lrnlm {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& sink() {
  static LogSink s = [](const std::string& msg) { std::clog << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void set_log_sink(LogSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void log_warning(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

}  // namespace lrnlm
