#pragma once

#include <functional>
#include <string>

namespace lrnlm {

/// Receives library warnings. The default sink writes to std::clog.
using LogSink = std::function<void(const std::string&)>;

/// Replaces the warning sink; an empty function silences warnings.
void set_log_sink(LogSink sink);
void log_warning(const std::string& message);

}  // namespace lrnlm
