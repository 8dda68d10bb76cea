#pragma once

#include <functional>
#include <string>

namespace bos {

using LogSink = std::function<void(const std::string &)>;

/// Replaces the warning sink (default: stderr). Returns the previous sink.
LogSink set_warning_sink(LogSink sink);

void warn(const std::string &message);

} // namespace bos
