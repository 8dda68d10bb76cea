#include "bos/log.hpp"

#include <iostream>
#include <mutex>

namespace bos {
namespace {

std::mutex g_sink_mutex;

LogSink &sink_slot() {
  static LogSink sink = [](const std::string &m) { std::cerr << "warning: " << m << '\n'; };
  return sink;
}

} // namespace

LogSink set_warning_sink(LogSink sink) {
  std::lock_guard lock(g_sink_mutex);
  LogSink previous = std::move(sink_slot());
  sink_slot() = std::move(sink);
  return previous;
}

void warn(const std::string &message) {
  std::lock_guard lock(g_sink_mutex);
  if (sink_slot()) sink_slot()(message);
}

} // namespace bos
