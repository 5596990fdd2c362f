#include "contagion/log.hpp"

#include <iostream>
#include <mutex>

namespace contagion::log {
namespace {
std::mutex sink_mutex;
Sink current_sink;
}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex);
  std::swap(sink, current_sink);
  return sink;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (current_sink) {
    current_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace contagion::log
