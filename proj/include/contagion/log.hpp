#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace contagion::log {

using Sink = std::function<void(std::string_view)>;

// Warnings go to stderr unless a sink is installed. Returns the previous sink.
Sink set_sink(Sink sink);
void warn(std::string_view message);

}  // namespace contagion::log
