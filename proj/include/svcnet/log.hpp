#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace svcnet::log {

enum class Level { Info, Warning, Error };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink; returns the previous one. The default
/// sink writes "[level] message" lines to standard error.
Sink set_sink(Sink sink);

void write(Level level, std::string_view message);

inline void info(std::string_view message) { write(Level::Info, message); }
inline void warn(std::string_view message) { write(Level::Warning, message); }
inline void error(std::string_view message) { write(Level::Error, message); }

}  // namespace svcnet::log
