#include "svcnet/log.hpp"

#include <iostream>
#include <mutex>

namespace svcnet::log {
namespace {

void default_sink(Level level, std::string_view message) {
  const char* tag = level == Level::Info ? "info" : level == Level::Warning ? "warn" : "error";
  std::cerr << '[' << tag << "] " << message << '\n';
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = default_sink;
  return sink;
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(current_sink());
  current_sink() = sink ? std::move(sink) : Sink(default_sink);
  return previous;
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  current_sink()(level, message);
}

}  // namespace svcnet::log
