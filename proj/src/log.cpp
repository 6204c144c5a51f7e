#include "newslabel/log.hpp"

#include <atomic>
#include <cstdio>

namespace newslabel {

namespace {
std::atomic<bool> g_quiet{false};
}

void warn(const std::string& message) {
  if (!g_quiet.load()) {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

void set_quiet(bool quiet) { g_quiet.store(quiet); }

}  // namespace newslabel
