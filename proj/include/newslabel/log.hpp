#pragma once

#include <string>

namespace newslabel {

// Warnings go to stderr so file artifacts stay deterministic.
void warn(const std::string& message);

void set_quiet(bool quiet);

}  // namespace newslabel
