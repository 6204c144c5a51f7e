#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace newslabel {

// Writes content to a temp file in the same directory, then renames over
// path, so a crashed run never leaves a half-written artifact behind.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Fixed 9-significant-digit decimal formatting used by every text artifact.
std::string format_real(double v);

std::uint32_t fnv1a32(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace newslabel
