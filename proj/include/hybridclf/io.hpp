#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hybridclf {

/// Whole file as bytes. Throws ConfigError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// partial file never appears at the final location.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace hybridclf
