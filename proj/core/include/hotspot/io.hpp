#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

namespace hotspot {

/// Reads a whole file. Throws IoError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it over `path`, so
/// readers never observe a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace hotspot
