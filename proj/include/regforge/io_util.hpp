#pragma once

#include <cstddef>
#include <string>

namespace regforge {

// Writes via a sibling temp file followed by rename, so readers never see a
// partially written artifact.
void atomic_write(const std::string& path, const char* data, std::size_t size);
void atomic_write(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace regforge
