#include "regforge/io_util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "regforge/types.hpp"

namespace regforge {

void atomic_write(const std::string& path, const char* data, std::size_t size) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open for write: " + tmp);
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) throw Error(ErrorCode::io, "write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorCode::io, "rename failed: " + path);
}

void atomic_write(const std::string& path, const std::string& text) {
  atomic_write(path, text.data(), text.size());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace regforge
