#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "smellfix/result.hpp"

namespace smellfix {

inline result<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {errc::io_error, "cannot open " + path.string()};
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return {errc::io_error, "error reading " + path.string()};
    return buf.str();
}

inline result<bool> write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return {errc::io_error, "cannot open " + path.string() + " for writing"};
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) return {errc::io_error, "error writing " + path.string()};
    return true;
}

}  // namespace smellfix
