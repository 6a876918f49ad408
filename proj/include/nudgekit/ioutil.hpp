#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "nudgekit/errors.hpp"

namespace nudgekit::io {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file for reading: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Write via temporary file + rename so readers never see partial output.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " +
                          path.parent_path().string() + ": " + ec.message());
        }
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open file for writing: " + tmp.string());
        }
        out << content;
        if (!out.flush()) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " +
                      path.string() + ": " + ec.message());
    }
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

inline double parse_double(std::string_view text, const char* context) {
    double value = 0.0;
    const auto result =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw ValidationError(std::string(context) + ": invalid number '" +
                              std::string(text) + "'");
    }
    return value;
}

inline long parse_long(std::string_view text, const char* context) {
    long value = 0;
    const auto result =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw ValidationError(std::string(context) + ": invalid integer '" +
                              std::string(text) + "'");
    }
    return value;
}

}  // namespace nudgekit::io
