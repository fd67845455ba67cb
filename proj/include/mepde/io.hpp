#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mepde {

/// Shortest decimal string that round-trips a double (17 significant digits).
std::string format_g17(double v);

/// Write via a temporary file in the same directory, then rename, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// LF-terminated key=value lines, UTF-8.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value);
    void add(std::string key, double value);
    void add(std::string key, long long value);
    std::string to_string() const;
    void write(const std::filesystem::path& path) const;
};

}  // namespace mepde
