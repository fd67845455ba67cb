#include "mepde/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace mepde {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

void Manifest::add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
}

void Manifest::add(std::string key, double value) {
    entries.emplace_back(std::move(key), format_g17(value));
}

void Manifest::add(std::string key, long long value) {
    entries.emplace_back(std::move(key), std::to_string(value));
}

std::string Manifest::to_string() const {
    std::string out;
    for (const auto& [k, v] : entries) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

void Manifest::write(const std::filesystem::path& path) const {
    write_file_atomic(path, to_string());
}

}  // namespace mepde
