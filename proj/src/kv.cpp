#include "vostrack/kv.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "vostrack/errors.hpp"

namespace vostrack {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

std::vector<std::string> split(const std::string& text, char delim) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(delim, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::vector<KvEntry> parse_kv_text(const std::string& text, const std::string& origin) {
    std::vector<KvEntry> entries;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::parse,
                  origin + ":" + std::to_string(line_no) + ": expected `key = value`");
        KvEntry entry;
        entry.key = trim(stripped.substr(0, eq));
        entry.value = trim(stripped.substr(eq + 1));
        entry.line = line_no;
        if (entry.key.empty())
            raise(ErrorCode::parse,
                  origin + ":" + std::to_string(line_no) + ": empty key");
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io, "cannot write " + path);
    out << text;
    if (!out) raise(ErrorCode::io, "write failed for " + path);
}

std::vector<KvEntry> parse_kv_file(const std::string& path) {
    return parse_kv_text(read_text_file(path), path);
}

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    const std::string stripped = trim(text);
    double value = 0.0;
    const auto result =
        std::from_chars(stripped.data(), stripped.data() + stripped.size(), value);
    if (result.ec != std::errc{} || result.ptr != stripped.data() + stripped.size())
        raise(ErrorCode::parse, context + ": not a number: `" + text + "`");
    return value;
}

long parse_long(const std::string& text, const std::string& context) {
    const std::string stripped = trim(text);
    long value = 0;
    const auto result =
        std::from_chars(stripped.data(), stripped.data() + stripped.size(), value);
    if (result.ec != std::errc{} || result.ptr != stripped.data() + stripped.size())
        raise(ErrorCode::parse, context + ": not an integer: `" + text + "`");
    return value;
}

}  // namespace vostrack
