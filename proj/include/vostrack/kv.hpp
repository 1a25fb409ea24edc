#pragma once

#include <string>
#include <utility>
#include <vector>

namespace vostrack {

// One parsed `key = value` line. Duplicate keys are allowed at this layer;
// consumers decide whether repeats accumulate or conflict.
struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

// Parses flat `key = value` text. Blank lines and lines starting with `#`
// are skipped; surrounding whitespace is trimmed from keys and values.
// Throws Error(parse) with the offending line number on malformed input.
std::vector<KvEntry> parse_kv_text(const std::string& text, const std::string& origin);

// Reads the whole file, throwing Error(io) when it cannot be opened.
std::string read_text_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

std::vector<KvEntry> parse_kv_file(const std::string& path);

// Canonical shortest round-trip formatting for doubles.
std::string format_double(double value);

double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

// Splits on a delimiter without collapsing empty fields.
std::vector<std::string> split(const std::string& text, char delim);

std::string trim(const std::string& text);

}  // namespace vostrack
