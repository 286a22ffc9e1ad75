#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "tde/common.hpp"

namespace tde {

// RFC-4180-ish splitter: handles quoted fields and embedded commas.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

// Calls fn for each non-empty line.
void for_each_line(const std::string& path,
                   const std::function<void(const std::string&)>& fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

u64 file_digest(const std::string& path); // fnv1a64 of the raw bytes

} // namespace tde
