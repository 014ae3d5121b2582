#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rwre {

// Shortest decimal form that round-trips a double.
std::string format_double(double x);

std::uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace rwre
