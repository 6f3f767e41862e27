#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tkg {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
/// Lowercases and collapses internal whitespace runs to one space.
std::string normalize_key(std::string_view s);

/// Strict decimal number: optional sign, digits, optional fraction, optional exponent.
std::optional<double> parse_number(std::string_view s);

/// Parses "12", "12.5", "12.345" into cents, rounding half-up past two decimals.
std::optional<std::int64_t> parse_cents(std::string_view s);
/// Renders cents as "12.50"; negative values get a leading '-'.
std::string format_cents(std::int64_t cents);
/// Integer division rounded half-up (away from zero for the half case).
std::int64_t div_round_half_up(std::int64_t num, std::int64_t den);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace tkg
