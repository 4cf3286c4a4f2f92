#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace distsec {

/// 17 significant digits, '.' decimal separator, locale independent.
std::string format_real(double x);

/// RFC 4180 quoting: fields containing ',', '"', CR or LF are quoted, quotes doubled.
std::string csv_field(std::string_view text);
std::string csv_line(const std::vector<std::string>& fields);

} // namespace distsec
