#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace kpplab::csv {

/// Decimal with 17 significant digits.
std::string number(double v);

void header(std::ostream& os, std::initializer_list<std::string_view> columns);
void header(std::ostream& os, std::span<const std::string> columns);
void row(std::ostream& os, std::initializer_list<double> values);
void row(std::ostream& os, std::span<const double> values);

}  // namespace kpplab::csv
