#include "kpplab/csv.hpp"

#include <fmt/format.h>

#include <ostream>

namespace kpplab::csv {

namespace {

template <class Range, class Emit>
void line(std::ostream& os, const Range& items, Emit emit) {
  bool first = true;
  for (const auto& item : items) {
    if (!first) os << ',';
    emit(item);
    first = false;
  }
  os << '\n';
}

}  // namespace

std::string number(double v) { return fmt::format("{:.17g}", v); }

void header(std::ostream& os, std::initializer_list<std::string_view> columns) {
  line(os, columns, [&](std::string_view c) { os << c; });
}

void header(std::ostream& os, std::span<const std::string> columns) {
  line(os, columns, [&](const std::string& c) { os << c; });
}

void row(std::ostream& os, std::initializer_list<double> values) {
  line(os, values, [&](double v) { os << number(v); });
}

void row(std::ostream& os, std::span<const double> values) {
  line(os, values, [&](double v) { os << number(v); });
}

}  // namespace kpplab::csv
