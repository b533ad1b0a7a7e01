#pragma once

#include <string>

namespace cyber {

/// Locale-independent, round-trippable rendering (17 significant digits).
std::string format_double(double value);
double parse_double(const std::string& text);

}  // namespace cyber
