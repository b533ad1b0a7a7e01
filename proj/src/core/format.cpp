#include "cyber/core/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "cyber/core/errors.hpp"

namespace cyber {

std::string format_double(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text)
{
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    require(res.ec == std::errc{} && res.ptr == text.data() + text.size(),
            "cannot parse number '" + text + "'");
    return value;
}

}  // namespace cyber
