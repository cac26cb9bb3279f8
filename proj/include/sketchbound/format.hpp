#pragma once

#include <optional>
#include <string>

namespace sketchbound {

/// Shortest text that round-trips the double exactly ("%.17g").
std::string format_double(double x);

/// Empty string for an absent value.
std::string format_optional(const std::optional<double>& x);

}  // namespace sketchbound
