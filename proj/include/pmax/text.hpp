#pragma once

#include <string>

namespace pmax {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double x);

}  // namespace pmax
