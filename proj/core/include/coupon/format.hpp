#pragma once

#include <string>

namespace coupon {

// Decimal rendering with 17 significant digits; round-trips every double.
std::string format_double(double value);

}  // namespace coupon
