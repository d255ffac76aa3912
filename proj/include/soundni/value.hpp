#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace soundni {

using Value = mpz_class;

std::string to_string(const Value& v);

// Throws std::invalid_argument on malformed input.
Value parse_value(std::string_view text);

// True when v fits in a signed 64-bit integer.
bool fits_int64(const Value& v);
long long to_int64(const Value& v);

} // namespace soundni
