#include "soundni/value.hpp"

#include <limits>
#include <stdexcept>

namespace soundni {

std::string to_string(const Value& v) { return v.get_str(10); }

Value parse_value(std::string_view text) {
    std::string s(text);
    Value v;
    if (s.empty() || v.set_str(s, 10) != 0) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
    return v;
}

bool fits_int64(const Value& v) {
    static const Value lo(std::to_string(std::numeric_limits<long long>::min()));
    static const Value hi(std::to_string(std::numeric_limits<long long>::max()));
    return v >= lo && v <= hi;
}

long long to_int64(const Value& v) {
    if (!fits_int64(v)) {
        throw std::out_of_range("value does not fit in 64 bits: " + to_string(v));
    }
    return std::stoll(to_string(v));
}

} // namespace soundni
