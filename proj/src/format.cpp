#include "shiftgrad/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace shiftgrad {

std::string format_shortest(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), ptr);
}

std::string format_g15(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 15);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), ptr);
}

double parse_double(const std::string& token) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
        throw std::invalid_argument("not a number: '" + token + "'");
    }
    return value;
}

long long parse_integer(const std::string& token) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
        throw std::invalid_argument("not an integer: '" + token + "'");
    }
    return value;
}

}  // namespace shiftgrad
