#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace mpnnc::detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_real(double x) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) return std::to_string(x);
    return std::string(buf.data(), end);
}

/// splitmix64 step; derives independent per-trial seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace mpnnc::detail
