#include "salc/digest.hpp"

namespace salc {

namespace {

std::uint64_t fnv1a(std::string_view data, std::uint64_t hash) {
    constexpr std::uint64_t kPrime = 1099511628211ull;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= kPrime;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

}  // namespace

std::string stable_digest(std::string_view bytes) {
    const std::uint64_t lo = fnv1a(bytes, 14695981039346656037ull);
    const std::uint64_t hi = fnv1a(bytes, 1099511628211ull * 31 + 7);
    return hex64(hi) + hex64(lo);
}

}  // namespace salc
