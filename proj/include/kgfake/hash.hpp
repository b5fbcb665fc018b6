#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kgfake {

// 64-bit FNV-1a. Used for fingerprints and ids that must be stable across
// platforms and runs; not a cryptographic hash.
class Fnv1a {
public:
    Fnv1a& update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= kPrime;
        }
        return *this;
    }

    // Length-prefixed field so ("ab","c") and ("a","bc") hash differently.
    Fnv1a& field(std::string_view bytes) noexcept {
        update(std::to_string(bytes.size()));
        update(":");
        return update(bytes);
    }

    std::uint64_t value() const noexcept { return state_; }
    std::string hex() const;

private:
    static constexpr std::uint64_t kOffset = 14695981039346656037ull;
    static constexpr std::uint64_t kPrime = 1099511628211ull;
    std::uint64_t state_ = kOffset;
};

inline std::string to_hex(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
        v >>= 4;
    }
    return out;
}

inline std::string Fnv1a::hex() const { return to_hex(state_); }

inline std::string fnv1a_hex(std::string_view bytes) { return Fnv1a{}.update(bytes).hex(); }

}  // namespace kgfake
