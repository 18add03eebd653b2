#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Deterministic RNG so failures reproduce; reseed per suite.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(range(0, static_cast<std::int64_t>(n) - 1));
    }

    bool chance(double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p;
    }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[index(items.size())];
    }

    double finite_double() {
        for (;;) {
            std::uint64_t b = bits();
            double d;
            static_assert(sizeof d == sizeof b);
            __builtin_memcpy(&d, &b, sizeof d);
            if (d == d && d != 1.0 / 0.0 && d != -1.0 / 0.0)
                return d;
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Random scalar from the BMP, excluding surrogates and U+0000.
inline std::uint32_t random_bmp_scalar(Rng& rng) {
    for (;;) {
        auto cp = static_cast<std::uint32_t>(rng.range(1, 0xFFFF));
        if (cp < 0xD800 || cp > 0xDFFF)
            return cp;
    }
}

// Arbitrary text over the BMP; control characters restricted to tab/LF/CR
// (anything else cannot appear in a well-formed document).
inline std::string random_text(Rng& rng, std::size_t max_len) {
    std::string out;
    std::size_t len = rng.index(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        switch (rng.index(8)) {
        case 0: {
            const char specials[] = {'<', '>', '&', '"', '\'', '\t', '\n', '\r', ' '};
            out.push_back(specials[rng.index(sizeof specials)]);
            break;
        }
        case 1:
            append_utf8(out, random_bmp_scalar(rng));
            break;
        default:
            out.push_back(static_cast<char>('a' + rng.index(26)));
        }
    }
    return out;
}

inline std::string random_ncname(Rng& rng, std::size_t max_extra = 8) {
    static const std::string start = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    static const std::string rest = start + "0123456789-.";
    std::string out;
    out.push_back(start[rng.index(start.size())]);
    std::size_t extra = rng.index(max_extra + 1);
    for (std::size_t i = 0; i < extra; ++i)
        out.push_back(rest[rng.index(rest.size())]);
    return out;
}

}  // namespace testsupport
