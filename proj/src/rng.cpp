#include "gle/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gle {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

} // namespace

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    std::uint64_t x = seed ^ 0x6a09e667f3bcc909ULL;
    x ^= splitmix64(x) + stream;
    for (auto& word : s_) word = splitmix64(x);
    // xoshiro must not start from the all-zero state
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
}

RngHandle RngHandle::derived(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t x = stream_ ^ 0x452821e638d01377ULL;
    x ^= splitmix64(x) + a;
    x ^= splitmix64(x) + b;
    return RngHandle(seed_, splitmix64(x));
}

std::uint64_t RngHandle::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t RngHandle::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    // Lemire's multiply-shift with rejection of the biased low region.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(next_u64()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

long RngHandle::uniform_int(long lo, long hi) {
    if (hi < lo) throw std::invalid_argument("empty range");
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double RngHandle::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngHandle::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = unit();
    while (u1 == 0.0) u1 = unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

boost::multiprecision::cpp_int
RngHandle::below_big(const boost::multiprecision::cpp_int& n) {
    using boost::multiprecision::cpp_int;
    if (n <= 0) throw std::invalid_argument("empty range");
    if (n <= std::numeric_limits<std::uint64_t>::max())
        return below(n.convert_to<std::uint64_t>());

    const unsigned bits = boost::multiprecision::msb(n) + 1;
    const unsigned words = (bits + 63) / 64;
    const unsigned top_bits = bits - (words - 1) * 64;
    const std::uint64_t top_mask =
        top_bits == 64 ? ~0ULL : ((std::uint64_t(1) << top_bits) - 1);
    for (;;) {
        cpp_int r = 0;
        for (unsigned w = 0; w < words; ++w) {
            std::uint64_t word = next_u64();
            if (w + 1 == words) word &= top_mask;
            r |= cpp_int(word) << (64 * w);
        }
        if (r < n) return r;
    }
}

} // namespace gle
