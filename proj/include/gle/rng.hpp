#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace gle {

/// Reproducible random stream.  The generator state is a pure function of
/// (seed, stream), so any (seed, stream) pair yields the same sequence on
/// every platform; derived() gives statistically independent substreams for
/// fan-out across chains, replicates or threads.
///
/// Core generator: xoshiro256++ seeded through splitmix64.  All draws below
/// are implemented here rather than with <random> distributions, whose
/// output is not pinned by the standard.
class RngHandle {
public:
    explicit RngHandle(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Substream keyed by (a, b); independent of draws made so far.
    RngHandle derived(std::uint64_t a, std::uint64_t b = 0) const;

    std::uint64_t next_u64();

    /// Uniform on {0, ..., n-1}; unbiased.  n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Uniform on {lo, ..., hi} inclusive.
    long uniform_int(long lo, long hi);

    /// Uniform on [0, 1) with 53 random bits.
    double unit();

    bool coin() { return (next_u64() >> 63) != 0; }

    /// Standard normal (Box-Muller; the spare value is cached).
    double normal();

    /// Uniform on {0, ..., n-1} for big n; exact via top-bits rejection.
    boost::multiprecision::cpp_int below_big(const boost::multiprecision::cpp_int& n);

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace gle
