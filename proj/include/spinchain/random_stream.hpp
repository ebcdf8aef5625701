#pragma once

#include <cstdint>
#include <initializer_list>

namespace spinchain {

// Counter-based pseudorandom stream. The i-th draw is a pure function of
// (key, i), so a stream keyed by (master seed, realization index) yields the
// same numbers no matter which thread consumes it or in which order streams
// are created.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys);

    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();
    double uniform(double lo, double hi);
    bool bernoulli(double p);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace spinchain
