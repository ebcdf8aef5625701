#include "spinchain/random_stream.hpp"

namespace spinchain {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys)
    : key_(mix64(master_seed ^ 0x5EEDC0DE5EEDC0DEULL)) {
    for (std::uint64_t k : keys) {
        key_ = mix64(key_ + kGolden * (k + 1));
    }
}

std::uint64_t RandomStream::next_u64() {
    ++counter_;
    return mix64(key_ + kGolden * counter_);
}

double RandomStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

bool RandomStream::bernoulli(double p) {
    return uniform01() < p;
}

}  // namespace spinchain
