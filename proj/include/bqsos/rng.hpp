#pragma once

#include <cstdint>
#include <random>

namespace bqsos {

/// Splitmix-style mixing used to derive independent sub-seeds from a master
/// seed, so restart r of task t always sees the same stream regardless of
/// scheduling or thread count.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
   public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    static Rng derived(uint64_t seed, uint64_t stream) { return Rng(mix_seed(seed, stream)); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(eng_);
    }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }
    std::mt19937_64& engine() { return eng_; }

   private:
    std::mt19937_64 eng_;
};

}  // namespace bqsos
