#pragma once

#include <cstdint>
#include <vector>

namespace bufsim {

// Deterministic splittable PRNG (splitmix64 core). Every random decision in
// the library draws from a stream derived from one user-supplied 64-bit seed
// plus a stream id, so parallel sweep points and Monte Carlo trials produce
// the same results regardless of execution order.
class Rng {
  public:
    Rng() = default;
    explicit Rng(std::uint64_t state) : state_(state) {}

    // Independent stream for (seed, stream_id). Extra ids can be chained:
    // stream(stream(seed, a).state(), b).
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(mix(seed ^ mix(stream_id + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t state() const { return state_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
};

// Fixed stream ids, so unrelated draws never share a sequence.
namespace stream_id {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kSync = 2;
inline constexpr std::uint64_t kFlow = 3;
inline constexpr std::uint64_t kTrial = 4;
inline constexpr std::uint64_t kSweep = 5;
}  // namespace stream_id

}  // namespace bufsim
