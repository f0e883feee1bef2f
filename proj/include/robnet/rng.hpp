#ifndef ROBNET_RNG_HPP
#define ROBNET_RNG_HPP

#include <cstdint>
#include <vector>

namespace robnet {

// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
// std:: distributions so that streams are identical across platforms and
// standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound). Rejection sampling, bias-free.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform real in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform real in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream, e.g. one per sample index.
    Rng derive(std::uint64_t index) const {
        Rng mix(state_ ^ (0xd1342543de82ef95ULL * (index + 1)));
        Rng child(mix.next_u64());
        return child;
    }

private:
    std::uint64_t state_;
};

} // namespace robnet

#endif // ROBNET_RNG_HPP
