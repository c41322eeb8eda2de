#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tdlg {

// mt19937_64 with hand-rolled distributions so that generated datasets and
// splits are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // unbiased integer in [0, bound)
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (-bound) % bound;
        while (true) {
            const std::uint64_t x = eng_();
            if (x >= threshold) return x % bound;
        }
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Box-Muller, one value per call
    double normal(double mu, double sigma) {
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace tdlg
