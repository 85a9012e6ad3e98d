#pragma once

// Deterministic random number generation.
//
// All stochastic code in this library draws from Rng, a thin wrapper around
// std::mt19937_64 with hand-rolled conversions. The standard distribution
// objects are implementation-defined, so uniform/normal/gamma draws are
// implemented here directly; a given seed therefore yields the same stream on
// every platform and toolchain.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace mmf {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child-stream seed for (master, cell, rep). Each stage is a bijection of the
// previous state xored with the next index, so distinct indexes map to
// distinct seeds for a fixed master seed and collisions across index pairs
// are avalanche-random.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t cell_index,
                                    std::uint64_t rep_index) noexcept {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ cell_index);
    h = mix64(h ^ rep_index);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() { return 1.0 - uniform01(); }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    // Gamma(shape, 1) via Marsaglia-Tsang; Johnk boost for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) {
            throw std::invalid_argument("gamma: shape must be positive");
        }
        if (shape < 1.0) {
            const double u = uniform01_open_low();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open_low();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) {
                return d * v;
            }
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
                return d * v;
            }
        }
    }

    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

    // Student-t with `dof` degrees of freedom, location 0, unit scale.
    double student_t(double dof) {
        if (!(dof > 0.0)) {
            throw std::invalid_argument("student_t: dof must be positive");
        }
        const double z = normal();
        const double w = chi_square(dof);
        return z * std::sqrt(dof / w);
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mmf
