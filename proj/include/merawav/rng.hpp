// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace merawav {

/// Seeded standard-normal source. Box-Muller on explicit 53-bit uniforms
/// rather than std::normal_distribution, so identical seeds give identical
/// streams across standard libraries (output files are byte-reproducible).
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        // u1 in (0, 1], u2 in [0, 1).
        const double u1 =
            1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace merawav
