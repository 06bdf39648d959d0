// SPDX-License-Identifier: Apache-2.0
#include "merawav/filterbank.hpp"

#include <cmath>
#include <complex>

#include "merawav/errors.hpp"

namespace merawav {

namespace {
constexpr double kPi = 3.14159265358979323846;

double tap_energy(const std::vector<double>& taps) {
    double e = 0.0;
    for (double t : taps) e += t * t;
    return e;
}
}  // namespace

FirFilterPair::FirFilterPair(std::vector<double> g, std::vector<double> h)
    : g_(std::move(g)), h_(std::move(h)) {
    if (g_.empty() || g_.size() != h_.size()) {
        throw ConfigError("filter pair needs equal, nonzero tap counts");
    }
    const double eg = tap_energy(g_);
    const double eh = tap_energy(h_);
    if (std::abs(eg - 1.0) > kNormTol || std::abs(eh - 1.0) > kNormTol) {
        throw NumericalError("filters are not orthonormal: sum g^2 = " +
                             std::to_string(eg) + ", sum h^2 = " +
                             std::to_string(eh));
    }
}

FirFilterPair filters_from_matrix(const OrthogonalPair& u) {
    return FirFilterPair({u.u00(), u.u01()}, {u.u10(), u.u11()});
}

FrequencyResponse tap_response(const std::vector<double>& taps,
                               std::size_t grid_size) {
    if (grid_size < 2) throw ConfigError("frequency grid needs at least 2 points");
    FrequencyResponse r;
    r.omega.resize(grid_size);
    r.magnitude.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double w = kPi * static_cast<double>(i) /
                         static_cast<double>(grid_size - 1);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t n = 0; n < taps.size(); ++n) {
            acc += taps[n] * std::exp(std::complex<double>(
                                 0.0, -w * static_cast<double>(n)));
        }
        r.omega[i] = w;
        r.magnitude[i] = std::abs(acc);
    }
    return r;
}

std::pair<FrequencyResponse, FrequencyResponse> frequency_response(
    const FirFilterPair& f, std::size_t grid_size) {
    return {tap_response(f.g(), grid_size), tap_response(f.h(), grid_size)};
}

LayerOutput polyphase_analyze_oracle(const std::vector<double>& x,
                                     const OrthogonalPair& u) {
    if (x.size() < 2 || x.size() % 2 != 0) {
        throw DataError("polyphase_analyze_oracle: input length must be even, got " +
                        std::to_string(x.size()));
    }
    const FirFilterPair f = filters_from_matrix(u);
    const std::size_t n = x.size();
    const std::size_t taps = f.taps();

    // Full correlation against each filter, zero extension outside [0, n),
    // then decimation by two.
    auto correlate_decimate = [&](const std::vector<double>& filt) {
        std::vector<double> out(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            double acc = 0.0;
            for (std::size_t m = 0; m < taps; ++m) {
                const std::size_t idx = 2 * k + m;
                if (idx < n) acc += filt[m] * x[idx];
            }
            out[k] = acc;
        }
        return out;
    };

    LayerOutput lo;
    lo.approx = correlate_decimate(f.g());
    lo.detail = correlate_decimate(f.h());
    return lo;
}

bool qmf_check(const OrthogonalPair& u, double tol) {
    return std::abs(u.u10() - u.u01()) <= tol && std::abs(u.u11() + u.u00()) <= tol;
}

std::pair<double, double> dc_gain_over_qmf_family(std::size_t theta_grid_size) {
    if (theta_grid_size < 8) throw ConfigError("theta grid needs at least 8 points");
    double best_gain = -1.0;
    double best_theta = 0.0;
    for (std::size_t i = 0; i < theta_grid_size; ++i) {
        const double theta = 2.0 * kPi * static_cast<double>(i) /
                             static_cast<double>(theta_grid_size);
        const double gain = std::abs(std::cos(theta) + std::sin(theta));
        // |G(0)| has period pi; report the representative in [0, pi/2].
        double reduced = std::fmod(theta, kPi);
        if (reduced > kPi / 2.0) continue;
        if (gain > best_gain) {
            best_gain = gain;
            best_theta = reduced;
        }
    }
    return {best_theta, best_gain};
}

FirFilterPair daubechies4_filters() {
    const double s3 = std::sqrt(3.0);
    const double scale = 4.0 * std::sqrt(2.0);
    const std::vector<double> g = {(1.0 + s3) / scale, (3.0 + s3) / scale,
                                   (3.0 - s3) / scale, (1.0 - s3) / scale};
    std::vector<double> h(4);
    for (std::size_t n = 0; n < 4; ++n) {
        h[n] = (n % 2 == 0 ? 1.0 : -1.0) * g[3 - n];
    }
    return FirFilterPair(g, h);
}

LayerOutput dwt_level(const std::vector<double>& x, const FirFilterPair& f) {
    if (x.size() < 2 || x.size() % 2 != 0) {
        throw DataError("dwt_level: input length must be even, got " +
                        std::to_string(x.size()));
    }
    require_finite(x, "dwt_level");
    const std::size_t n = x.size();
    const std::size_t taps = f.taps();
    LayerOutput lo;
    lo.approx.resize(n / 2);
    lo.detail.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t m = 0; m < taps; ++m) {
            const double v = x[(2 * k + m) % n];
            a += f.g()[m] * v;
            d += f.h()[m] * v;
        }
        lo.approx[k] = a;
        lo.detail[k] = d;
    }
    return lo;
}

std::vector<double> idwt_level(const std::vector<double>& a,
                               const std::vector<double>& d,
                               const FirFilterPair& f) {
    if (a.size() != d.size()) {
        throw DataError("idwt_level: length mismatch, approx " +
                        std::to_string(a.size()) + " vs detail " +
                        std::to_string(d.size()));
    }
    const std::size_t n = 2 * a.size();
    const std::size_t taps = f.taps();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t m = 0; m < taps; ++m) {
            x[(2 * k + m) % n] += f.g()[m] * a[k] + f.h()[m] * d[k];
        }
    }
    return x;
}

CoefficientPyramid baseline_dwt(const std::vector<double>& x, const FirFilterPair& f,
                                std::size_t levels) {
    if (levels == 0) throw ConfigError("baseline_dwt: levels must be >= 1");
    const std::size_t block = std::size_t{1} << levels;
    if (x.empty() || x.size() % block != 0) {
        throw DataError("baseline_dwt: length " + std::to_string(x.size()) +
                        " not divisible by 2^" + std::to_string(levels));
    }
    CoefficientPyramid p;
    p.details.resize(levels);
    std::vector<double> current = x;
    for (std::size_t ell = 0; ell < levels; ++ell) {
        LayerOutput lo = dwt_level(current, f);
        p.details[ell] = std::move(lo.detail);
        current = std::move(lo.approx);
    }
    p.approx = std::move(current);
    return p;
}

std::vector<double> baseline_idwt(const CoefficientPyramid& p,
                                  const FirFilterPair& f) {
    if (p.depth() == 0) throw DataError("baseline_idwt: empty pyramid");
    std::vector<double> current = p.approx;
    for (std::size_t ell = p.depth(); ell-- > 0;) {
        if (p.details[ell].size() != current.size()) {
            throw DataError("baseline_idwt: detail band " + std::to_string(ell + 1) +
                            " has " + std::to_string(p.details[ell].size()) +
                            " coefficients, expected " +
                            std::to_string(current.size()));
        }
        current = idwt_level(current, p.details[ell], f);
    }
    return current;
}

}  // namespace merawav
