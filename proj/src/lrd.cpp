// SPDX-License-Identifier: Apache-2.0
#include "merawav/lrd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "merawav/errors.hpp"
#include "merawav/rng.hpp"

namespace merawav {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 transform, length must be a power of two.
// sign = -1 for the forward DFT, +1 for the unnormalized inverse.
void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = static_cast<double>(sign) * 2.0 * kPi /
                           static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// psi(x) for x > 0: shift into the asymptotic range, then the standard
// Bernoulli series.
double digamma(double x) {
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

// Small-sample bias of log2 of a mean of n_j squared Gaussians:
// E[log2(chi2_n / n)] = (psi(n/2) - ln(n/2)) / ln 2.
double log2_chi2_bias(std::size_t n) {
    const double half = 0.5 * static_cast<double>(n);
    return (digamma(half) - std::log(half)) / kLn2;
}

void check_hurst_range(double hurst) {
    if (!(hurst > 0.0) || !(hurst < 1.0)) {
        throw ConfigError("hurst exponent must lie in (0, 1), got " +
                          std::to_string(hurst));
    }
}

}  // namespace

double fgn_autocovariance(double hurst, std::size_t lag) {
    if (lag == 0) return 1.0;
    const double k = static_cast<double>(lag);
    const double twoh = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, twoh) - 2.0 * std::pow(k, twoh) +
                  std::pow(k - 1.0, twoh));
}

WaveletSpectrum wavelet_spectrum(const std::vector<double>& x, int max_scale,
                                 const FirFilterPair& f) {
    if (max_scale < 1) throw ConfigError("spectrum needs max_scale >= 1");
    if ((x.size() >> max_scale) < 8) {
        throw DataError("series too short for scale " + std::to_string(max_scale) +
                        ": needs at least " +
                        std::to_string(std::size_t{8} << max_scale) + " samples");
    }
    require_finite(x, "wavelet_spectrum");

    WaveletSpectrum spec;
    std::vector<double> current = x;
    bool any_energy = false;
    for (int j = 1; j <= max_scale; ++j) {
        if (current.size() % 2 != 0) current.pop_back();
        LayerOutput lo = dwt_level(current, f);
        double energy = 0.0;
        for (double d : lo.detail) energy += d * d;
        const double mean = energy / static_cast<double>(lo.detail.size());
        if (mean > 0.0) any_energy = true;
        spec.scales.push_back(j);
        spec.s.push_back(std::log2(mean));
        spec.counts.push_back(lo.detail.size());
        current = std::move(lo.approx);
    }
    if (!any_energy) {
        throw DataError("flat signal: no detail energy at any scale");
    }
    return spec;
}

int default_max_scale(std::size_t n) {
    int j = 0;
    while ((n >> (j + 1)) >= 8) ++j;
    return j;
}

HurstEstimate hurst_av(const std::vector<double>& x, int j1, int j2,
                       const FirFilterPair& f) {
    if (j1 < 1 || j1 >= j2) {
        throw ConfigError("scale range needs 1 <= j1 < j2, got [" +
                          std::to_string(j1) + ", " + std::to_string(j2) + "]");
    }
    const WaveletSpectrum spec = wavelet_spectrum(x, j2, f);

    HurstEstimate est;
    est.j1 = j1;
    est.j2 = j2;

    // Weighted least squares of the (bias-corrected) log energies on the
    // scale index. Weights are the reciprocal Gaussian variance
    // approximation var(y_j) ~ 2 / (n_j ln^2 2).
    double sw = 0.0, sj = 0.0, sjj = 0.0, sy = 0.0, sjy = 0.0;
    for (int j = j1; j <= j2; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j - 1);
        const double raw = spec.s[idx];
        const std::size_t n = spec.counts[idx];
        if (!std::isfinite(raw)) {
            throw DataError("detail energy below 1e-300 at scale " +
                            std::to_string(j) + "; logscale fit undefined");
        }
        const double w = static_cast<double>(n) * kLn2 * kLn2 / 2.0;
        const double y = raw - log2_chi2_bias(n);
        est.per_scale.push_back(ScalePoint{j, raw, n, w});
        sw += w;
        sj += w * j;
        sjj += w * j * j;
        sy += w * y;
        sjy += w * j * y;
    }

    const double delta = sw * sjj - sj * sj;
    const double slope = (sw * sjy - sj * sy) / delta;
    const double slope_sigma = std::sqrt(sw / delta);

    est.h = 0.5 * (slope + 1.0);
    est.ci_low = est.h - 1.96 * slope_sigma / 2.0;
    est.ci_high = est.h + 1.96 * slope_sigma / 2.0;
    est.beta = 2.0 - 2.0 * est.h;
    return est;
}

HurstEstimate hurst_av_default(const std::vector<double>& x,
                               const FirFilterPair& f) {
    const int j2 = default_max_scale(x.size());
    return hurst_av(x, kDefaultFineScale, j2, f);
}

double delta_h(const std::vector<double>& original,
               const std::vector<double>& reconstructed, int j1, int j2,
               const FirFilterPair& f) {
    if (original.size() != reconstructed.size()) {
        throw DataError("delta_h: series lengths differ");
    }
    return hurst_av(reconstructed, j1, j2, f).h - hurst_av(original, j1, j2, f).h;
}

std::vector<double> fgn_generate_circulant(std::size_t n, double hurst,
                                           std::uint64_t seed) {
    check_hurst_range(hurst);
    if (!is_power_of_two(n)) {
        throw DataError("circulant generator needs a power-of-two length, got " +
                        std::to_string(n));
    }

    std::size_t m = 2 * n;
    for (int attempt = 0;; ++attempt) {
        // First row of the circulant embedding: gamma over 0..m/2, mirrored.
        std::vector<std::complex<double>> eig(m);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t lag = std::min(j, m - j);
            eig[j] = fgn_autocovariance(hurst, lag);
        }
        fft_radix2(eig, -1);

        double min_eig = 0.0;
        for (const auto& e : eig) min_eig = std::min(min_eig, e.real());
        if (min_eig < -1e-9) {
            if (attempt >= 3) {
                throw NumericalError(
                    "circulant embedding not positive definite after 3 doublings "
                    "(min eigenvalue " + std::to_string(min_eig) + ")");
            }
            m *= 2;
            continue;
        }

        GaussianSampler gauss(seed);
        std::vector<std::complex<double>> spectrum(m);
        const double scale0 = std::sqrt(std::max(0.0, eig[0].real()) /
                                        static_cast<double>(m));
        spectrum[0] = scale0 * gauss();
        const double scale_half = std::sqrt(std::max(0.0, eig[m / 2].real()) /
                                            static_cast<double>(m));
        spectrum[m / 2] = scale_half * gauss();
        for (std::size_t k = 1; k < m / 2; ++k) {
            const double s = std::sqrt(std::max(0.0, eig[k].real()) /
                                       (2.0 * static_cast<double>(m)));
            const std::complex<double> z(s * gauss(), s * gauss());
            spectrum[k] = z;
            spectrum[m - k] = std::conj(z);
        }

        fft_radix2(spectrum, +1);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = spectrum[i].real();
        return out;
    }
}

namespace {

// Cholesky factor of the Toeplitz fGn covariance. Cached for the last (n, h)
// pair: repeated-seed sampling refactorizes nothing.
std::shared_ptr<const std::vector<double>> fgn_cholesky(std::size_t n,
                                                        double hurst) {
    static std::mutex mutex;
    static std::size_t cached_n = 0;
    static double cached_h = -1.0;
    static std::shared_ptr<const std::vector<double>> cached;

    std::lock_guard<std::mutex> lock(mutex);
    if (cached_n == n && cached_h == hurst) return cached;

    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) gamma[k] = fgn_autocovariance(hurst, k);

    auto lower = std::make_shared<std::vector<double>>(n * n, 0.0);
    std::vector<double>& l = *lower;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = gamma[i - j];
            for (std::size_t k = 0; k < j; ++k) {
                acc -= l[i * n + k] * l[j * n + k];
            }
            if (i == j) {
                if (acc <= 0.0) {
                    throw NumericalError(
                        "covariance factorization failed at pivot " +
                        std::to_string(i));
                }
                l[i * n + i] = std::sqrt(acc);
            } else {
                l[i * n + j] = acc / l[j * n + j];
            }
        }
    }

    cached_n = n;
    cached_h = hurst;
    cached = lower;
    return cached;
}

}  // namespace

std::vector<double> fgn_generate_exact(std::size_t n, double hurst,
                                       std::uint64_t seed) {
    check_hurst_range(hurst);
    if (n == 0 || n > 4096) {
        throw DataError("exact generator supports 1 <= n <= 4096, got " +
                        std::to_string(n));
    }
    const auto lower_ptr = fgn_cholesky(n, hurst);
    const std::vector<double>& lower = *lower_ptr;

    GaussianSampler gauss(seed);
    std::vector<double> z(n);
    for (double& v : z) v = gauss();

    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k) acc += lower[i * n + k] * z[k];
        out[i] = acc;
    }
    return out;
}

std::vector<double> fgn_generate(std::size_t n, double hurst, std::uint64_t seed) {
    check_hurst_range(hurst);
    if (is_power_of_two(n)) return fgn_generate_circulant(n, hurst, seed);
    if (n <= 4096) return fgn_generate_exact(n, hurst, seed);
    throw DataError("fgn_generate needs a power-of-two length (fast path) or "
                    "n <= 4096 (exact path), got " + std::to_string(n));
}

}  // namespace merawav
