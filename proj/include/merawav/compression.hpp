// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "merawav/filterbank.hpp"
#include "merawav/transform.hpp"

namespace merawav {

/// Fraction of coefficients kept, in (0, 1].
struct RetentionRatio {
    explicit RetentionRatio(double r);
    double value;

    /// Coefficients retained out of n: ceil(value * n).
    std::size_t kept(std::size_t n) const;
};

/// Keeps the top-ceil(rho*N) coefficients by absolute value in flattened
/// order [approx, d^(L), ..., d^(1)], ties broken toward lower flattened
/// index, and zeroes the rest. Shape preserved.
CoefficientPyramid threshold_compress(const CoefficientPyramid& p,
                                      const RetentionRatio& rho);

/// Peak signal-to-noise ratio in dB, with MAX taken over the original
/// window. Exact reconstruction returns +infinity.
double psnr(const std::vector<double>& x, const std::vector<double>& x_hat);

/// An analysis/synthesis pair under a display label: either the two-tap
/// cascade of a FilterStack or the classical DWT of a longer filter pair.
class LabeledTransform {
public:
    LabeledTransform(std::string label, FilterStack stack);
    LabeledTransform(std::string label, FirFilterPair pair, std::size_t levels);

    static LabeledTransform haar_baseline(std::size_t levels);
    static LabeledTransform db4_baseline(std::size_t levels);

    const std::string& label() const { return label_; }
    std::size_t levels() const { return levels_; }

    CoefficientPyramid analyze(const std::vector<double>& x) const;
    std::vector<double> synthesize(const CoefficientPyramid& p) const;

private:
    std::string label_;
    std::variant<FilterStack, FirFilterPair> kernel_;
    std::size_t levels_;
};

/// analyze -> threshold -> synthesize -> psnr for one window.
double psnr_at(const LabeledTransform& t, const std::vector<double>& window,
               const RetentionRatio& rho);

/// One aggregated rate-distortion cell: mean PSNR across windows for a
/// (transform, rho) pair. delta_h is filled by pipelines that also compare
/// Hurst estimates of the reconstruction.
struct RateDistortionPoint {
    std::string transform;
    double rho = 0.0;
    std::size_t kept = 0;
    double psnr_db = 0.0;
    std::optional<double> delta_h;
};

struct RateDistortionTable {
    std::vector<RateDistortionPoint> points;
    std::vector<std::string> transforms;  // subject first, then baselines

    /// PSNR of `transform` minus PSNR of `baseline` at the same rho.
    double delta_psnr(const std::string& transform, const std::string& baseline,
                      double rho) const;
    const RateDistortionPoint& at(const std::string& transform, double rho) const;
};

/// Sweeps every (window, transform, rho) cell: analyze, threshold at rho,
/// synthesize, PSNR; aggregates by arithmetic mean across windows.
RateDistortionTable rd_sweep(const std::vector<std::vector<double>>& windows,
                             const FilterStack& stack,
                             const std::vector<LabeledTransform>& baselines,
                             const std::vector<RetentionRatio>& rhos);

/// Default evaluation grid {0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8}.
std::vector<RetentionRatio> default_rho_grid();

}  // namespace merawav
