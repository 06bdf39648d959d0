// SPDX-License-Identifier: Apache-2.0
#include "merawav/compression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "merawav/errors.hpp"

namespace merawav {

RetentionRatio::RetentionRatio(double r) : value(r) {
    if (!(r > 0.0) || r > 1.0) {
        throw ConfigError("retention ratio must lie in (0, 1], got " +
                          std::to_string(r));
    }
}

std::size_t RetentionRatio::kept(std::size_t n) const {
    const auto k = static_cast<std::size_t>(
        std::ceil(value * static_cast<double>(n)));
    return std::min(std::max<std::size_t>(k, 1), n);
}

CoefficientPyramid threshold_compress(const CoefficientPyramid& p,
                                      const RetentionRatio& rho) {
    const std::size_t n = p.total_size();
    const std::size_t keep = rho.kept(n);

    const std::vector<double> flat = p.flatten();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(flat[a]);
        const double mb = std::abs(flat[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });

    std::vector<bool> keep_mask(n, false);
    for (std::size_t i = 0; i < keep; ++i) keep_mask[order[i]] = true;

    // Rebuild in the same flattened order [approx, d^(L), ..., d^(1)].
    CoefficientPyramid out = p;
    std::size_t idx = 0;
    for (double& v : out.approx) {
        if (!keep_mask[idx++]) v = 0.0;
    }
    for (std::size_t ell = out.details.size(); ell-- > 0;) {
        for (double& v : out.details[ell]) {
            if (!keep_mask[idx++]) v = 0.0;
        }
    }
    return out;
}

double psnr(const std::vector<double>& x, const std::vector<double>& x_hat) {
    if (x.size() != x_hat.size()) {
        throw DataError("psnr: window lengths differ, " + std::to_string(x.size()) +
                        " vs " + std::to_string(x_hat.size()));
    }
    if (x.empty()) throw DataError("psnr: empty window");

    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) throw DataError("psnr: all-zero reference window");

    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x[i] - x_hat[i];
        acc += r * r;
    }
    const double mse = acc / static_cast<double>(x.size());
    if (mse < 1e-300) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

LabeledTransform::LabeledTransform(std::string label, FilterStack stack)
    : label_(std::move(label)),
      kernel_(std::move(stack)),
      levels_(std::get<FilterStack>(kernel_).depth()) {}

LabeledTransform::LabeledTransform(std::string label, FirFilterPair pair,
                                   std::size_t levels)
    : label_(std::move(label)), kernel_(std::move(pair)), levels_(levels) {
    if (levels_ == 0) throw ConfigError("transform needs at least one level");
}

LabeledTransform LabeledTransform::haar_baseline(std::size_t levels) {
    return LabeledTransform("haar", filters_from_matrix(OrthogonalPair::haar()),
                            levels);
}

LabeledTransform LabeledTransform::db4_baseline(std::size_t levels) {
    return LabeledTransform("db4", daubechies4_filters(), levels);
}

CoefficientPyramid LabeledTransform::analyze(const std::vector<double>& x) const {
    if (const auto* stack = std::get_if<FilterStack>(&kernel_)) {
        return merawav::analyze(x, *stack);
    }
    return baseline_dwt(x, std::get<FirFilterPair>(kernel_), levels_);
}

std::vector<double> LabeledTransform::synthesize(const CoefficientPyramid& p) const {
    if (const auto* stack = std::get_if<FilterStack>(&kernel_)) {
        return merawav::synthesize(p, *stack);
    }
    return baseline_idwt(p, std::get<FirFilterPair>(kernel_));
}

double psnr_at(const LabeledTransform& t, const std::vector<double>& window,
               const RetentionRatio& rho) {
    if (rho.kept(window.size()) == window.size()) {
        // Nothing is dropped and the transform is orthonormal, so the
        // composition is the identity; report the exact-reconstruction
        // sentinel instead of transform roundoff.
        return psnr(window, window);
    }
    const CoefficientPyramid p = t.analyze(window);
    const CoefficientPyramid kept = threshold_compress(p, rho);
    return psnr(window, t.synthesize(kept));
}

double RateDistortionTable::delta_psnr(const std::string& transform,
                                       const std::string& baseline,
                                       double rho) const {
    return at(transform, rho).psnr_db - at(baseline, rho).psnr_db;
}

const RateDistortionPoint& RateDistortionTable::at(const std::string& transform,
                                                   double rho) const {
    for (const auto& pt : points) {
        if (pt.transform == transform && pt.rho == rho) return pt;
    }
    throw DataError("rate-distortion table has no cell (" + transform + ", " +
                    std::to_string(rho) + ")");
}

RateDistortionTable rd_sweep(const std::vector<std::vector<double>>& windows,
                             const FilterStack& stack,
                             const std::vector<LabeledTransform>& baselines,
                             const std::vector<RetentionRatio>& rhos) {
    if (windows.empty()) throw DataError("rd_sweep: no windows supplied");
    if (rhos.empty()) throw ConfigError("rd_sweep: no retention ratios supplied");

    std::vector<LabeledTransform> transforms;
    transforms.emplace_back("learned", stack);
    for (const auto& b : baselines) transforms.push_back(b);

    RateDistortionTable table;
    for (const auto& t : transforms) table.transforms.push_back(t.label());

    for (const auto& t : transforms) {
        for (const auto& rho : rhos) {
            double acc = 0.0;
            for (const auto& w : windows) {
                acc += psnr_at(t, w, rho);
            }
            RateDistortionPoint pt;
            pt.transform = t.label();
            pt.rho = rho.value;
            pt.kept = rho.kept(windows.front().size());
            pt.psnr_db = acc / static_cast<double>(windows.size());
            table.points.push_back(pt);
        }
    }
    return table;
}

std::vector<RetentionRatio> default_rho_grid() {
    return {RetentionRatio(0.01), RetentionRatio(0.02), RetentionRatio(0.05),
            RetentionRatio(0.1),  RetentionRatio(0.2),  RetentionRatio(0.4),
            RetentionRatio(0.8)};
}

}  // namespace merawav
