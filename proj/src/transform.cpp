// SPDX-License-Identifier: Apache-2.0
#include "merawav/transform.hpp"

#include <cmath>
#include <numeric>

#include "merawav/errors.hpp"

namespace merawav {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double Mat2::orthogonality_defect() const {
    const Mat2 gram = transpose() * (*this);
    const double r00 = gram.e00 - 1.0;
    const double r11 = gram.e11 - 1.0;
    return std::sqrt(r00 * r00 + gram.e01 * gram.e01 + gram.e10 * gram.e10 +
                     r11 * r11);
}

double frobenius_distance(const Mat2& a, const Mat2& b) {
    const double d0 = a.e00 - b.e00;
    const double d1 = a.e01 - b.e01;
    const double d2 = a.e10 - b.e10;
    const double d3 = a.e11 - b.e11;
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3);
}

OrthogonalPair::OrthogonalPair(const Mat2& m) : m_(m) {
    const double defect = m.orthogonality_defect();
    if (!(defect <= kOrthTol)) {
        throw NumericalError("matrix is not orthogonal: |U^T U - I|_F = " +
                             std::to_string(defect));
    }
    if (!(std::abs(std::abs(m.det()) - 1.0) <= kOrthTol)) {
        throw NumericalError("matrix determinant is not +-1: det = " +
                             std::to_string(m.det()));
    }
}

OrthogonalPair OrthogonalPair::haar() {
    return OrthogonalPair(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2);
}

OrthogonalPair OrthogonalPair::identity() { return OrthogonalPair(1.0, 0.0, 0.0, 1.0); }

OrthogonalPair OrthogonalPair::rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return OrthogonalPair(c, -s, s, c);
}

OrthogonalPair OrthogonalPair::reflection(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return OrthogonalPair(c, s, s, -c);
}

FilterStack::FilterStack(std::vector<OrthogonalPair> levels)
    : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw ConfigError("filter stack needs at least one level");
    }
}

FilterStack FilterStack::haar(std::size_t depth) {
    std::vector<OrthogonalPair> levels(depth, OrthogonalPair::haar());
    return FilterStack(std::move(levels));
}

std::vector<Mat2> FilterStack::matrices() const {
    std::vector<Mat2> out;
    out.reserve(levels_.size());
    for (const auto& u : levels_) out.push_back(u.matrix());
    return out;
}

std::size_t CoefficientPyramid::total_size() const {
    std::size_t n = approx.size();
    for (const auto& d : details) n += d.size();
    return n;
}

std::vector<double> CoefficientPyramid::flatten() const {
    std::vector<double> out;
    out.reserve(total_size());
    out.insert(out.end(), approx.begin(), approx.end());
    for (auto it = details.rbegin(); it != details.rend(); ++it) {
        out.insert(out.end(), it->begin(), it->end());
    }
    return out;
}

double CoefficientPyramid::energy() const {
    auto sq = [](double acc, double v) { return acc + v * v; };
    double e = std::accumulate(approx.begin(), approx.end(), 0.0, sq);
    for (const auto& d : details) e = std::accumulate(d.begin(), d.end(), e, sq);
    return e;
}

void require_finite(const std::vector<double>& x, const std::string& context) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw DataError(context + ": non-finite sample at index " +
                            std::to_string(i));
        }
    }
}

LayerOutput layer_analyze(const std::vector<double>& x, const Mat2& u) {
    if (x.size() < 2 || x.size() % 2 != 0) {
        throw DataError("layer_analyze: input length must be even and >= 2, got " +
                        std::to_string(x.size()));
    }
    require_finite(x, "layer_analyze");

    const std::size_t half = x.size() / 2;
    LayerOutput out;
    out.approx.resize(half);
    out.detail.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        const double even = x[2 * k];
        const double odd = x[2 * k + 1];
        out.approx[k] = u.e00 * even + u.e01 * odd;
        out.detail[k] = u.e10 * even + u.e11 * odd;
    }
    return out;
}

LayerOutput layer_analyze(const std::vector<double>& x, const OrthogonalPair& u) {
    return layer_analyze(x, u.matrix());
}

std::vector<double> layer_synthesize(const std::vector<double>& a,
                                     const std::vector<double>& d, const Mat2& u) {
    if (a.size() != d.size()) {
        throw DataError("layer_synthesize: length mismatch, approx " +
                        std::to_string(a.size()) + " vs detail " +
                        std::to_string(d.size()));
    }
    // Applies U^T to each (a_k, d_k) pair and interleaves.
    std::vector<double> x(2 * a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        x[2 * k] = u.e00 * a[k] + u.e10 * d[k];
        x[2 * k + 1] = u.e01 * a[k] + u.e11 * d[k];
    }
    return x;
}

std::vector<double> layer_synthesize(const std::vector<double>& a,
                                     const std::vector<double>& d,
                                     const OrthogonalPair& u) {
    return layer_synthesize(a, d, u.matrix());
}

CoefficientPyramid analyze_cascade(const std::vector<double>& x,
                                   const std::vector<Mat2>& stack) {
    const std::size_t depth = stack.size();
    if (depth == 0) throw ConfigError("analyze: empty filter stack");
    const std::size_t block = std::size_t{1} << depth;
    if (x.empty() || x.size() % block != 0) {
        throw DataError("analyze: length " + std::to_string(x.size()) +
                        " not divisible by 2^" + std::to_string(depth));
    }

    CoefficientPyramid p;
    p.details.resize(depth);
    std::vector<double> current = x;
    for (std::size_t ell = 0; ell < depth; ++ell) {
        LayerOutput lo = layer_analyze(current, stack[ell]);
        p.details[ell] = std::move(lo.detail);
        current = std::move(lo.approx);
    }
    p.approx = std::move(current);
    return p;
}

CoefficientPyramid analyze(const std::vector<double>& x, const FilterStack& stack) {
    return analyze_cascade(x, stack.matrices());
}

std::vector<double> synthesize_cascade(const CoefficientPyramid& p,
                                       const std::vector<Mat2>& stack) {
    const std::size_t depth = stack.size();
    if (p.depth() != depth) {
        throw DataError("synthesize: pyramid depth " + std::to_string(p.depth()) +
                        " does not match stack depth " + std::to_string(depth));
    }
    std::vector<double> current = p.approx;
    for (std::size_t ell = depth; ell-- > 0;) {
        if (p.details[ell].size() != current.size()) {
            throw DataError("synthesize: detail band " + std::to_string(ell + 1) +
                            " has " + std::to_string(p.details[ell].size()) +
                            " coefficients, expected " +
                            std::to_string(current.size()));
        }
        current = layer_synthesize(current, p.details[ell], stack[ell]);
    }
    return current;
}

std::vector<double> synthesize(const CoefficientPyramid& p, const FilterStack& stack) {
    return synthesize_cascade(p, stack.matrices());
}

}  // namespace merawav
