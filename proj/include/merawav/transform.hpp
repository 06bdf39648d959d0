// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace merawav {

/// Plain 2x2 real matrix, row-major [[e00,e01],[e10,e11]]. Used both for
/// validated orthogonal isometries and for ambient-space quantities
/// (gradients, optimizer moments) that are not orthogonal.
struct Mat2 {
    double e00 = 0.0, e01 = 0.0, e10 = 0.0, e11 = 0.0;

    double det() const { return e00 * e11 - e01 * e10; }
    Mat2 transpose() const { return {e00, e10, e01, e11}; }

    /// Frobenius norm of U^T U - I; zero iff the matrix is orthogonal.
    double orthogonality_defect() const;

    Mat2 operator*(const Mat2& o) const {
        return {e00 * o.e00 + e01 * o.e10, e00 * o.e01 + e01 * o.e11,
                e10 * o.e00 + e11 * o.e10, e10 * o.e01 + e11 * o.e11};
    }
};

double frobenius_distance(const Mat2& a, const Mat2& b);

/// One per-scale learnable isometry: a 2x2 orthogonal matrix. Construction
/// validates U^T U = I and |det| = 1 to 1e-12, so a live OrthogonalPair is
/// always safe to use in the cascade. det may be -1 (Haar is a reflection).
class OrthogonalPair {
public:
    static constexpr double kOrthTol = 1e-12;

    explicit OrthogonalPair(const Mat2& m);
    OrthogonalPair(double u00, double u01, double u10, double u11)
        : OrthogonalPair(Mat2{u00, u01, u10, u11}) {}

    static OrthogonalPair haar();
    static OrthogonalPair identity();
    /// Rotation by theta, det = +1.
    static OrthogonalPair rotation(double theta);
    /// Reflection [[cos,sin],[sin,-cos]], det = -1; the QMF family form.
    static OrthogonalPair reflection(double theta);

    const Mat2& matrix() const { return m_; }
    double u00() const { return m_.e00; }
    double u01() const { return m_.e01; }
    double u10() const { return m_.e10; }
    double u11() const { return m_.e11; }
    double det() const { return m_.det(); }

private:
    Mat2 m_;
};

/// The full transform parameters: one orthogonal matrix per decomposition
/// level, finest scale first. Depth L >= 1.
class FilterStack {
public:
    explicit FilterStack(std::vector<OrthogonalPair> levels);

    /// L copies of the Haar matrix (the warm-start initialization).
    static FilterStack haar(std::size_t depth);

    std::size_t depth() const { return levels_.size(); }
    const OrthogonalPair& level(std::size_t ell) const { return levels_.at(ell); }
    const std::vector<OrthogonalPair>& levels() const { return levels_; }

    /// Ambient-space copy of the parameters, for optimizer use.
    std::vector<Mat2> matrices() const;

private:
    std::vector<OrthogonalPair> levels_;
};

/// Transform output: approximation at the coarsest scale plus detail bands.
/// details[0] is the finest scale d^(1); details[L-1] is d^(L). For an
/// analysis of N samples at depth L, approx has N/2^L entries and
/// details[l] has N/2^(l+1).
struct CoefficientPyramid {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;

    std::size_t depth() const { return details.size(); }
    std::size_t total_size() const;

    /// Coefficients in compression order [approx, d^(L), ..., d^(1)].
    std::vector<double> flatten() const;

    double energy() const;
};

// -- Single-layer operations -------------------------------------------------
//
// a[k] = u00*x[2k] + u01*x[2k+1], d[k] = u10*x[2k] + u11*x[2k+1].
// The Mat2 overloads accept arbitrary matrices (the training path perturbs
// off the manifold); energy conservation holds only for orthogonal inputs.

struct LayerOutput {
    std::vector<double> approx;
    std::vector<double> detail;
};

LayerOutput layer_analyze(const std::vector<double>& x, const Mat2& u);
LayerOutput layer_analyze(const std::vector<double>& x, const OrthogonalPair& u);

std::vector<double> layer_synthesize(const std::vector<double>& a,
                                     const std::vector<double>& d, const Mat2& u);
std::vector<double> layer_synthesize(const std::vector<double>& a,
                                     const std::vector<double>& d,
                                     const OrthogonalPair& u);

// -- Cascade operations -------------------------------------------------------

/// Recursive analysis: level l consumes the approximation of level l-1.
/// Requires x.size() divisible by 2^depth.
CoefficientPyramid analyze(const std::vector<double>& x, const FilterStack& stack);
CoefficientPyramid analyze_cascade(const std::vector<double>& x,
                                   const std::vector<Mat2>& stack);

/// Inverse cascade; for orthogonal stacks this inverts analyze exactly.
std::vector<double> synthesize(const CoefficientPyramid& p, const FilterStack& stack);
std::vector<double> synthesize_cascade(const CoefficientPyramid& p,
                                       const std::vector<Mat2>& stack);

/// Throws DataError unless every sample is finite.
void require_finite(const std::vector<double>& x, const std::string& context);

}  // namespace merawav
