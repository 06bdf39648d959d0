// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "merawav/transform.hpp"

namespace merawav {

/// Orthonormal analysis filter pair: g low-pass, h high-pass, equal length.
/// Construction checks unit tap energy to 1e-10. Perfect reconstruction of
/// baseline_dwt additionally needs the CQF double-shift conditions, which the
/// built-in pairs (Haar, Daubechies-4, any OrthogonalPair-derived pair)
/// satisfy.
class FirFilterPair {
public:
    static constexpr double kNormTol = 1e-10;

    FirFilterPair(std::vector<double> g, std::vector<double> h);

    const std::vector<double>& g() const { return g_; }
    const std::vector<double>& h() const { return h_; }
    std::size_t taps() const { return g_.size(); }

private:
    std::vector<double> g_;
    std::vector<double> h_;
};

/// |transfer function| sampled on a uniform grid over [0, pi].
struct FrequencyResponse {
    std::vector<double> omega;
    std::vector<double> magnitude;
};

/// Row identification of the constant polyphase matrix: g = [u00, u01],
/// h = [u10, u11].
FirFilterPair filters_from_matrix(const OrthogonalPair& u);

/// Magnitude responses of g and h on grid_size points spanning [0, pi].
std::pair<FrequencyResponse, FrequencyResponse> frequency_response(
    const FirFilterPair& f, std::size_t grid_size);

/// Magnitude response of a single tap sequence.
FrequencyResponse tap_response(const std::vector<double>& taps, std::size_t grid_size);

/// Classical filter-then-decimate analysis path: correlate x with the two-tap
/// filters of u (zero extension past the ends) and keep even-indexed outputs.
/// Deliberately naive O(N*taps); this is the independent oracle for the
/// block-transform equivalence and must match layer_analyze to 1e-12.
LayerOutput polyphase_analyze_oracle(const std::vector<double>& x,
                                     const OrthogonalPair& u);

/// True iff u has the quadrature-mirror structure h0 = g1, h1 = -g0 within tol.
bool qmf_check(const OrthogonalPair& u, double tol);

/// Grid search of |G(0)| = |cos t + sin t| over the QMF family, t uniform on
/// [0, 2pi). Returns the maximizer reduced to [0, pi/2] and its gain; the gain
/// approaches sqrt(2) (the Haar member) as the grid refines.
std::pair<double, double> dc_gain_over_qmf_family(std::size_t theta_grid_size);

/// The 4-tap Daubechies pair: g = [1+s3, 3+s3, 3-s3, 1-s3] / (4*sqrt(2)) with
/// s3 = sqrt(3), h[n] = (-1)^n g[3-n].
FirFilterPair daubechies4_filters();

/// One level of the classical two-channel DWT with periodic boundary
/// extension: a[k] = sum_m g[m] x[(2k+m) mod n], likewise for d with h.
/// Requires even input length.
LayerOutput dwt_level(const std::vector<double>& x, const FirFilterPair& f);

/// Adjoint of dwt_level; inverts it exactly for CQF pairs.
std::vector<double> idwt_level(const std::vector<double>& a,
                               const std::vector<double>& d,
                               const FirFilterPair& f);

/// Cascaded two-channel DWT with periodic extension; same pyramid layout as
/// analyze(). Requires x.size() divisible by 2^levels.
CoefficientPyramid baseline_dwt(const std::vector<double>& x, const FirFilterPair& f,
                                std::size_t levels);

/// Inverse of baseline_dwt for CQF pairs.
std::vector<double> baseline_idwt(const CoefficientPyramid& p, const FirFilterPair& f);

}  // namespace merawav
