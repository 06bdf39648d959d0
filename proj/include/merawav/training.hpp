// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "merawav/transform.hpp"

namespace merawav {

enum class InitMode { haar, random };
enum class Normalization { per_scale, global };

/// All training hyperparameters. Defaults are the reference configuration:
/// L=5, 50+50 iterations at 5e-3 / 2.5e-3, Adam(0.9, 0.999, 1e-8),
/// lambda_sparse=1, lambda_mse=0, Haar warm start, seed 12345.
struct TrainingConfig {
    int levels = 5;
    int stage1_iterations = 50;
    int stage2_iterations = 50;
    double stage1_learning_rate = 5e-3;
    double stage2_learning_rate = 2.5e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double lambda_sparse = 1.0;
    double lambda_mse = 0.0;
    InitMode init = InitMode::haar;
    std::uint64_t seed = 12345;
    Normalization normalization = Normalization::per_scale;

    int total_iterations() const { return stage1_iterations + stage2_iterations; }

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

std::string to_string(InitMode m);
std::string to_string(Normalization n);
InitMode init_mode_from_string(const std::string& s);
Normalization normalization_from_string(const std::string& s);

/// Adam moment estimates, one per matrix entry, plus the step counter.
struct AdamState {
    std::vector<Mat2> m;
    std::vector<Mat2> v;
    long t = 0;

    static AdamState zeros(std::size_t depth);
};

struct LossBreakdown {
    double sparsity = 0.0;
    double mse = 0.0;
    double total = 0.0;
};

/// Nearest orthogonal matrix in Frobenius norm, the polar factor
/// M (M^T M)^{-1/2}, via the closed-form 2x2 square root. Throws
/// NumericalError when sigma_min <= 1e-12 * sigma_max (projection not
/// unique).
Mat2 polar_project_matrix(const Mat2& m);
OrthogonalPair polar_project(const Mat2& m);

/// Singular values of a 2x2 matrix, largest first.
std::pair<double, double> singular_values(const Mat2& m);

/// Loss of a decomposed window. per_scale weights each detail band by
/// 1/N_ell; global divides the pooled l1 sum by the total detail count.
/// x_hat must be present iff lambda_mse > 0.
LossBreakdown loss(const CoefficientPyramid& p, const std::vector<double>& x,
                   const std::optional<std::vector<double>>& x_hat,
                   const TrainingConfig& cfg);

/// Forward loss at an arbitrary ambient-space stack (no orthogonality
/// assumed). Runs analysis, and reconstruction when lambda_mse > 0. This is
/// the scalar that loss_gradient differentiates.
LossBreakdown loss_at(const std::vector<double>& x, const std::vector<Mat2>& stack,
                      const TrainingConfig& cfg);

/// Reverse-mode gradient of loss_at with respect to each matrix entry.
/// The l1 subgradient at zero is taken as 0.
std::vector<Mat2> loss_gradient(const std::vector<double>& x,
                                const std::vector<Mat2>& stack,
                                const TrainingConfig& cfg);
std::vector<Mat2> loss_gradient(const std::vector<double>& x,
                                const FilterStack& stack,
                                const TrainingConfig& cfg);

/// One bias-corrected Adam update in ambient 2x2 space, in place. The output
/// stack is generally not orthogonal; projection is a separate step.
void adam_step(std::vector<Mat2>& stack, const std::vector<Mat2>& grads,
               AdamState& state, double eta, double beta1, double beta2,
               double epsilon);

struct TrainResult {
    FilterStack stack;
    std::vector<LossBreakdown> trace;
};

/// Called after each iteration with the 1-based iteration index, the
/// projected stack, and the loss measured at the start of the iteration.
using IterationObserver =
    std::function<void(int iteration, const FilterStack&, const LossBreakdown&)>;

/// Two-stage optimization: stage-1 iterations at the stage-1 rate, then
/// stage-2 at the halved rate, with polar projection restoring orthogonality
/// after every Adam step. Adam moments carry across the stage boundary.
/// Deterministic given cfg.seed.
TrainResult train(const std::vector<double>& x, const TrainingConfig& cfg,
                  const std::optional<FilterStack>& warm = std::nullopt,
                  const IterationObserver& observer = {});

/// Joint training over several windows: per-iteration gradients are averaged
/// across windows before the shared Adam update.
TrainResult train_averaged(const std::vector<std::vector<double>>& windows,
                           const TrainingConfig& cfg,
                           const std::optional<FilterStack>& warm = std::nullopt,
                           const IterationObserver& observer = {});

/// Seeded initial stack per cfg.init: Haar warm start, or i.i.d. standard
/// normal entries polar-projected onto the manifold.
FilterStack initial_stack(const TrainingConfig& cfg);

}  // namespace merawav
