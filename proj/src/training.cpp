// SPDX-License-Identifier: Apache-2.0
#include "merawav/training.hpp"

#include <cmath>

#include "merawav/errors.hpp"
#include "merawav/rng.hpp"

namespace merawav {

void TrainingConfig::validate() const {
    if (levels < 1) throw ConfigError("levels must be >= 1");
    if (stage1_iterations < 0 || stage2_iterations < 0) {
        throw ConfigError("iteration counts must be >= 0");
    }
    if (!(stage1_learning_rate > 0.0) || !(stage2_learning_rate > 0.0)) {
        throw ConfigError("learning rates must be > 0");
    }
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be > 0");
    if (lambda_sparse < 0.0 || lambda_mse < 0.0) {
        throw ConfigError("loss weights must be >= 0");
    }
}

std::string to_string(InitMode m) { return m == InitMode::haar ? "haar" : "random"; }

std::string to_string(Normalization n) {
    return n == Normalization::per_scale ? "per_scale" : "global";
}

InitMode init_mode_from_string(const std::string& s) {
    if (s == "haar") return InitMode::haar;
    if (s == "random") return InitMode::random;
    throw ConfigError("unknown init mode '" + s + "' (expected haar|random)");
}

Normalization normalization_from_string(const std::string& s) {
    if (s == "per_scale") return Normalization::per_scale;
    if (s == "global") return Normalization::global;
    throw ConfigError("unknown normalization '" + s +
                      "' (expected per_scale|global)");
}

AdamState AdamState::zeros(std::size_t depth) {
    AdamState st;
    st.m.assign(depth, Mat2{});
    st.v.assign(depth, Mat2{});
    st.t = 0;
    return st;
}

std::pair<double, double> singular_values(const Mat2& m) {
    // Eigenvalues of the Gram matrix M^T M.
    const Mat2 s = m.transpose() * m;
    const double tr = s.e00 + s.e11;
    const double diff = s.e00 - s.e11;
    const double disc = std::sqrt(diff * diff + 4.0 * s.e01 * s.e01);
    const double lo = std::max(0.0, 0.5 * (tr - disc));
    const double hi = 0.5 * (tr + disc);
    return {std::sqrt(hi), std::sqrt(lo)};
}

Mat2 polar_project_matrix(const Mat2& m) {
    const auto [smax, smin] = singular_values(m);
    if (!(smin > 1e-12 * smax) || smax == 0.0) {
        throw NumericalError("polar projection of a singular matrix (sigma = " +
                             std::to_string(smax) + ", " + std::to_string(smin) +
                             ")");
    }
    // Closed-form square root of the SPD Gram matrix S:
    //   S^(1/2) = (S + sqrt(det S) I) / sqrt(tr S + 2 sqrt(det S)),
    // then the polar factor is M (S^(1/2))^(-1).
    const Mat2 s = m.transpose() * m;
    const double sqrt_det = std::abs(m.det());
    const double denom = std::sqrt(s.e00 + s.e11 + 2.0 * sqrt_det);
    const Mat2 root{(s.e00 + sqrt_det) / denom, s.e01 / denom, s.e10 / denom,
                    (s.e11 + sqrt_det) / denom};
    const double rdet = root.det();
    const Mat2 root_inv{root.e11 / rdet, -root.e01 / rdet, -root.e10 / rdet,
                        root.e00 / rdet};
    return m * root_inv;
}

OrthogonalPair polar_project(const Mat2& m) {
    return OrthogonalPair(polar_project_matrix(m));
}

namespace {

double l1_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double sparsity_of(const CoefficientPyramid& p, Normalization mode) {
    if (mode == Normalization::per_scale) {
        double s = 0.0;
        for (const auto& d : p.details) {
            s += l1_norm(d) / static_cast<double>(d.size());
        }
        return s;
    }
    double pooled = 0.0;
    std::size_t count = 0;
    for (const auto& d : p.details) {
        pooled += l1_norm(d);
        count += d.size();
    }
    return pooled / static_cast<double>(count);
}

// lambda_sparse-scaled weight of detail band ell (0-based) in the total loss.
double detail_weight(const CoefficientPyramid& p, std::size_t ell,
                     const TrainingConfig& cfg) {
    if (cfg.normalization == Normalization::per_scale) {
        return cfg.lambda_sparse / static_cast<double>(p.details[ell].size());
    }
    std::size_t count = 0;
    for (const auto& d : p.details) count += d.size();
    return cfg.lambda_sparse / static_cast<double>(count);
}

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

LossBreakdown loss(const CoefficientPyramid& p, const std::vector<double>& x,
                   const std::optional<std::vector<double>>& x_hat,
                   const TrainingConfig& cfg) {
    if (p.total_size() != x.size()) {
        throw DataError("loss: pyramid has " + std::to_string(p.total_size()) +
                        " coefficients for a window of " +
                        std::to_string(x.size()));
    }
    if (cfg.lambda_mse > 0.0 && !x_hat.has_value()) {
        throw DataError("loss: lambda_mse > 0 requires a reconstruction");
    }

    LossBreakdown lb;
    lb.sparsity = sparsity_of(p, cfg.normalization);
    if (x_hat.has_value()) {
        if (x_hat->size() != x.size()) {
            throw DataError("loss: reconstruction length mismatch");
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = x[i] - (*x_hat)[i];
            acc += r * r;
        }
        lb.mse = acc / static_cast<double>(x.size());
    }
    lb.total = cfg.lambda_sparse * lb.sparsity + cfg.lambda_mse * lb.mse;
    return lb;
}

LossBreakdown loss_at(const std::vector<double>& x, const std::vector<Mat2>& stack,
                      const TrainingConfig& cfg) {
    const CoefficientPyramid p = analyze_cascade(x, stack);
    std::optional<std::vector<double>> x_hat;
    if (cfg.lambda_mse > 0.0) {
        x_hat = synthesize_cascade(p, stack);
    }
    return loss(p, x, x_hat, cfg);
}

std::vector<Mat2> loss_gradient(const std::vector<double>& x,
                                const std::vector<Mat2>& stack,
                                const TrainingConfig& cfg) {
    const std::size_t depth = stack.size();

    // Forward analysis, keeping every intermediate approximation.
    // approxes[l] is the level-l approximation (approxes[0] = x).
    std::vector<std::vector<double>> approxes(depth + 1);
    std::vector<std::vector<double>> details(depth);
    approxes[0] = x;
    for (std::size_t ell = 0; ell < depth; ++ell) {
        LayerOutput lo = layer_analyze(approxes[ell], stack[ell]);
        approxes[ell + 1] = std::move(lo.approx);
        details[ell] = std::move(lo.detail);
    }

    CoefficientPyramid p;
    p.approx = approxes[depth];
    p.details = details;

    std::vector<Mat2> grads(depth, Mat2{});

    // Detail gradients from the l1 term.
    std::vector<std::vector<double>> dbar(depth);
    for (std::size_t ell = 0; ell < depth; ++ell) {
        const double w = detail_weight(p, ell, cfg);
        dbar[ell].resize(details[ell].size());
        for (std::size_t k = 0; k < details[ell].size(); ++k) {
            dbar[ell][k] = w * sign_or_zero(details[ell][k]);
        }
    }

    // Gradient with respect to the coarsest approximation (only the MSE term
    // reaches it, through the synthesis pass).
    std::vector<double> abar(approxes[depth].size(), 0.0);

    if (cfg.lambda_mse > 0.0) {
        // Forward synthesis, keeping intermediates. synth[l] reconstructs the
        // level-l approximation; synth[depth] = a^(L).
        std::vector<std::vector<double>> synth(depth + 1);
        synth[depth] = approxes[depth];
        for (std::size_t ell = depth; ell-- > 0;) {
            synth[ell] = layer_synthesize(synth[ell + 1], details[ell], stack[ell]);
        }

        const double scale = 2.0 * cfg.lambda_mse / static_cast<double>(x.size());
        std::vector<double> gbar(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            gbar[i] = scale * (synth[0][i] - x[i]);
        }

        // Walk the synthesis pass in reverse (fine to coarse). Level ell maps
        // (synth[ell+1], details[ell]) through U^T to synth[ell].
        for (std::size_t ell = 0; ell < depth; ++ell) {
            const Mat2& u = stack[ell];
            const std::vector<double>& src = synth[ell + 1];
            const std::vector<double>& det = details[ell];
            std::vector<double> next(src.size());
            for (std::size_t k = 0; k < src.size(); ++k) {
                const double ge = gbar[2 * k];
                const double go = gbar[2 * k + 1];
                grads[ell].e00 += ge * src[k];
                grads[ell].e10 += ge * det[k];
                grads[ell].e01 += go * src[k];
                grads[ell].e11 += go * det[k];
                next[k] = u.e00 * ge + u.e01 * go;
                dbar[ell][k] += u.e10 * ge + u.e11 * go;
            }
            gbar = std::move(next);
        }
        abar = gbar;
    }

    // Back through the analysis cascade, coarse to fine.
    for (std::size_t ell = depth; ell-- > 0;) {
        const Mat2& u = stack[ell];
        const std::vector<double>& input = approxes[ell];
        std::vector<double> prev(input.size());
        for (std::size_t k = 0; k < abar.size(); ++k) {
            const double even = input[2 * k];
            const double odd = input[2 * k + 1];
            grads[ell].e00 += abar[k] * even;
            grads[ell].e01 += abar[k] * odd;
            grads[ell].e10 += dbar[ell][k] * even;
            grads[ell].e11 += dbar[ell][k] * odd;
            prev[2 * k] = u.e00 * abar[k] + u.e10 * dbar[ell][k];
            prev[2 * k + 1] = u.e01 * abar[k] + u.e11 * dbar[ell][k];
        }
        abar = std::move(prev);
    }

    return grads;
}

std::vector<Mat2> loss_gradient(const std::vector<double>& x,
                                const FilterStack& stack,
                                const TrainingConfig& cfg) {
    return loss_gradient(x, stack.matrices(), cfg);
}

void adam_step(std::vector<Mat2>& stack, const std::vector<Mat2>& grads,
               AdamState& state, double eta, double beta1, double beta2,
               double epsilon) {
    if (grads.size() != stack.size() || state.m.size() != stack.size() ||
        state.v.size() != stack.size()) {
        throw DataError("adam_step: shape mismatch between stack, gradients and state");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));

    auto update = [&](double& u, double& m, double& v, double g) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        u -= eta * mhat / (std::sqrt(vhat) + epsilon);
    };

    for (std::size_t ell = 0; ell < stack.size(); ++ell) {
        update(stack[ell].e00, state.m[ell].e00, state.v[ell].e00, grads[ell].e00);
        update(stack[ell].e01, state.m[ell].e01, state.v[ell].e01, grads[ell].e01);
        update(stack[ell].e10, state.m[ell].e10, state.v[ell].e10, grads[ell].e10);
        update(stack[ell].e11, state.m[ell].e11, state.v[ell].e11, grads[ell].e11);
    }
}

FilterStack initial_stack(const TrainingConfig& cfg) {
    if (cfg.init == InitMode::haar) {
        return FilterStack::haar(static_cast<std::size_t>(cfg.levels));
    }
    GaussianSampler gauss(cfg.seed);
    std::vector<OrthogonalPair> levels;
    levels.reserve(static_cast<std::size_t>(cfg.levels));
    for (int ell = 0; ell < cfg.levels; ++ell) {
        const Mat2 draw{gauss(), gauss(), gauss(), gauss()};
        levels.push_back(polar_project(draw));
    }
    return FilterStack(std::move(levels));
}

namespace {

void check_window(const std::vector<double>& x, int levels) {
    const std::size_t block = std::size_t{1} << levels;
    if (x.size() < block || x.size() % block != 0) {
        throw DataError("train: window length " + std::to_string(x.size()) +
                        " not divisible by 2^" + std::to_string(levels));
    }
}

TrainResult run_loop(const std::vector<std::vector<double>>& windows,
                     const TrainingConfig& cfg,
                     const std::optional<FilterStack>& warm,
                     const IterationObserver& observer) {
    cfg.validate();
    for (const auto& w : windows) check_window(w, cfg.levels);
    if (warm && warm->depth() != static_cast<std::size_t>(cfg.levels)) {
        throw ConfigError("warm-start stack depth " + std::to_string(warm->depth()) +
                          " does not match configured levels " +
                          std::to_string(cfg.levels));
    }

    const FilterStack init = warm ? *warm : initial_stack(cfg);
    std::vector<Mat2> params = init.matrices();
    AdamState state = AdamState::zeros(params.size());

    TrainResult result{init, {}};
    result.trace.reserve(static_cast<std::size_t>(cfg.total_iterations()));

    const double inv_count = 1.0 / static_cast<double>(windows.size());
    for (int iter = 1; iter <= cfg.total_iterations(); ++iter) {
        const double eta = iter <= cfg.stage1_iterations ? cfg.stage1_learning_rate
                                                         : cfg.stage2_learning_rate;

        LossBreakdown lb;
        std::vector<Mat2> grads(params.size(), Mat2{});
        for (const auto& w : windows) {
            const LossBreakdown one = loss_at(w, params, cfg);
            lb.sparsity += one.sparsity * inv_count;
            lb.mse += one.mse * inv_count;
            lb.total += one.total * inv_count;
            const std::vector<Mat2> g = loss_gradient(w, params, cfg);
            for (std::size_t ell = 0; ell < grads.size(); ++ell) {
                grads[ell].e00 += g[ell].e00 * inv_count;
                grads[ell].e01 += g[ell].e01 * inv_count;
                grads[ell].e10 += g[ell].e10 * inv_count;
                grads[ell].e11 += g[ell].e11 * inv_count;
            }
        }

        adam_step(params, grads, state, eta, cfg.beta1, cfg.beta2, cfg.epsilon);

        for (std::size_t ell = 0; ell < params.size(); ++ell) {
            try {
                params[ell] = polar_project_matrix(params[ell]);
            } catch (const NumericalError& e) {
                throw NumericalError("training aborted at iteration " +
                                     std::to_string(iter) + ", level " +
                                     std::to_string(ell + 1) + ": " + e.what());
            }
        }

        result.trace.push_back(lb);
        if (observer) {
            std::vector<OrthogonalPair> levels;
            levels.reserve(params.size());
            for (const auto& m : params) levels.emplace_back(m);
            observer(iter, FilterStack(std::move(levels)), lb);
        }
    }

    std::vector<OrthogonalPair> levels;
    levels.reserve(params.size());
    for (const auto& m : params) levels.emplace_back(m);
    result.stack = FilterStack(std::move(levels));
    return result;
}

}  // namespace

TrainResult train(const std::vector<double>& x, const TrainingConfig& cfg,
                  const std::optional<FilterStack>& warm,
                  const IterationObserver& observer) {
    return run_loop({x}, cfg, warm, observer);
}

TrainResult train_averaged(const std::vector<std::vector<double>>& windows,
                           const TrainingConfig& cfg,
                           const std::optional<FilterStack>& warm,
                           const IterationObserver& observer) {
    if (windows.empty()) throw DataError("train: no windows supplied");
    return run_loop(windows, cfg, warm, observer);
}

}  // namespace merawav
