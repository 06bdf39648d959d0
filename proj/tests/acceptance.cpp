// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// the measured value and its limit; the process exits nonzero if any
// criterion fails. The final trace-based check is optional and runs only
// when MERAWAV_MAWI_CSV points at a pre-aggregated bytes-per-ms series.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "merawav/compression.hpp"
#include "merawav/filterbank.hpp"
#include "merawav/io.hpp"
#include "merawav/lrd.hpp"
#include "merawav/training.hpp"
#include "merawav/transform.hpp"

using namespace merawav;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            bool gating = true) {
    std::printf("[%s] %2d. %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass && gating) ++failures;
}

void report_skip(int id, const std::string& name, const std::string& why) {
    std::printf("[SKIP] %2d. %s (%s)\n", id, name.c_str(), why.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double energy_of(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

OrthogonalPair random_orthogonal(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    const double theta = angle(rng);
    if (rng() & 1u) return OrthogonalPair::rotation(theta);
    return OrthogonalPair::reflection(theta);
}

FilterStack random_stack(std::mt19937_64& rng, std::size_t depth) {
    std::vector<OrthogonalPair> levels;
    for (std::size_t i = 0; i < depth; ++i) levels.push_back(random_orthogonal(rng));
    return FilterStack(std::move(levels));
}

std::vector<double> random_window(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);
    return x;
}

struct Shared {
    // Criterion 1/2/5 corpus: per-iteration stacks of a reference training run.
    std::vector<FilterStack> trajectory;
    double max_defect = 0.0;
    std::vector<double> training_window;

    // Criterion 10/11/12 pipeline: per-window training on a long fGn series.
    std::vector<double> series;
    std::vector<std::vector<double>> windows;
    std::vector<FilterStack> window_stacks;
};

Shared run_shared_pipelines() {
    Shared sh;

    sh.training_window = fgn_generate(1024, 0.8, 20260810);
    TrainingConfig cfg;  // reference defaults: L=5, 50+50 iterations
    train(sh.training_window, cfg, std::nullopt,
          [&](int, const FilterStack& stack, const LossBreakdown&) {
              sh.trajectory.push_back(stack);
              for (const auto& u : stack.levels()) {
                  sh.max_defect =
                      std::max(sh.max_defect, u.matrix().orthogonality_defect());
              }
          });

    sh.series = fgn_generate(std::size_t{1} << 16, 0.8, 424242);
    TraceSeries ts;
    ts.values = sh.series;
    sh.windows = windowize(ts, WindowPlan{1024, 1024});
    for (const auto& w : sh.windows) {
        sh.window_stacks.push_back(train(w, cfg).stack);
    }
    return sh;
}

void criterion_1_and_2(const Shared& sh) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);

    double worst_pr = 0.0;
    double worst_parseval = 0.0;
    int trials = 0;

    auto run_pair = [&](const std::vector<double>& x, const FilterStack& stack) {
        const CoefficientPyramid p = analyze(x, stack);
        worst_pr = std::max(worst_pr, max_abs_diff(synthesize(p, stack), x));
        const double ex = energy_of(x);
        worst_parseval =
            std::max(worst_parseval, std::abs(ex - p.energy()) / ex);
        ++trials;
    };

    for (int t = 0; t < 900; ++t) {
        run_pair(random_window(rng, 1024), random_stack(rng, 5));
    }
    for (const auto& stack : sh.trajectory) {
        run_pair(random_window(rng, 1024), stack);
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    report(1, "perfect reconstruction over 1000 stacks incl. training trajectory",
           worst_pr <= 1e-9 && trials == 1000 && seconds < 30.0,
           "max inf-norm error " + fmt(worst_pr) + ", limit 1e-9; " +
               fmt(seconds) + " s, limit 30 s");
    report(2, "Parseval identity on the same corpus", worst_parseval <= 1e-9,
           "max relative mismatch " + fmt(worst_parseval) + ", limit 1e-9");
}

void criterion_3() {
    std::mt19937_64 rng(3003);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto u = random_orthogonal(rng);
        const auto x = random_window(rng, 2 * (1 + rng() % 128));
        const auto fast = layer_analyze(x, u);
        const auto oracle = polyphase_analyze_oracle(x, u);
        worst = std::max(worst, max_abs_diff(fast.approx, oracle.approx));
        worst = std::max(worst, max_abs_diff(fast.detail, oracle.detail));
    }
    report(3, "block transform equals the polyphase convolution oracle",
           worst <= 1e-12, "max abs diff " + fmt(worst) + ", limit 1e-12");
}

void criterion_4() {
    const double s2 = std::sqrt(2.0);
    const auto [a, d] = layer_analyze({1.0, 2.0, 3.0, 4.0}, OrthogonalPair::haar());
    double worst = std::abs(a[0] - 3.0 / s2);
    worst = std::max(worst, std::abs(a[1] - 7.0 / s2));
    worst = std::max(worst, std::abs(d[0] + 1.0 / s2));
    worst = std::max(worst, std::abs(d[1] + 1.0 / s2));
    const double e = energy_of(a) + energy_of(d);
    const bool pass = worst <= 1e-12 && std::abs(e - 30.0) <= 1e-12;
    report(4, "worked 4-sample example is exact", pass,
           "max coefficient error " + fmt(worst) + ", energy error " +
               fmt(std::abs(e - 30.0)) + ", limits 1e-12");
}

void criterion_5(const Shared& sh) {
    report(5, "orthogonality after every training iteration",
           sh.trajectory.size() == 100 && sh.max_defect <= 1e-12,
           "max |U^T U - I|_F " + fmt(sh.max_defect) + " over " +
               std::to_string(sh.trajectory.size()) + " iterations, limit 1e-12");
}

void criterion_6() {
    const double pi = 3.14159265358979323846;
    const auto [theta, gain] = dc_gain_over_qmf_family(4096);
    const double theta_err = std::abs(theta - pi / 4.0);
    const double gain_err = std::abs(gain - std::sqrt(2.0));
    report(6, "DC gain over the QMF family peaks at the Haar angle",
           theta_err <= pi / 2048.0 && gain_err <= 1e-6,
           "theta error " + fmt(theta_err) + " (limit " + fmt(pi / 2048.0) +
               "), gain error " + fmt(gain_err) + " (limit 1e-6)");
}

void criterion_7() {
    const double g = -1.7;
    const double eta = 2.5e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    std::vector<Mat2> stack{Mat2{0.2, -0.4, 0.6, 0.8}};
    const std::vector<Mat2> grads{Mat2{g, g, g, g}};
    AdamState state = AdamState::zeros(1);

    double u = 0.2, m = 0.0, v = 0.0;
    double worst = 0.0;
    for (int t = 1; t <= 3; ++t) {
        adam_step(stack, grads, state, eta, beta1, beta2, eps);
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double mhat = m / (1.0 - std::pow(beta1, t));
        const double vhat = v / (1.0 - std::pow(beta2, t));
        u -= eta * mhat / (std::sqrt(vhat) + eps);
        worst = std::max(worst, std::abs(stack[0].e00 - u));
    }
    report(7, "Adam trace matches the scalar recurrence oracle", worst <= 1e-14,
           "max deviation " + fmt(worst) + " over 3 steps, limit 1e-14");
}

void criterion_8() {
    std::mt19937_64 rng(8008);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double step = 1e-6;
    double worst = 0.0;
    int used = 0;
    while (used < 50) {
        const std::size_t depth = 1 + used % 4;
        TrainingConfig cfg;
        cfg.levels = static_cast<int>(depth);
        cfg.normalization =
            used % 2 == 0 ? Normalization::per_scale : Normalization::global;
        cfg.lambda_mse = used % 3 == 0 ? 0.5 : 0.0;

        const auto x = random_window(rng, 128);
        const auto stack = random_stack(rng, depth).matrices();

        const auto p = analyze_cascade(x, stack);
        bool near_kink = false;
        for (const auto& band : p.details) {
            for (double d : band) near_kink |= std::abs(d) < 1e-8;
        }
        if (near_kink) continue;
        ++used;

        const auto grads = loss_gradient(x, stack, cfg);
        for (std::size_t ell = 0; ell < depth; ++ell) {
            for (int entry = 0; entry < 4; ++entry) {
                auto ref = [&](std::vector<Mat2> s, double delta) {
                    Mat2& mm = s[ell];
                    (entry == 0   ? mm.e00
                     : entry == 1 ? mm.e01
                     : entry == 2 ? mm.e10
                                  : mm.e11) += delta;
                    return loss_at(x, s, cfg).total;
                };
                const double fd = (ref(stack, step) - ref(stack, -step)) /
                                  (2.0 * step);
                const Mat2& gm = grads[ell];
                const double analytic = entry == 0   ? gm.e00
                                        : entry == 1 ? gm.e01
                                        : entry == 2 ? gm.e10
                                                     : gm.e11;
                const double denom =
                    std::max({1.0, std::abs(fd), std::abs(analytic)});
                worst = std::max(worst, std::abs(fd - analytic) / denom);
            }
        }
    }
    report(8, "analytic gradient matches central differences", worst <= 1e-4,
           "max relative error " + fmt(worst) + " over 50 instances, limit 1e-4");
}

void criterion_9() {
    const auto start = std::chrono::steady_clock::now();
    const FirFilterPair f = daubechies4_filters();
    const double h_values[] = {0.6, 0.7, 0.8, 0.9};

    double worst_bias = 0.0;
    int within = 0, total = 0;
    for (double h : h_values) {
        double mean = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto x =
                fgn_generate(std::size_t{1} << 16, h, 1000 * seed + 17);
            const auto est = hurst_av_default(x, f);
            mean += est.h / 10.0;
            ++total;
            if (std::abs(est.h - h) <= 0.05) ++within;
        }
        worst_bias = std::max(worst_bias, std::abs(mean - h));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool pass =
        worst_bias <= 0.03 && within * 10 >= total * 9 && seconds < 120.0;
    report(9, "Hurst estimator calibration on synthetic noise", pass,
           "worst |mean - H| " + fmt(worst_bias) + " (limit 0.03), " +
               std::to_string(within) + "/" + std::to_string(total) +
               " runs within 0.05 (need 36); " + fmt(seconds) +
               " s, limit 120 s");
}

void criterion_10(const Shared& sh) {
    const RetentionRatio rho(0.1);
    std::vector<double> reconstructed;
    reconstructed.reserve(sh.series.size());
    for (std::size_t w = 0; w < sh.windows.size(); ++w) {
        const auto& stack = sh.window_stacks[w];
        const auto kept = threshold_compress(analyze(sh.windows[w], stack), rho);
        const auto recon = synthesize(kept, stack);
        reconstructed.insert(reconstructed.end(), recon.begin(), recon.end());
    }

    const FirFilterPair f = daubechies4_filters();
    const int j2 = default_max_scale(sh.series.size());
    const double dh = delta_h(sh.series, reconstructed, kDefaultFineScale, j2, f);
    report(10, "Hurst deviation after 90% compression", std::abs(dh) <= 0.05,
           "delta H " + fmt(dh) + ", limit |0.05|; top-k thresholding of "
           "thin-tailed Gaussian coefficients depresses fine-scale energy "
           "regardless of the stack (see notes)");
}

void criterion_11_and_12(const Shared& sh) {
    const auto rhos = default_rho_grid();
    const LabeledTransform haar = LabeledTransform::haar_baseline(5);
    const LabeledTransform db4 = LabeledTransform::db4_baseline(5);

    // Mean PSNR per transform and rho; per-window monotonicity in rho.
    double worst_monotonicity = 0.0;
    std::vector<double> mean_learned(rhos.size(), 0.0);
    std::vector<double> mean_haar(rhos.size(), 0.0);
    std::vector<double> mean_db4(rhos.size(), 0.0);

    const double inv = 1.0 / static_cast<double>(sh.windows.size());
    for (std::size_t w = 0; w < sh.windows.size(); ++w) {
        const LabeledTransform learned("learned", sh.window_stacks[w]);
        double prev_l = -1e300, prev_h = -1e300, prev_d = -1e300;
        for (std::size_t r = 0; r < rhos.size(); ++r) {
            const double pl = psnr_at(learned, sh.windows[w], rhos[r]);
            const double ph = psnr_at(haar, sh.windows[w], rhos[r]);
            const double pd = psnr_at(db4, sh.windows[w], rhos[r]);
            mean_learned[r] += pl * inv;
            mean_haar[r] += ph * inv;
            mean_db4[r] += pd * inv;
            worst_monotonicity = std::max({worst_monotonicity, prev_l - pl,
                                           prev_h - ph, prev_d - pd});
            prev_l = pl;
            prev_h = ph;
            prev_d = pd;
        }
    }

    std::size_t rho01 = 0;
    for (std::size_t r = 0; r < rhos.size(); ++r) {
        if (rhos[r].value == 0.1) rho01 = r;
    }
    const double gain = mean_learned[rho01] - mean_haar[rho01];
    report(11, "rate-distortion sanity against the Haar baseline",
           gain >= 0.0 && worst_monotonicity <= 1e-9,
           "delta PSNR at rho 0.1 = " + fmt(gain) +
               " dB (need >= 0); worst monotonicity violation " +
               fmt(worst_monotonicity) + ", limit 1e-9");

    // Energy identity across the grid, all three transforms.
    double worst_identity = 0.0;
    for (std::size_t w = 0; w < std::min<std::size_t>(sh.windows.size(), 8); ++w) {
        const LabeledTransform learned("learned", sh.window_stacks[w]);
        for (const auto& t : {learned, haar, db4}) {
            const CoefficientPyramid p = t.analyze(sh.windows[w]);
            for (const auto& rho : rhos) {
                const CoefficientPyramid q = threshold_compress(p, rho);
                const auto full = p.flatten();
                const auto kept = q.flatten();
                double dropped = 0.0;
                for (std::size_t i = 0; i < full.size(); ++i) {
                    if (kept[i] == 0.0) dropped += full[i] * full[i];
                }
                const auto recon = t.synthesize(q);
                double err = 0.0;
                for (std::size_t i = 0; i < recon.size(); ++i) {
                    const double d = sh.windows[w][i] - recon[i];
                    err += d * d;
                }
                const double denom = std::max(dropped, 1e-12 * energy_of(full));
                if (denom > 0.0) {
                    worst_identity =
                        std::max(worst_identity, std::abs(dropped - err) / denom);
                }
            }
        }
    }
    report(12, "dropped energy equals reconstruction error energy",
           worst_identity <= 1e-9,
           "max relative mismatch " + fmt(worst_identity) + ", limit 1e-9");
}

void criterion_13_optional() {
    const char* path = std::getenv("MERAWAV_MAWI_CSV");
    if (path == nullptr || std::string(path).empty()) {
        report_skip(13, "trace reproduction (optional, not CI-gating)",
                    "set MERAWAV_MAWI_CSV to a bytes-per-ms CSV to enable");
        return;
    }

    const TraceSeries series =
        read_series(path, SeriesFormat::csv_single_column, false);
    const FirFilterPair f = daubechies4_filters();
    const auto est = hurst_av_default(series.values, f);
    const bool ci_overlap = est.ci_high >= 0.853 && est.ci_low <= 0.926;

    const auto windows = windowize(series, WindowPlan{1024, 1024});
    TrainingConfig cfg;
    double gain = 0.0;
    const LabeledTransform haar = LabeledTransform::haar_baseline(5);
    const RetentionRatio rho(0.1);
    for (const auto& w : windows) {
        const auto stack = train(w, cfg).stack;
        gain += psnr_at(LabeledTransform("learned", stack), w, rho) -
                psnr_at(haar, w, rho);
    }
    gain /= static_cast<double>(windows.size());

    report(13, "trace reproduction (optional, not gating)",
           ci_overlap && gain > 0.0,
           "H " + fmt(est.h) + " CI [" + fmt(est.ci_low) + ", " +
               fmt(est.ci_high) + "] vs [0.853, 0.926]; delta PSNR at rho 0.1 = " +
               fmt(gain) + " dB",
           /*gating=*/false);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    const Shared sh = run_shared_pipelines();

    criterion_1_and_2(sh);
    criterion_3();
    criterion_4();
    criterion_5(sh);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10(sh);
    criterion_11_and_12(sh);
    criterion_13_optional();

    std::printf("%s: %d criterion(s) failed\n",
                failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                failures);
    return failures == 0 ? 0 : 1;
}
