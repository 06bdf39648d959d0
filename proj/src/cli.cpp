// SPDX-License-Identifier: Apache-2.0
#include "merawav/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "merawav/compression.hpp"
#include "merawav/errors.hpp"
#include "merawav/io.hpp"
#include "merawav/lrd.hpp"
#include "merawav/training.hpp"

namespace merawav {

namespace {

bool verbose() {
    const char* v = std::getenv("MERAWAV_VERBOSE");
    return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

void note(const std::string& msg) {
    if (verbose()) std::cerr << msg << '\n';
}

struct SeriesOptions {
    std::string input;
    std::string format = "single";
    bool allow_negative = false;
    std::size_t window_size = 1024;
    std::size_t stride = 1024;
};

void add_series_options(CLI::App* cmd, SeriesOptions& opt, bool with_windows = true) {
    cmd->add_option("--input", opt.input, "Input series CSV")->required();
    cmd->add_option("--format", opt.format,
                    "Input format: single (one value per line) or timestamp "
                    "(timestamp,value rows)");
    cmd->add_flag("--allow-negative", opt.allow_negative,
                  "Accept negative samples (synthetic signals)");
    if (with_windows) {
        cmd->add_option("--window-size", opt.window_size,
                        "Samples per analysis window");
        cmd->add_option("--stride", opt.stride, "Window stride in samples");
    }
}

TraceSeries load_series(const SeriesOptions& opt) {
    return read_series(opt.input, series_format_from_string(opt.format),
                       opt.allow_negative);
}

TrainingConfig build_config(const std::string& config_path,
                            const std::vector<std::string>& overrides) {
    TrainingConfig cfg;
    if (!config_path.empty()) cfg = read_training_config(config_path);
    for (const auto& kv : overrides) apply_override(cfg, kv);
    cfg.validate();
    return cfg;
}

std::string override_help() {
    std::string help = "Override a config key (repeatable). Keys:";
    for (const auto& k : override_keys()) help += " " + k;
    return help;
}

// Per-window stack lookup: one stored stack serves every window; otherwise
// windows map to their own stacks by index.
class StackSelector {
public:
    explicit StackSelector(LoadedStacks loaded) : loaded_(std::move(loaded)) {
        for (std::size_t i = 0; i < loaded_.stacks.size(); ++i) {
            by_window_[loaded_.stacks[i].window] = i;
        }
    }

    const FilterStack& for_window(std::size_t w) const {
        if (loaded_.stacks.size() == 1) return loaded_.stacks.front().stack;
        const auto it = by_window_.find(static_cast<int>(w));
        if (it == by_window_.end()) {
            throw DataError("stack file has no entry for window " +
                            std::to_string(w));
        }
        return loaded_.stacks[it->second].stack;
    }

    std::size_t depth() const { return loaded_.stacks.front().stack.depth(); }

private:
    LoadedStacks loaded_;
    std::map<int, std::size_t> by_window_;
};

std::vector<double> parse_rho_list(const std::string& csv) {
    std::vector<double> rhos;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            rhos.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse retention ratio '" + item + "'");
        }
    }
    if (rhos.empty()) throw ConfigError("no retention ratios given");
    return rhos;
}

FirFilterPair estimator_wavelet(const std::string& name) {
    if (name == "db4") return daubechies4_filters();
    if (name == "haar") return filters_from_matrix(OrthogonalPair::haar());
    throw ConfigError("unknown estimator wavelet '" + name +
                      "' (expected haar|db4)");
}

int run_train(const SeriesOptions& series_opt, const std::string& config_path,
              const std::vector<std::string>& overrides, const std::string& out_dir,
              bool average) {
    const TrainingConfig cfg = build_config(config_path, overrides);
    const std::size_t block = std::size_t{1} << cfg.levels;
    if (series_opt.window_size % block != 0) {
        throw ConfigError("window size " + std::to_string(series_opt.window_size) +
                          " is not divisible by 2^levels = " + std::to_string(block));
    }

    const TraceSeries series = load_series(series_opt);
    const auto windows = windowize(
        series, WindowPlan{series_opt.window_size, series_opt.stride});
    note("training on " + std::to_string(windows.size()) + " windows");

    std::vector<StoredStack> stacks;
    std::vector<std::pair<int, std::vector<LossBreakdown>>> traces;
    if (average) {
        TrainResult result = train_averaged(windows, cfg);
        stacks.push_back(StoredStack{-1, std::move(result.stack)});
        traces.emplace_back(-1, std::move(result.trace));
    } else {
        for (std::size_t w = 0; w < windows.size(); ++w) {
            TrainResult result = train(windows[w], cfg);
            stacks.push_back(StoredStack{static_cast<int>(w), std::move(result.stack)});
            traces.emplace_back(static_cast<int>(w), std::move(result.trace));
        }
    }

    const std::filesystem::path out(out_dir);
    write_stack_json(out / "stack.json", stacks, cfg,
                     average ? "averaged" : "per_window");
    write_loss_csv(out / "loss.csv", traces);
    note("wrote " + (out / "stack.json").string() + " and " +
         (out / "loss.csv").string());
    return 0;
}

int run_compress(const SeriesOptions& series_opt, const std::string& stack_path,
                 const std::string& transform_name, std::size_t levels, double rho,
                 const std::string& out_dir, int j1, const std::string& wavelet) {
    const RetentionRatio ratio(rho);

    std::optional<StackSelector> selector;
    std::optional<LabeledTransform> fixed;
    if (!stack_path.empty()) {
        selector.emplace(read_stack_json(stack_path));
    } else if (transform_name == "haar") {
        fixed = LabeledTransform::haar_baseline(levels);
    } else if (transform_name == "db4") {
        fixed = LabeledTransform::db4_baseline(levels);
    } else {
        throw ConfigError("compress needs --stack or --transform haar|db4");
    }

    const std::size_t depth = selector ? selector->depth() : levels;
    if (series_opt.window_size % (std::size_t{1} << depth) != 0) {
        throw ConfigError("window size is not divisible by 2^depth");
    }

    const TraceSeries series = load_series(series_opt);
    const auto windows = windowize(
        series, WindowPlan{series_opt.window_size, series_opt.stride});

    std::vector<double> reconstructed;
    reconstructed.reserve(windows.size() * series_opt.window_size);
    std::vector<double> original;
    original.reserve(reconstructed.capacity());

    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    std::ofstream metrics(out / "metrics.csv");
    metrics << "window,psnr_db,kept\n";

    for (std::size_t w = 0; w < windows.size(); ++w) {
        const LabeledTransform t =
            selector ? LabeledTransform("learned", selector->for_window(w))
                     : *fixed;
        const CoefficientPyramid kept = threshold_compress(t.analyze(windows[w]),
                                                           ratio);
        const std::vector<double> recon = t.synthesize(kept);
        metrics << w << ',' << format_double(psnr(windows[w], recon)) << ','
                << ratio.kept(windows[w].size()) << '\n';
        original.insert(original.end(), windows[w].begin(), windows[w].end());
        reconstructed.insert(reconstructed.end(), recon.begin(), recon.end());
    }
    metrics.close();

    write_series_csv(out / "reconstructed.csv", reconstructed);

    nlohmann::json summary{{"transform", selector ? "learned" : transform_name},
                           {"rho", rho},
                           {"windows", windows.size()}};
    const int j2 = default_max_scale(original.size());
    if (j2 > j1) {
        summary["delta_h"] =
            delta_h(original, reconstructed, j1, j2, estimator_wavelet(wavelet));
    } else {
        summary["delta_h"] = nullptr;
    }
    std::ofstream sm(out / "summary.json");
    sm << summary.dump(2) << '\n';
    return 0;
}

int run_sweep(const SeriesOptions& series_opt, const std::string& stack_path,
              std::size_t levels, const std::string& rho_csv,
              const std::string& out_dir, int j1, const std::string& wavelet) {
    std::vector<RetentionRatio> rhos;
    for (double r : parse_rho_list(rho_csv)) rhos.emplace_back(r);

    std::optional<StackSelector> selector;
    if (!stack_path.empty()) selector.emplace(read_stack_json(stack_path));
    const std::size_t depth = selector ? selector->depth() : levels;
    if (series_opt.window_size % (std::size_t{1} << depth) != 0) {
        throw ConfigError("window size is not divisible by 2^depth");
    }

    const TraceSeries series = load_series(series_opt);
    const auto windows = windowize(
        series, WindowPlan{series_opt.window_size, series_opt.stride});

    std::vector<double> original;
    for (const auto& w : windows) original.insert(original.end(), w.begin(), w.end());
    const int j2 = default_max_scale(original.size());
    const bool with_delta_h = j2 > j1;
    const FirFilterPair est_wavelet = estimator_wavelet(wavelet);

    // Transform labels; "learned" resolves per window through the selector.
    std::vector<std::string> labels;
    if (selector) labels.push_back("learned");
    labels.push_back("haar");
    labels.push_back("db4");

    auto transform_for = [&](const std::string& label,
                             std::size_t window_index) -> LabeledTransform {
        if (label == "learned") {
            return LabeledTransform("learned", selector->for_window(window_index));
        }
        if (label == "haar") return LabeledTransform::haar_baseline(depth);
        return LabeledTransform::db4_baseline(depth);
    };

    RateDistortionTable table;
    table.transforms = labels;
    for (const auto& label : labels) {
        for (const auto& rho : rhos) {
            double acc = 0.0;
            std::vector<double> recon;
            recon.reserve(original.size());
            for (std::size_t w = 0; w < windows.size(); ++w) {
                const LabeledTransform t = transform_for(label, w);
                const CoefficientPyramid kept =
                    threshold_compress(t.analyze(windows[w]), rho);
                const std::vector<double> r = t.synthesize(kept);
                acc += psnr(windows[w], r);
                recon.insert(recon.end(), r.begin(), r.end());
            }
            RateDistortionPoint pt;
            pt.transform = label;
            pt.rho = rho.value;
            pt.kept = rho.kept(series_opt.window_size);
            pt.psnr_db = acc / static_cast<double>(windows.size());
            if (with_delta_h) {
                pt.delta_h = delta_h(original, recon, j1, j2, est_wavelet);
            }
            table.points.push_back(std::move(pt));
        }
        note("swept " + label);
    }

    write_rd_csv(std::filesystem::path(out_dir) / "rd.csv", series.label, table,
                 {"haar", "db4"});
    return 0;
}

int run_hurst(const SeriesOptions& series_opt, int j1, int j2,
              const std::string& wavelet, const std::string& out_dir) {
    const TraceSeries series = load_series(series_opt);
    const FirFilterPair f = estimator_wavelet(wavelet);
    const int j2_eff = j2 > 0 ? j2 : default_max_scale(series.values.size());
    const HurstEstimate est = hurst_av(series.values, j1, j2_eff, f);

    const std::filesystem::path out(out_dir);
    write_hurst_json(out / "hurst.json", est);
    write_spectrum_csv(out / "spectrum.csv", est);
    return 0;
}

int run_filters(const std::string& stack_path, int window_index,
                std::size_t response_grid, const std::string& out_dir) {
    const LoadedStacks loaded = read_stack_json(stack_path);
    const FilterStack* stack = nullptr;
    for (const auto& stored : loaded.stacks) {
        if (stored.window == window_index ||
            (window_index < 0 && &stored == &loaded.stacks.front())) {
            stack = &stored.stack;
            break;
        }
    }
    if (stack == nullptr && loaded.stacks.size() == 1) {
        stack = &loaded.stacks.front().stack;
    }
    if (stack == nullptr) {
        throw DataError("stack file has no entry for window " +
                        std::to_string(window_index));
    }

    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    std::ofstream f(out / "filters.json");
    f << filters_to_json(*stack) << '\n';

    if (response_grid >= 2) {
        std::ofstream resp(out / "response.csv");
        resp << "level,omega,mag_g,mag_h\n";
        for (std::size_t ell = 0; ell < stack->depth(); ++ell) {
            const auto [rg, rh] =
                frequency_response(filters_from_matrix(stack->level(ell)),
                                   response_grid);
            for (std::size_t i = 0; i < rg.omega.size(); ++i) {
                resp << (ell + 1) << ',' << format_double(rg.omega[i]) << ','
                     << format_double(rg.magnitude[i]) << ','
                     << format_double(rh.magnitude[i]) << '\n';
            }
        }
    }
    return 0;
}

int run_synth(std::size_t n, double hurst, std::uint64_t seed,
              const std::string& out_dir) {
    if (!(hurst > 0.0) || !(hurst < 1.0)) {
        throw ConfigError("hurst exponent must lie in (0, 1), got " +
                          std::to_string(hurst));
    }
    const std::vector<double> x = fgn_generate(n, hurst, seed);
    write_series_csv(std::filesystem::path(out_dir) / "fgn.csv", x);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Learnable orthonormal wavelet codec for telemetry series"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand(
        "train", "Learn a filter stack from a series (per window by default)");
    SeriesOptions train_series;
    std::string train_config, train_out;
    std::vector<std::string> train_overrides;
    bool train_average = false;
    add_series_options(train_cmd, train_series);
    train_cmd->add_option("--config", train_config, "Training config JSON");
    train_cmd->add_option("--set", train_overrides, override_help());
    train_cmd->add_option("--out", train_out, "Output directory")->required();
    train_cmd->add_flag("--average", train_average,
                        "Train one stack with gradients averaged across windows");

    // compress
    auto* compress_cmd = app.add_subcommand(
        "compress", "Threshold-compress a series and reconstruct it");
    SeriesOptions compress_series;
    std::string compress_stack, compress_transform, compress_out,
        compress_wavelet = "db4";
    std::size_t compress_levels = 5;
    double compress_rho = 0.1;
    int compress_j1 = kDefaultFineScale;
    add_series_options(compress_cmd, compress_series);
    compress_cmd->add_option("--stack", compress_stack, "Learned stack JSON");
    compress_cmd->add_option("--transform", compress_transform,
                             "Baseline transform: haar or db4");
    compress_cmd->add_option("--levels", compress_levels,
                             "Decomposition depth for baseline transforms");
    compress_cmd->add_option("--rho", compress_rho, "Retention ratio in (0, 1]")
        ->required();
    compress_cmd->add_option("--j1", compress_j1, "Finest scale of the Hurst fit");
    compress_cmd->add_option("--estimator-wavelet", compress_wavelet,
                             "Wavelet for the Hurst fit: haar or db4");
    compress_cmd->add_option("--out", compress_out, "Output directory")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Rate-distortion sweep against haar and db4 baselines");
    SeriesOptions sweep_series;
    std::string sweep_stack, sweep_out, sweep_wavelet = "db4";
    std::string sweep_rhos = "0.01,0.02,0.05,0.1,0.2,0.4,0.8";
    std::size_t sweep_levels = 5;
    int sweep_j1 = kDefaultFineScale;
    bool sweep_baseline_only = false;
    add_series_options(sweep_cmd, sweep_series);
    sweep_cmd->add_option("--stack", sweep_stack, "Learned stack JSON");
    sweep_cmd->add_flag("--baseline-only", sweep_baseline_only,
                        "Sweep only the fixed baselines");
    sweep_cmd->add_option("--levels", sweep_levels,
                          "Decomposition depth when no stack is given");
    sweep_cmd->add_option("--rhos", sweep_rhos, "Comma-separated retention ratios");
    sweep_cmd->add_option("--j1", sweep_j1, "Finest scale of the Hurst fit");
    sweep_cmd->add_option("--estimator-wavelet", sweep_wavelet,
                          "Wavelet for the Hurst fit: haar or db4");
    sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();

    // hurst
    auto* hurst_cmd = app.add_subcommand("hurst", "Abry-Veitch Hurst estimate");
    SeriesOptions hurst_series;
    std::string hurst_wavelet = "db4", hurst_out;
    int hurst_j1 = kDefaultFineScale, hurst_j2 = 0;
    add_series_options(hurst_cmd, hurst_series, /*with_windows=*/false);
    hurst_cmd->add_option("--j1", hurst_j1, "Finest scale of the fit");
    hurst_cmd->add_option("--j2", hurst_j2,
                          "Coarsest scale of the fit (0 = automatic)");
    hurst_cmd->add_option("--wavelet", hurst_wavelet,
                          "Estimator wavelet: haar or db4");
    hurst_cmd->add_option("--out", hurst_out, "Output directory")->required();

    // filters
    auto* filters_cmd = app.add_subcommand(
        "filters", "Export per-level filters from a learned stack");
    std::string filters_stack, filters_out;
    int filters_window = -1;
    std::size_t filters_response = 0;
    filters_cmd->add_option("--stack", filters_stack, "Learned stack JSON")
        ->required();
    filters_cmd->add_option("--window", filters_window,
                            "Window index within the stack file");
    filters_cmd->add_option("--response", filters_response,
                            "Also sample magnitude responses on this many points");
    filters_cmd->add_option("--out", filters_out, "Output directory")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate fractional Gaussian noise");
    std::size_t synth_n = 65536;
    double synth_hurst = 0.8;
    std::uint64_t synth_seed = 12345;
    std::string synth_out;
    synth_cmd->add_option("--n", synth_n, "Sample count (power of two, or <= 4096)");
    synth_cmd->add_option("--hurst", synth_hurst, "Hurst exponent in (0, 1)");
    synth_cmd->add_option("--seed", synth_seed, "Random seed");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) {
            return run_train(train_series, train_config, train_overrides, train_out,
                             train_average);
        }
        if (compress_cmd->parsed()) {
            return run_compress(compress_series, compress_stack, compress_transform,
                                compress_levels, compress_rho, compress_out,
                                compress_j1, compress_wavelet);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(sweep_series,
                             sweep_baseline_only ? std::string() : sweep_stack,
                             sweep_levels, sweep_rhos, sweep_out, sweep_j1,
                             sweep_wavelet);
        }
        if (hurst_cmd->parsed()) {
            return run_hurst(hurst_series, hurst_j1, hurst_j2, hurst_wavelet,
                             hurst_out);
        }
        if (filters_cmd->parsed()) {
            return run_filters(filters_stack, filters_window, filters_response,
                               filters_out);
        }
        if (synth_cmd->parsed()) {
            return run_synth(synth_n, synth_hurst, synth_seed, synth_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace merawav
