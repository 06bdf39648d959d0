// SPDX-License-Identifier: Apache-2.0
#include "merawav/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "merawav/errors.hpp"

namespace merawav {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

double parse_value(const std::string& field, std::size_t row) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(field, &consumed);
        if (consumed != field.size()) {
            throw ParseError("trailing characters in value '" + field + "'", row);
        }
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("cannot parse value '" + field + "'", row);
    }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    return out;
}

json config_to_json_obj(const TrainingConfig& cfg) {
    return json{{"levels", cfg.levels},
                {"stage1_iterations", cfg.stage1_iterations},
                {"stage2_iterations", cfg.stage2_iterations},
                {"stage1_learning_rate", cfg.stage1_learning_rate},
                {"stage2_learning_rate", cfg.stage2_learning_rate},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"epsilon", cfg.epsilon},
                {"lambda_sparse", cfg.lambda_sparse},
                {"lambda_mse", cfg.lambda_mse},
                {"init", to_string(cfg.init)},
                {"seed", cfg.seed},
                {"normalization", to_string(cfg.normalization)}};
}

void config_from_json_obj(const json& j, TrainingConfig& cfg) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "levels") cfg.levels = value.get<int>();
            else if (key == "stage1_iterations") cfg.stage1_iterations = value.get<int>();
            else if (key == "stage2_iterations") cfg.stage2_iterations = value.get<int>();
            else if (key == "stage1_learning_rate") cfg.stage1_learning_rate = value.get<double>();
            else if (key == "stage2_learning_rate") cfg.stage2_learning_rate = value.get<double>();
            else if (key == "beta1") cfg.beta1 = value.get<double>();
            else if (key == "beta2") cfg.beta2 = value.get<double>();
            else if (key == "epsilon") cfg.epsilon = value.get<double>();
            else if (key == "lambda_sparse") cfg.lambda_sparse = value.get<double>();
            else if (key == "lambda_mse") cfg.lambda_mse = value.get<double>();
            else if (key == "init") cfg.init = init_mode_from_string(value.get<std::string>());
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "normalization") cfg.normalization = normalization_from_string(value.get<std::string>());
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw ConfigError("bad value for config key '" + key + "': " + e.what());
        }
    }
    cfg.validate();
}

json level_to_json(int level, const OrthogonalPair& u) {
    const FirFilterPair f = filters_from_matrix(u);
    return json{{"level", level},
                {"u", {{u.u00(), u.u01()}, {u.u10(), u.u11()}}},
                {"g", f.g()},
                {"h", f.h()},
                {"det", u.det()},
                {"qmf", qmf_check(u, 1e-6)}};
}

FilterStack stack_from_json(const json& levels_json) {
    if (!levels_json.is_array() || levels_json.empty()) {
        throw DataError("stack JSON: 'levels' must be a nonempty array");
    }
    std::vector<OrthogonalPair> levels;
    levels.reserve(levels_json.size());
    for (const auto& lvl : levels_json) {
        const auto& u = lvl.at("u");
        levels.emplace_back(u.at(0).at(0).get<double>(), u.at(0).at(1).get<double>(),
                            u.at(1).at(0).get<double>(), u.at(1).at(1).get<double>());
    }
    return FilterStack(std::move(levels));
}

}  // namespace

SeriesFormat series_format_from_string(const std::string& s) {
    if (s == "single" || s == "csv_single_column") {
        return SeriesFormat::csv_single_column;
    }
    if (s == "timestamp" || s == "csv_timestamp_value") {
        return SeriesFormat::csv_timestamp_value;
    }
    throw ConfigError("unknown series format '" + s +
                      "' (expected single|timestamp)");
}

TraceSeries read_series(const std::filesystem::path& path, SeriesFormat format,
                        bool allow_negative) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");

    TraceSeries series;
    series.label = path.stem().string();

    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        std::string field = stripped;
        if (format == SeriesFormat::csv_timestamp_value) {
            const auto comma = stripped.find(',');
            if (comma == std::string::npos) {
                throw ParseError("expected 'timestamp,value'", row);
            }
            field = trim(stripped.substr(comma + 1));
        }

        const double v = parse_value(field, row);
        if (!std::isfinite(v)) throw ParseError("non-finite value", row);
        if (v < 0.0 && !allow_negative) {
            throw ParseError("negative value (pass the negative-values flag for "
                             "synthetic signals)", row);
        }
        series.values.push_back(v);
    }
    if (series.values.empty()) throw DataError("'" + path.string() + "' is empty");
    return series;
}

std::vector<std::vector<double>> windowize(const TraceSeries& s,
                                           const WindowPlan& plan) {
    if (plan.size == 0 || plan.stride == 0) {
        throw ConfigError("window size and stride must be >= 1");
    }
    if (s.values.size() < plan.size) {
        throw DataError("series of " + std::to_string(s.values.size()) +
                        " samples is shorter than one window of " +
                        std::to_string(plan.size));
    }
    const std::size_t count = (s.values.size() - plan.size) / plan.stride + 1;
    std::vector<std::vector<double>> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const auto begin = s.values.begin() + static_cast<std::ptrdiff_t>(w * plan.stride);
        windows.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(plan.size));
    }
    return windows;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<double>& values) {
    std::ofstream out = open_for_write(path);
    for (double v : values) out << format_double(v) << '\n';
}

TrainingConfig read_training_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " +
                          e.what());
    }
    TrainingConfig cfg;
    config_from_json_obj(j, cfg);
    return cfg;
}

std::string training_config_to_json(const TrainingConfig& cfg) {
    return config_to_json_obj(cfg).dump(2);
}

void write_training_config(const std::filesystem::path& path,
                           const TrainingConfig& cfg) {
    std::ofstream out = open_for_write(path);
    out << training_config_to_json(cfg) << '\n';
}

void apply_override(TrainingConfig& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);

    auto as_int = [&] {
        try {
            return std::stoi(value);
        } catch (const std::exception&) {
            throw ConfigError("override " + key + " needs an integer, got '" +
                              value + "'");
        }
    };
    auto as_double = [&] {
        try {
            return std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("override " + key + " needs a number, got '" +
                              value + "'");
        }
    };

    if (key == "levels") cfg.levels = as_int();
    else if (key == "stage1_iterations" || key == "stage1") cfg.stage1_iterations = as_int();
    else if (key == "stage2_iterations" || key == "stage2") cfg.stage2_iterations = as_int();
    else if (key == "iterations") {
        const int total = as_int();
        if (total < 0) throw ConfigError("iterations must be >= 0");
        cfg.stage1_iterations = (total + 1) / 2;
        cfg.stage2_iterations = total / 2;
    }
    else if (key == "stage1_learning_rate" || key == "eta1") cfg.stage1_learning_rate = as_double();
    else if (key == "stage2_learning_rate" || key == "eta2") cfg.stage2_learning_rate = as_double();
    else if (key == "beta1") cfg.beta1 = as_double();
    else if (key == "beta2") cfg.beta2 = as_double();
    else if (key == "epsilon") cfg.epsilon = as_double();
    else if (key == "lambda_sparse") cfg.lambda_sparse = as_double();
    else if (key == "lambda_mse") cfg.lambda_mse = as_double();
    else if (key == "init") cfg.init = init_mode_from_string(value);
    else if (key == "seed") {
        try {
            cfg.seed = std::stoull(value);
        } catch (const std::exception&) {
            throw ConfigError("override seed needs an unsigned integer");
        }
    }
    else if (key == "normalization") cfg.normalization = normalization_from_string(value);
    else throw ConfigError("unknown override key '" + key + "'");
}

std::vector<std::string> override_keys() {
    return {"levels",        "stage1_iterations", "stage2_iterations",
            "iterations",    "stage1_learning_rate", "stage2_learning_rate",
            "eta1",          "eta2",              "beta1",
            "beta2",         "epsilon",           "lambda_sparse",
            "lambda_mse",    "init",              "seed",
            "normalization"};
}

void write_stack_json(const std::filesystem::path& path,
                      const std::vector<StoredStack>& stacks,
                      const TrainingConfig& cfg, const std::string& mode) {
    json out;
    out["config"] = config_to_json_obj(cfg);
    out["mode"] = mode;
    json arr = json::array();
    for (const auto& stored : stacks) {
        json levels = json::array();
        for (std::size_t ell = 0; ell < stored.stack.depth(); ++ell) {
            levels.push_back(level_to_json(static_cast<int>(ell + 1),
                                           stored.stack.level(ell)));
        }
        json entry{{"levels", levels}};
        if (stored.window >= 0) entry["window"] = stored.window;
        arr.push_back(entry);
    }
    out["stacks"] = arr;

    std::ofstream f = open_for_write(path);
    f << out.dump(2) << '\n';
}

LoadedStacks read_stack_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stack file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("stack file '" + path.string() + "' is not valid JSON: " +
                        e.what());
    }

    LoadedStacks loaded;
    try {
        loaded.mode = j.value("mode", std::string("per_window"));
        for (const auto& entry : j.at("stacks")) {
            StoredStack stored{entry.value("window", -1),
                               stack_from_json(entry.at("levels"))};
            loaded.stacks.push_back(std::move(stored));
        }
    } catch (const json::exception& e) {
        throw DataError("stack file '" + path.string() + "' is malformed: " +
                        e.what());
    }
    if (loaded.stacks.empty()) {
        throw DataError("stack file '" + path.string() + "' holds no stacks");
    }
    return loaded;
}

std::string filters_to_json(const FilterStack& stack) {
    json arr = json::array();
    for (std::size_t ell = 0; ell < stack.depth(); ++ell) {
        arr.push_back(level_to_json(static_cast<int>(ell + 1), stack.level(ell)));
    }
    return arr.dump(2);
}

void write_loss_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<int, std::vector<LossBreakdown>>>& traces) {
    std::ofstream out = open_for_write(path);
    out << "window,iteration,sparsity,mse,total\n";
    for (const auto& [window, trace] : traces) {
        for (std::size_t i = 0; i < trace.size(); ++i) {
            out << window << ',' << (i + 1) << ',' << format_double(trace[i].sparsity)
                << ',' << format_double(trace[i].mse) << ','
                << format_double(trace[i].total) << '\n';
        }
    }
}

void write_rd_csv(const std::filesystem::path& path, const std::string& trace_label,
                  const RateDistortionTable& table,
                  const std::vector<std::string>& baselines) {
    std::ofstream out = open_for_write(path);
    out << "trace,transform,rho,kept,psnr_db";
    for (const auto& b : baselines) out << ",delta_psnr_vs_" << b;
    out << ",delta_h\n";

    for (const auto& pt : table.points) {
        out << trace_label << ',' << pt.transform << ',' << format_double(pt.rho)
            << ',' << pt.kept << ',' << format_double(pt.psnr_db);
        for (const auto& b : baselines) {
            out << ',' << format_double(table.delta_psnr(pt.transform, b, pt.rho));
        }
        out << ',';
        if (pt.delta_h) out << format_double(*pt.delta_h);
        out << '\n';
    }
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const HurstEstimate& est) {
    std::ofstream out = open_for_write(path);
    out << "j,y,n,weight\n";
    for (const auto& p : est.per_scale) {
        out << p.scale << ',' << format_double(p.y) << ',' << p.n << ','
            << format_double(p.weight) << '\n';
    }
}

void write_hurst_json(const std::filesystem::path& path, const HurstEstimate& est) {
    const json j{{"h", est.h},       {"ci_low", est.ci_low},
                 {"ci_high", est.ci_high}, {"beta", est.beta},
                 {"j1", est.j1},     {"j2", est.j2}};
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
}

}  // namespace merawav
