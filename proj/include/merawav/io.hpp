// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "merawav/compression.hpp"
#include "merawav/lrd.hpp"
#include "merawav/training.hpp"
#include "merawav/transform.hpp"

namespace merawav {

enum class SeriesFormat { csv_single_column, csv_timestamp_value };

SeriesFormat series_format_from_string(const std::string& s);

/// A loaded telemetry series: values (bytes per interval or arbitrary
/// units), the sampling period, and a label for reports.
struct TraceSeries {
    std::vector<double> values;
    double interval_ms = 1.0;
    std::string label;
};

struct WindowPlan {
    std::size_t size = 1024;
    std::size_t stride = 1024;
};

/// Reads one value per record (or the value column of timestamp,value
/// rows). Non-finite or unparsable entries raise ParseError with the
/// 1-based row. Negative values are rejected unless allow_negative is set
/// (synthetic signals).
TraceSeries read_series(const std::filesystem::path& path, SeriesFormat format,
                        bool allow_negative = false);

/// Full windows only; the trailing remainder is dropped, never padded.
std::vector<std::vector<double>> windowize(const TraceSeries& s,
                                           const WindowPlan& plan);

/// One value per line, 17 significant digits (value-exact roundtrip).
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<double>& values);

std::string format_double(double v);

// -- Training config JSON (field names mirror TrainingConfig) ----------------

TrainingConfig read_training_config(const std::filesystem::path& path);
void write_training_config(const std::filesystem::path& path,
                           const TrainingConfig& cfg);
std::string training_config_to_json(const TrainingConfig& cfg);

/// Applies a "key=value" override; keys are the JSON field names plus the
/// shorthands iterations, eta1 and eta2.
void apply_override(TrainingConfig& cfg, const std::string& key_equals_value);

/// Keys accepted by apply_override, for --help output.
std::vector<std::string> override_keys();

// -- Learned stack JSON -------------------------------------------------------

struct StoredStack {
    /// Window index the stack was trained on; -1 for an averaged stack.
    int window = -1;
    FilterStack stack;
};

/// Writes {config, mode, stacks:[{window, levels:[{level,u,g,h,det,qmf}]}]}.
void write_stack_json(const std::filesystem::path& path,
                      const std::vector<StoredStack>& stacks,
                      const TrainingConfig& cfg, const std::string& mode);

struct LoadedStacks {
    std::vector<StoredStack> stacks;
    std::string mode;
};

LoadedStacks read_stack_json(const std::filesystem::path& path);

/// Per-level filter export [{level, g, h, det, qmf}, ...].
std::string filters_to_json(const FilterStack& stack);

// -- CSV reports ---------------------------------------------------------------

/// Columns: window,iteration,sparsity,mse,total. One block per stack; the
/// averaged mode uses window = -1.
void write_loss_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<int, std::vector<LossBreakdown>>>&
                        traces);

/// Columns: trace,transform,rho,kept,psnr_db,delta_psnr_vs_<baseline>...,
/// delta_h (blank when not computed).
void write_rd_csv(const std::filesystem::path& path, const std::string& trace_label,
                  const RateDistortionTable& table,
                  const std::vector<std::string>& baselines);

void write_spectrum_csv(const std::filesystem::path& path, const HurstEstimate& est);

void write_hurst_json(const std::filesystem::path& path, const HurstEstimate& est);

}  // namespace merawav
