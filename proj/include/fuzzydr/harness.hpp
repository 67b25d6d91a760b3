// Copyright 2026 The fuzzydr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fuzzydr/classify.hpp"
#include "fuzzydr/corpus.hpp"
#include "fuzzydr/reduced.hpp"

/// Experiment runner: dimension sweep x method x fuzzifier x classifier.
namespace fdr::harness {

/// "<loader>:<path>[,<path>...]" with loader one of lines, reuters, dirs,
/// synthetic. Synthetic sources are "synthetic:topic[:n]" and
/// "synthetic:separable[:n]".
struct DatasetSpec {
    std::string loader;
    std::vector<std::string> paths;
    std::string positive;
    std::optional<std::string> negative_label;
    std::optional<std::size_t> negative_sample;
    std::uint64_t seed = 7;

    /// Short name used in output rows.
    std::string name() const;
};

DatasetSpec parse_dataset(const std::string& spec);

struct Dataset {
    std::string name;
    corpus::Vocabulary vocabulary{std::vector<std::string>{}};
    SparseDocMatrix counts;
    classify::Labels labels;
    std::size_t skipped = 0;
};

Dataset load_dataset(const DatasetSpec& spec, const corpus::TokenizerConfig& cfg);
Dataset make_dataset(const std::string& name, const corpus::LabeledCorpus& c, const corpus::TokenizerConfig& cfg);

struct ExperimentConfig {
    DatasetSpec dataset;
    corpus::TokenizerConfig tokenizer;
    std::vector<Index> dims{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::vector<Method> methods{Method::FC, Method::PCA, Method::SVD};
    std::vector<double> fuzzifiers{1.5, 2.0};
    std::vector<classify::ClassifierKind> classifiers{classify::ClassifierKind::Logistic,
                                                      classify::ClassifierKind::RandomForest,
                                                      classify::ClassifierKind::AdaBoost};
    int folds = 5;
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "results";
    /// Workers for the cell pool; 0 leaves the OpenMP default.
    int threads = 0;
    classify::LinearInput linear_input = classify::LinearInput::Counts;
    int fc_restarts = 1;
    int fc_max_iterations = 100;
    double fc_epsilon = 1e-5;
    classify::ForestParams forest;
    classify::BoostParams boost;
    classify::LinearParams linear;

    /// Throws InvalidParams; n and m are the loaded matrix shape when known.
    void validate(Index n = -1, Index m = -1) const;
};

/// Flat `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
/// Applies known keys (same names as the CLI flags); unknown keys throw InvalidParams.
void apply_config(const std::map<std::string, std::string>& kv, ExperimentConfig& cfg);

std::vector<Index> parse_index_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

struct ResultRow {
    std::string dataset;
    Method method = Method::FC;
    std::string variant;
    Index k = 0;
    std::optional<double> q;
    std::string classifier;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    double stddev = 0.0;
    std::uint64_t seed = 0;

    std::string key() const;
    std::string csv() const;
    static ResultRow parse(const std::string& line);
};

struct AveragedRow {
    std::string variant;
    Index k = 0;
    double accuracy = 0.0;
    std::size_t classifiers = 0;
};

struct ResultsTable {
    std::vector<ResultRow> rows;
    /// Classifier-averaged accuracy per (variant, k), in sweep order.
    std::vector<AveragedRow> averaged;
    std::vector<std::pair<std::string, std::string>> failures;
    /// Wall seconds per cell key; excluded from the result CSVs.
    std::map<std::string, double> wall_seconds;
};

/// Recomputes `averaged` from `rows`.
void compute_averages(ResultsTable& table, const std::vector<std::string>& variant_order);

/// Runs every missing cell and writes the outputs under cfg.out_dir. Cells
/// already present in out_dir/results.csv are kept and skipped.
ResultsTable run_experiment(const ExperimentConfig& cfg);
ResultsTable run_experiment(const ExperimentConfig& cfg, const Dataset& data);

/// Population sd of the averaged accuracy across dimensions, per variant.
std::map<std::string, double> stability_summary(const ResultsTable& table);

/// One "k accuracy" file per variant plus series.csv.
void emit_plot_data(const ResultsTable& table, const std::filesystem::path& dir);
std::vector<std::pair<Index, double>> read_series(const std::filesystem::path& file);

struct ScalingPoint {
    Index n = 0;
    double seconds_per_iteration = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// time(n_{i+1}) / time(n_i)
    std::vector<double> ratios;
};

/// Per-iteration fuzzy fit time on random count matrices of each size; the
/// fastest of `repeats` fits is reported at each n.
ScalingReport scaling_benchmark(const std::vector<Index>& n_list, Index k, Index m, Index nnz_per_row,
                                std::uint64_t seed, int iterations = 5, int repeats = 3);

/// Least-squares line through (x, y) and its R^2.
std::tuple<double, double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fdr::harness
