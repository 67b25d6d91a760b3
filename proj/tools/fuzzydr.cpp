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

// Command line front end: ingest, reduce, eval, sweep, bench, validity.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <omp.h>

#include "fuzzydr/classify.hpp"
#include "fuzzydr/error.hpp"
#include "fuzzydr/fuzzy.hpp"
#include "fuzzydr/harness.hpp"
#include "fuzzydr/linear.hpp"
#include "fuzzydr/reduced.hpp"

namespace fs = std::filesystem;
using namespace fdr;

namespace {

// Flag values keyed by their config-file names, so file and flags share apply_config.
struct Flags {
    std::map<std::string, std::string> values;
    std::string config;
    std::string matrix;
    std::string labels;

    void add(CLI::App* app, const std::string& key, const std::string& help) {
        app->add_option("--" + key, values[key], help);
    }

    harness::ExperimentConfig resolve(CLI::App* app) const {
        std::map<std::string, std::string> kv;
        if (!config.empty()) kv = harness::parse_config_file(config);
        // dataset has to go first so the label options land on the parsed spec
        for (const auto& [key, value] : values) {
            if (app->count("--" + key) > 0) kv[key] = value;
        }
        harness::ExperimentConfig cfg;
        if (const auto it = kv.find("dataset"); it != kv.end()) {
            harness::apply_config({{"dataset", it->second}}, cfg);
            kv.erase(it);
        }
        harness::apply_config(kv, cfg);
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
        return cfg;
    }
};

void add_data_flags(CLI::App* app, Flags& f) {
    f.add(app, "dataset", "lines:<file>, reuters:<dir|files>, dirs:<root>, synthetic:topic[:n] or synthetic:separable[:n]");
    f.add(app, "positive", "positive class label, topic or directory");
    f.add(app, "negative-label", "label of the negative class (labeled lines)");
    f.add(app, "negative-sample", "downsample negatives to this many documents (class directories)");
    f.add(app, "data-seed", "seed for negative sampling and synthetic corpora");
    f.add(app, "min-df", "minimum document frequency of a term");
    f.add(app, "min-token-length", "shortest token kept");
    f.add(app, "stopwords", "file of whitespace separated stopwords");
    f.add(app, "out", "output directory");
    f.add(app, "seed", "master seed");
    f.add(app, "threads", "OpenMP worker count");
    app->add_option("--config", f.config, "key = value file; flags override it");
}

void add_model_flags(CLI::App* app, Flags& f) {
    f.add(app, "methods", "comma list of FC, PCA, SVD");
    f.add(app, "dims", "comma list or a:b:step range of target dimensions");
    f.add(app, "fuzzifier", "comma list of fuzzifier values (FC only)");
    f.add(app, "linear-input", "counts or l2 (PCA and SVD input)");
    f.add(app, "fc-restarts", "fuzzy clustering restarts");
    f.add(app, "fc-max-iterations", "fuzzy clustering iteration cap");
    f.add(app, "fc-epsilon", "fuzzy clustering objective tolerance");
}

void add_classifier_flags(CLI::App* app, Flags& f) {
    f.add(app, "classifiers", "comma list of logistic, forest, adaboost");
    f.add(app, "folds", "cross-validation folds");
    f.add(app, "forest-trees", "trees per forest");
    f.add(app, "forest-depth", "tree depth cap (0 = unlimited)");
    f.add(app, "boost-rounds", "AdaBoost rounds");
    f.add(app, "logistic-penalty", "L2 penalty of the logistic model");
    f.add(app, "logistic-max-iterations", "logistic iteration cap");
    f.add(app, "logistic-tolerance", "logistic gradient tolerance");
    f.add(app, "logistic-standardize", "scale features to unit variance before the logistic fit");
}

harness::Dataset input_data(const harness::ExperimentConfig& cfg, const Flags& f) {
    if (!f.matrix.empty()) {
        std::ifstream mx(f.matrix);
        if (!mx) fail(ErrorCode::IoError, "cannot open " + f.matrix);
        harness::Dataset d;
        d.name = fs::path(f.matrix).stem().string();
        d.counts = read_matrix_dump(mx);
        if (!f.labels.empty()) {
            std::ifstream lb(f.labels);
            if (!lb) fail(ErrorCode::IoError, "cannot open " + f.labels);
            d.labels = corpus::labels_as_int(corpus::read_labels(lb));
            if (static_cast<Index>(d.labels.size()) != d.counts.rows()) {
                fail(ErrorCode::DimensionMismatch, "label count does not match matrix rows");
            }
        }
        return d;
    }
    if (cfg.dataset.loader.empty()) fail(ErrorCode::InvalidParams, "either --dataset or --matrix is required");
    return harness::load_dataset(cfg.dataset, cfg.tokenizer);
}

classify::DrSpec single_dr(const harness::ExperimentConfig& cfg) {
    classify::DrSpec dr;
    dr.method = cfg.methods.front();
    dr.k = cfg.dims.front();
    dr.q = cfg.fuzzifiers.empty() ? 1.5 : cfg.fuzzifiers.front();
    dr.linear_input = cfg.linear_input;
    dr.n_restarts = cfg.fc_restarts;
    dr.max_iterations = cfg.fc_max_iterations;
    dr.epsilon = cfg.fc_epsilon;
    return dr;
}

std::vector<classify::ClassifierSpec> classifier_list(const harness::ExperimentConfig& cfg) {
    std::vector<classify::ClassifierSpec> out;
    for (const auto kind : cfg.classifiers) {
        classify::ClassifierSpec s;
        s.kind = kind;
        s.forest = cfg.forest;
        s.boost = cfg.boost;
        s.linear = cfg.linear;
        out.push_back(s);
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream os(path);
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
    return os;
}

int cmd_ingest(CLI::App* app, const Flags& f) {
    const auto cfg = f.resolve(app);
    if (cfg.dataset.loader.empty()) fail(ErrorCode::InvalidParams, "--dataset is required");
    const auto d = harness::load_dataset(cfg.dataset, cfg.tokenizer);
    auto mx = open_out(cfg.out_dir / "matrix.txt");
    write_matrix_dump(mx, d.counts);
    auto lb = open_out(cfg.out_dir / "labels.txt");
    for (const int y : d.labels) lb << y << '\n';
    auto vb = open_out(cfg.out_dir / "vocabulary.txt");
    for (const auto& t : d.vocabulary.terms()) vb << t << '\n';
    std::size_t pos = 0;
    for (const int y : d.labels) pos += y == 1;
    fmt::print("{}: {} documents ({} positive), {} terms, {} nonzeros, {} skipped\n", d.name, d.counts.rows(), pos,
               d.counts.cols(), d.counts.nnz(), d.skipped);
    return 0;
}

int cmd_reduce(CLI::App* app, const Flags& f) {
    const auto cfg = f.resolve(app);
    const auto d = input_data(cfg, f);
    const auto dr = single_dr(cfg);
    const auto fitted = classify::fit_reducer(dr, d.counts, cfg.seed);
    const fs::path path = cfg.out_dir / fmt::format("reduced-{}-{}.txt", dr.variant(), dr.k);
    auto os = open_out(path);
    write_reduced_dump(os, fitted.train_features);
    fmt::print("{} k={} -> {}\n", dr.variant(), dr.k, path.string());
    return 0;
}

int cmd_eval(CLI::App* app, const Flags& f) {
    const auto cfg = f.resolve(app);
    const auto d = input_data(cfg, f);
    if (d.labels.empty()) fail(ErrorCode::InvalidParams, "eval needs labels");
    const auto dr = single_dr(cfg);
    const auto clf = classifier_list(cfg);
    classify::CvOptions opts;
    opts.folds = cfg.folds;
    opts.seed = cfg.seed;
    const auto reports = classify::cross_validate_many(d.counts, d.labels, dr, clf, opts);
    fmt::print("{}\n", classify::csv_header());
    for (const auto& r : reports) fmt::print("{}\n", classify::to_csv_row(d.name, r));
    return 0;
}

int cmd_sweep(CLI::App* app, const Flags& f) {
    const auto cfg = f.resolve(app);
    harness::ResultsTable table;
    if (!f.matrix.empty()) {
        table = harness::run_experiment(cfg, input_data(cfg, f));
    } else {
        table = harness::run_experiment(cfg);
    }
    for (const auto& a : table.averaged) fmt::print("{:<8} k={:<4} {:.5f}\n", a.variant, a.k, a.accuracy);
    for (const auto& [key, msg] : table.failures) fmt::print(std::cerr, "failed {}: {}\n", key, msg);
    fmt::print("results in {}\n", cfg.out_dir.string());
    return table.failures.empty() ? 0 : 3;
}

struct BenchFlags {
    std::string n_list = "10000,20000,40000,80000";
    Index k = 50;
    Index m = 10000;
    Index nnz = 40;
    int iterations = 5;
    int repeats = 3;
};

int cmd_bench(CLI::App* app, const Flags& f, const BenchFlags& b) {
    const auto cfg = f.resolve(app);
    const auto report =
        harness::scaling_benchmark(harness::parse_index_list(b.n_list), b.k, b.m, b.nnz, cfg.seed, b.iterations, b.repeats);
    std::string csv = "n,seconds_per_iteration\n";
    for (const auto& p : report.points) {
        fmt::print("n={:<8} {:.6f} s/iter\n", p.n, p.seconds_per_iteration);
        csv += fmt::format("{},{}\n", p.n, p.seconds_per_iteration);
    }
    for (const double r : report.ratios) fmt::print("ratio {:.3f}\n", r);
    fmt::print("slope {:.3e} s/doc, R^2 {:.4f}\n", report.slope, report.r_squared);
    auto os = open_out(cfg.out_dir / "scaling.csv");
    os << csv;
    return 0;
}

int cmd_validity(CLI::App* app, const Flags& f, const std::string& k_range) {
    const auto cfg = f.resolve(app);
    const auto d = input_data(cfg, f);
    const auto x = l2_normalize_rows(d.counts);
    const auto ks = harness::parse_index_list(k_range);
    fmt::print("q,k,xie_beni,objective\n");
    for (const double q : cfg.fuzzifiers) {
        for (const Index k : ks) {
            fuzzy::FuzzyParams p;
            p.k = k;
            p.q = q;
            p.max_iterations = cfg.fc_max_iterations;
            p.epsilon = cfg.fc_epsilon;
            p.n_restarts = cfg.fc_restarts;
            p.seed = cfg.seed;
            const auto fit = fuzzy::fit(x, p);
            fmt::print("{},{},{},{}\n", q, k, fuzzy::xie_beni(x, fit.model.prototypes, fit.memberships, q),
                       fit.model.objective_trace.back());
        }
    }
    return 0;
}

int exit_code(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Usage:
            return 1;
        case ErrorCategory::Data:
            return 2;
        case ErrorCategory::Numerical:
            return 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fuzzy clustering dimensionality reduction for bag-of-words text"};
    app.require_subcommand(1);

    Flags ingest_f, reduce_f, eval_f, sweep_f, bench_f, validity_f;
    BenchFlags bench_b;
    std::string k_range = "2:10";

    auto* ingest = app.add_subcommand("ingest", "load a corpus and write matrix, labels and vocabulary dumps");
    add_data_flags(ingest, ingest_f);

    auto* reduce = app.add_subcommand("reduce", "reduce a corpus or matrix dump with one method");
    add_data_flags(reduce, reduce_f);
    add_model_flags(reduce, reduce_f);
    reduce->add_option("--matrix", reduce_f.matrix, "matrix dump instead of --dataset");

    auto* eval = app.add_subcommand("eval", "cross-validate one method and dimension");
    add_data_flags(eval, eval_f);
    add_model_flags(eval, eval_f);
    add_classifier_flags(eval, eval_f);
    eval->add_option("--matrix", eval_f.matrix, "matrix dump instead of --dataset");
    eval->add_option("--labels", eval_f.labels, "labels for --matrix");

    auto* sweep = app.add_subcommand("sweep", "run the full dimension sweep");
    add_data_flags(sweep, sweep_f);
    add_model_flags(sweep, sweep_f);
    add_classifier_flags(sweep, sweep_f);
    sweep->add_option("--matrix", sweep_f.matrix, "matrix dump instead of --dataset");
    sweep->add_option("--labels", sweep_f.labels, "labels for --matrix");

    auto* bench = app.add_subcommand("bench", "per-iteration fuzzy fit time against corpus size");
    bench_f.add(bench, "seed", "master seed");
    bench_f.add(bench, "out", "output directory");
    bench_f.add(bench, "threads", "OpenMP worker count");
    bench->add_option("--n-list", bench_b.n_list, "document counts");
    bench->add_option("--k", bench_b.k, "clusters");
    bench->add_option("--m", bench_b.m, "vocabulary size");
    bench->add_option("--nnz", bench_b.nnz, "nonzeros per row");
    bench->add_option("--iterations", bench_b.iterations, "timed iterations per size");
    bench->add_option("--repeats", bench_b.repeats, "fits per size; the fastest is kept");

    auto* validity = app.add_subcommand("validity", "Xie-Beni index over a range of k");
    add_data_flags(validity, validity_f);
    add_model_flags(validity, validity_f);
    validity->add_option("--matrix", validity_f.matrix, "matrix dump instead of --dataset");
    validity->add_option("--k-range", k_range, "cluster counts, e.g. 2:10");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*ingest) return cmd_ingest(ingest, ingest_f);
        if (*reduce) return cmd_reduce(reduce, reduce_f);
        if (*eval) return cmd_eval(eval, eval_f);
        if (*sweep) return cmd_sweep(sweep, sweep_f);
        if (*bench) return cmd_bench(bench, bench_f, bench_b);
        if (*validity) return cmd_validity(validity, validity_f, k_range);
    } catch (const Error& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 2;
    }
    return 1;
}
