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

#include "fuzzydr/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fuzzydr/error.hpp"
#include "fuzzydr/fuzzy.hpp"
#include "fuzzydr/rng.hpp"
#include "fuzzydr/synthetic.hpp"

namespace fdr::harness {

namespace fs = std::filesystem;
using classify::ClassifierKind;
using classify::ClassifierSpec;
using classify::DrSpec;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        T v{};
        if constexpr (std::is_floating_point_v<T>) {
            v = static_cast<T>(std::stod(s, &used));
        } else if constexpr (std::is_unsigned_v<T>) {
            v = static_cast<T>(std::stoull(s, &used));
        } else {
            v = static_cast<T>(std::stoll(s, &used));
        }
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::InvalidParams, fmt::format("cannot parse {} from '{}'", what, s));
    }
}

bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    fail(ErrorCode::InvalidParams, "cannot parse boolean from '" + s + "'");
}

std::vector<DrSpec> variant_specs(const ExperimentConfig& cfg) {
    std::vector<DrSpec> out;
    for (const Method m : cfg.methods) {
        DrSpec base;
        base.method = m;
        base.linear_input = cfg.linear_input;
        base.n_restarts = cfg.fc_restarts;
        base.max_iterations = cfg.fc_max_iterations;
        base.epsilon = cfg.fc_epsilon;
        if (m == Method::FC) {
            for (const double q : cfg.fuzzifiers) {
                DrSpec s = base;
                s.q = q;
                out.push_back(s);
            }
        } else {
            out.push_back(base);
        }
    }
    return out;
}

std::vector<ClassifierSpec> classifier_specs(const ExperimentConfig& cfg) {
    std::vector<ClassifierSpec> out;
    for (const auto kind : cfg.classifiers) {
        ClassifierSpec s;
        s.kind = kind;
        s.forest = cfg.forest;
        s.boost = cfg.boost;
        s.linear = cfg.linear;
        out.push_back(s);
    }
    return out;
}

std::string cell_key(const std::string& variant, Index k, std::string_view classifier) {
    return fmt::format("{}|{}|{}", variant, k, classifier);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

}  // namespace

// ---------------------------------------------------------------- datasets

std::string DatasetSpec::name() const {
    if (loader == "synthetic") return "synthetic-" + (paths.empty() ? std::string("topic") : paths.front());
    return positive.empty() ? loader : loader + "-" + positive;
}

DatasetSpec parse_dataset(const std::string& spec) {
    const auto colon = spec.find(':');
    DatasetSpec out;
    out.loader = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (out.loader == "synthetic") {
        out.paths = rest.empty() ? std::vector<std::string>{"topic"} : split(rest, ':');
    } else if (out.loader == "lines" || out.loader == "reuters" || out.loader == "dirs") {
        out.paths = split(rest, ',');
        if (out.paths.empty() || out.paths.front().empty()) {
            fail(ErrorCode::InvalidParams, "dataset '" + spec + "' names no path");
        }
    } else {
        fail(ErrorCode::InvalidParams, "unknown dataset loader '" + out.loader + "'");
    }
    return out;
}

Dataset make_dataset(const std::string& name, const corpus::LabeledCorpus& c, const corpus::TokenizerConfig& cfg) {
    c.validate();
    Dataset d;
    d.name = name;
    d.vocabulary = corpus::build_vocabulary(c, cfg);
    d.counts = corpus::vectorize(c, d.vocabulary, cfg);
    d.labels = corpus::labels_as_int(c.labels);
    d.skipped = c.skipped;
    return d;
}

Dataset load_dataset(const DatasetSpec& spec, const corpus::TokenizerConfig& cfg) {
    corpus::LabeledCorpus c;
    if (spec.loader == "lines") {
        if (spec.positive.empty()) fail(ErrorCode::InvalidParams, "--positive is required for labeled lines");
        c = corpus::load_labeled_lines(spec.paths.front(), spec.positive, spec.negative_label);
    } else if (spec.loader == "reuters") {
        std::vector<fs::path> files;
        for (const auto& p : spec.paths) {
            if (fs::is_directory(p)) {
                std::vector<fs::path> found;
                for (const auto& e : fs::directory_iterator(p)) {
                    const auto fname = e.path().filename().string();
                    if (fname.rfind("reut2-", 0) == 0 && e.path().extension() == ".sgm") found.push_back(e.path());
                }
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else {
                files.emplace_back(p);
            }
        }
        if (files.empty()) fail(ErrorCode::MissingDirectory, "no reut2-*.sgm files found");
        c = corpus::load_reuters_sgml(files, spec.positive.empty() ? std::string("grain") : spec.positive);
    } else if (spec.loader == "dirs") {
        if (spec.positive.empty()) fail(ErrorCode::InvalidParams, "--positive is required for class directories");
        c = corpus::load_class_dirs(spec.paths.front(), spec.positive, spec.negative_sample, spec.seed);
    } else if (spec.loader == "synthetic") {
        const std::string kind = spec.paths.empty() ? "topic" : spec.paths.front();
        const std::size_t n = spec.paths.size() > 1 ? parse_number<std::size_t>(spec.paths[1], "document count") : 0;
        if (kind == "topic") {
            synthetic::TopicCorpusSpec ts;
            if (n > 0) ts.n = n;
            ts.seed = spec.seed;
            c = synthetic::topic_corpus(ts);
        } else if (kind == "separable") {
            c = synthetic::separable_corpus(n > 0 ? n : 400, 50, 40, spec.seed);
        } else {
            fail(ErrorCode::InvalidParams, "unknown synthetic corpus '" + kind + "'");
        }
    } else {
        fail(ErrorCode::InvalidParams, "unknown dataset loader '" + spec.loader + "'");
    }
    return make_dataset(spec.name(), c, cfg);
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate(Index n, Index m) const {
    if (dims.empty() || methods.empty() || classifiers.empty()) fail(ErrorCode::InvalidParams, "empty sweep list");
    if (std::find(methods.begin(), methods.end(), Method::FC) != methods.end() && fuzzifiers.empty()) {
        fail(ErrorCode::InvalidParams, "FC needs at least one fuzzifier");
    }
    for (const double q : fuzzifiers) {
        if (!(q > 1.0)) fail(ErrorCode::InvalidParams, fmt::format("fuzzifier {} must exceed 1", q));
    }
    if (folds < 2) fail(ErrorCode::InvalidParams, "folds must be >= 2");
    const Index cap = (n >= 0 && m >= 0) ? std::min(n, m) : -1;
    for (const Index k : dims) {
        if (k < 1) fail(ErrorCode::InvalidParams, "dimensions must be >= 1");
        if (cap >= 0 && k > cap) fail(ErrorCode::InvalidParams, fmt::format("dimension {} exceeds min(n, m) = {}", k, cap));
    }
    tokenizer.validate();
}

std::map<std::string, std::string> parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::MalformedLine, fmt::format("{}:{}: expected key = value", path.string(), no));
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<Index> parse_index_list(const std::string& s) {
    std::vector<Index> out;
    for (const auto& part : split(s, ',')) {
        const auto p = trim(part);
        if (p.empty()) continue;
        // a:b or a:b:step ranges
        const auto r = split(p, ':');
        if (r.size() == 1) {
            out.push_back(parse_number<Index>(p, "dimension"));
        } else if (r.size() == 2 || r.size() == 3) {
            const auto a = parse_number<Index>(r[0], "range start");
            const auto b = parse_number<Index>(r[1], "range end");
            const auto step = r.size() == 3 ? parse_number<Index>(r[2], "range step") : Index{1};
            if (step < 1 || b < a) fail(ErrorCode::InvalidParams, "bad range '" + p + "'");
            for (Index v = a; v <= b; v += step) out.push_back(v);
        } else {
            fail(ErrorCode::InvalidParams, "bad range '" + p + "'");
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) {
        const auto p = trim(part);
        if (!p.empty()) out.push_back(parse_number<double>(p, "value"));
    }
    return out;
}

void apply_config(const std::map<std::string, std::string>& kv, ExperimentConfig& cfg) {
    for (const auto& [key, value] : kv) {
        if (key == "dataset") {
            auto spec = parse_dataset(value);
            spec.positive = cfg.dataset.positive;
            spec.negative_label = cfg.dataset.negative_label;
            spec.negative_sample = cfg.dataset.negative_sample;
            spec.seed = cfg.dataset.seed;
            cfg.dataset = std::move(spec);
        } else if (key == "positive") {
            cfg.dataset.positive = value;
        } else if (key == "negative-label") {
            cfg.dataset.negative_label = value;
        } else if (key == "negative-sample") {
            cfg.dataset.negative_sample = parse_number<std::size_t>(value, key.c_str());
        } else if (key == "data-seed") {
            cfg.dataset.seed = parse_number<std::uint64_t>(value, key.c_str());
        } else if (key == "dims") {
            cfg.dims = parse_index_list(value);
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& m : split(value, ',')) cfg.methods.push_back(parse_method(trim(m)));
        } else if (key == "fuzzifier") {
            cfg.fuzzifiers = parse_double_list(value);
        } else if (key == "classifiers") {
            cfg.classifiers.clear();
            for (const auto& c : split(value, ',')) cfg.classifiers.push_back(classify::parse_classifier(trim(c)));
        } else if (key == "folds") {
            cfg.folds = parse_number<int>(value, key.c_str());
        } else if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(value, key.c_str());
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "threads") {
            cfg.threads = parse_number<int>(value, key.c_str());
        } else if (key == "lowercase") {
            cfg.tokenizer.lowercase = parse_bool(value);
        } else if (key == "min-token-length") {
            cfg.tokenizer.min_token_length = parse_number<std::size_t>(value, key.c_str());
        } else if (key == "min-df") {
            cfg.tokenizer.min_document_frequency = parse_number<std::size_t>(value, key.c_str());
        } else if (key == "stopwords") {
            std::ifstream in(value);
            if (!in) fail(ErrorCode::IoError, "cannot open stopword file " + value);
            std::string w;
            while (in >> w) cfg.tokenizer.stopwords.insert(w);
        } else if (key == "linear-input") {
            if (value == "counts") {
                cfg.linear_input = classify::LinearInput::Counts;
            } else if (value == "l2") {
                cfg.linear_input = classify::LinearInput::L2;
            } else {
                fail(ErrorCode::InvalidParams, "linear-input must be counts or l2");
            }
        } else if (key == "fc-restarts") {
            cfg.fc_restarts = parse_number<int>(value, key.c_str());
        } else if (key == "fc-max-iterations") {
            cfg.fc_max_iterations = parse_number<int>(value, key.c_str());
        } else if (key == "fc-epsilon") {
            cfg.fc_epsilon = parse_number<double>(value, key.c_str());
        } else if (key == "forest-trees") {
            cfg.forest.n_trees = parse_number<int>(value, key.c_str());
        } else if (key == "forest-depth") {
            cfg.forest.max_depth = parse_number<int>(value, key.c_str());
        } else if (key == "boost-rounds") {
            cfg.boost.n_rounds = parse_number<int>(value, key.c_str());
        } else if (key == "logistic-penalty") {
            cfg.linear.l2_penalty = parse_number<double>(value, key.c_str());
        } else if (key == "logistic-max-iterations") {
            cfg.linear.max_iterations = parse_number<int>(value, key.c_str());
        } else if (key == "logistic-standardize") {
            cfg.linear.standardize = parse_bool(value);
        } else if (key == "logistic-tolerance") {
            cfg.linear.tolerance = parse_number<double>(value, key.c_str());
        } else {
            fail(ErrorCode::InvalidParams, "unknown config key '" + key + "'");
        }
    }
}

// ---------------------------------------------------------------- results

std::string ResultRow::key() const { return cell_key(variant, k, classifier); }

std::string ResultRow::csv() const {
    classify::CvReport r;
    r.method = method;
    r.k = k;
    r.q = q;
    r.classifier = classifier;
    r.fold_accuracy = fold_accuracy;
    r.mean_accuracy = mean_accuracy;
    r.stddev = stddev;
    r.seed = seed;
    return classify::to_csv_row(dataset, r);
}

ResultRow ResultRow::parse(const std::string& line) {
    const auto f = split(line, ',');
    if (f.size() != 9) fail(ErrorCode::ParseError, "results row must have 9 fields: " + line);
    ResultRow r;
    r.dataset = f[0];
    r.method = parse_method(f[1]);
    r.k = parse_number<Index>(f[2], "k");
    if (f[3] != "NA") r.q = parse_number<double>(f[3], "fuzzifier");
    r.variant = r.method == Method::FC ? "FC-" + f[3] : f[1];
    r.classifier = f[4];
    for (const auto& a : split(f[5], ';')) r.fold_accuracy.push_back(parse_number<double>(a, "fold accuracy"));
    r.mean_accuracy = parse_number<double>(f[6], "mean");
    r.stddev = parse_number<double>(f[7], "sd");
    r.seed = parse_number<std::uint64_t>(f[8], "seed");
    return r;
}

void compute_averages(ResultsTable& table, const std::vector<std::string>& variant_order) {
    std::map<std::pair<std::string, Index>, std::vector<double>> groups;
    std::vector<std::pair<std::string, Index>> order;
    for (const auto& row : table.rows) {
        const auto key = std::make_pair(row.variant, row.k);
        if (!groups.contains(key)) order.push_back(key);
        groups[key].push_back(row.mean_accuracy);
    }
    const auto rank = [&](const std::string& v) {
        const auto it = std::find(variant_order.begin(), variant_order.end(), v);
        return static_cast<std::size_t>(it - variant_order.begin());
    };
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        return rank(a.first) != rank(b.first) ? rank(a.first) < rank(b.first) : a.second < b.second;
    });
    table.averaged.clear();
    for (const auto& key : order) {
        const auto& means = groups[key];
        double s = 0.0;
        for (const double m : means) s += m;
        table.averaged.push_back({key.first, key.second, s / static_cast<double>(means.size()), means.size()});
    }
}

std::map<std::string, double> stability_summary(const ResultsTable& table) {
    std::map<std::string, std::vector<double>> series;
    for (const auto& a : table.averaged) series[a.variant].push_back(a.accuracy);
    if (series.empty()) fail(ErrorCode::InsufficientPoints, "no averaged results");
    std::map<std::string, double> out;
    for (const auto& [variant, values] : series) {
        if (values.size() < 2) {
            fail(ErrorCode::InsufficientPoints, fmt::format("{} has {} dimension point(s)", variant, values.size()));
        }
        out[variant] = classify::mean_and_stddev(values).second;
    }
    return out;
}

void emit_plot_data(const ResultsTable& table, const fs::path& dir) {
    fs::create_directories(dir);
    std::map<std::string, std::string> files;
    std::vector<std::string> order;
    std::string combined = "variant,k,accuracy\n";
    for (const auto& a : table.averaged) {
        if (!files.contains(a.variant)) order.push_back(a.variant);
        files[a.variant] += fmt::format("{} {}\n", a.k, a.accuracy);
        combined += fmt::format("{},{},{}\n", a.variant, a.k, a.accuracy);
    }
    for (const auto& v : order) write_file_atomic(dir / (v + ".dat"), files[v]);
    write_file_atomic(dir / "series.csv", combined);
}

std::vector<std::pair<Index, double>> read_series(const fs::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::IoError, "cannot open " + file.string());
    std::vector<std::pair<Index, double>> out;
    std::string k;
    std::string v;
    while (in >> k >> v) out.emplace_back(parse_number<Index>(k, "k"), parse_number<double>(v, "accuracy"));
    return out;
}

ResultsTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Dataset data = load_dataset(cfg.dataset, cfg.tokenizer);
    return run_experiment(cfg, data);
}

ResultsTable run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
    cfg.validate(data.counts.rows(), data.counts.cols());
    fs::create_directories(cfg.out_dir);
    const fs::path results_path = cfg.out_dir / "results.csv";

    const auto variants = variant_specs(cfg);
    const auto classifiers = classifier_specs(cfg);
    std::vector<std::string> variant_order;
    for (const auto& v : variants) variant_order.push_back(v.variant());

    std::map<std::string, ResultRow> done;
    if (fs::exists(results_path)) {
        std::ifstream in(results_path);
        std::string line;
        std::getline(in, line);
        if (line != classify::csv_header()) fail(ErrorCode::ParseError, results_path.string() + " has an unexpected header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto row = ResultRow::parse(line);
            if (row.dataset == data.name && row.seed == cfg.seed) done[row.key()] = std::move(row);
        }
    }

    struct Group {
        DrSpec dr;
        std::vector<ClassifierSpec> todo;
    };
    std::vector<Group> groups;
    for (const auto& dr0 : variants) {
        for (const Index k : cfg.dims) {
            Group g{dr0, {}};
            g.dr.k = k;
            for (const auto& c : classifiers) {
                if (!done.contains(cell_key(g.dr.variant(), k, classify::to_string(c.kind)))) g.todo.push_back(c);
            }
            if (!g.todo.empty()) groups.push_back(std::move(g));
        }
    }

    const std::vector<int> assignment =
        classify::stratified_kfold(data.labels, cfg.folds, derive_seed(cfg.seed, "folds"));

    ResultsTable table;
    {
        std::ofstream append(results_path, std::ios::app);
        if (!append) fail(ErrorCode::IoError, "cannot write " + results_path.string());
        if (fs::file_size(results_path) == 0) append << classify::csv_header() << '\n';
    }

    const int saved_levels = omp_get_max_active_levels();
    omp_set_max_active_levels(1);
    const int workers = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        const std::string variant = g.dr.variant();
        try {
            classify::CvOptions opts;
            opts.folds = cfg.folds;
            opts.seed = derive_seed(cfg.seed, variant, static_cast<std::uint64_t>(g.dr.k));
            opts.fold_assignment = assignment;
            const auto t0 = Clock::now();
            const auto reports = classify::cross_validate_many(data.counts, data.labels, g.dr, g.todo, opts);
            const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            std::vector<ResultRow> rows;
            for (const auto& r : reports) {
                ResultRow row;
                row.dataset = data.name;
                row.method = r.method;
                row.variant = r.variant;
                row.k = r.k;
                row.q = r.q;
                row.classifier = r.classifier;
                row.fold_accuracy = r.fold_accuracy;
                row.mean_accuracy = r.mean_accuracy;
                row.stddev = r.stddev;
                row.seed = cfg.seed;
                rows.push_back(std::move(row));
            }
#pragma omp critical(fuzzydr_results)
            {
                std::ofstream append(results_path, std::ios::app);
                for (auto& row : rows) {
                    append << row.csv() << '\n';
                    table.wall_seconds[row.key()] = seconds / static_cast<double>(rows.size());
                    done[row.key()] = std::move(row);
                }
            }
        } catch (const std::exception& e) {
#pragma omp critical(fuzzydr_results)
            {
                for (const auto& c : g.todo) {
                    table.failures.emplace_back(cell_key(variant, g.dr.k, classify::to_string(c.kind)), e.what());
                }
            }
        }
    }
    omp_set_max_active_levels(saved_levels);

    for (const auto& v : variant_order) {
        for (const Index k : cfg.dims) {
            for (const auto& c : classifiers) {
                if (const auto it = done.find(cell_key(v, k, classify::to_string(c.kind))); it != done.end()) {
                    table.rows.push_back(it->second);
                }
            }
        }
    }
    compute_averages(table, variant_order);

    std::string csv = classify::csv_header() + "\n";
    for (const auto& r : table.rows) csv += r.csv() + "\n";
    write_file_atomic(results_path, csv);

    std::string avg = "dataset,variant,k,accuracy,classifiers\n";
    for (const auto& a : table.averaged) {
        avg += fmt::format("{},{},{},{},{}\n", data.name, a.variant, a.k, a.accuracy, a.classifiers);
    }
    write_file_atomic(cfg.out_dir / "averaged.csv", avg);
    emit_plot_data(table, cfg.out_dir / "plots");

    if (cfg.dims.size() >= 2 && !table.averaged.empty()) {
        try {
            std::string st = "variant,sd_across_dims\n";
            for (const auto& [v, sd] : stability_summary(table)) st += fmt::format("{},{}\n", v, sd);
            write_file_atomic(cfg.out_dir / "stability.csv", st);
        } catch (const Error&) {
            // some variant lost all but one point to failures; nothing to summarize
        }
    }

    {
        std::ofstream timing(cfg.out_dir / "timings.csv", std::ios::app);
        for (const auto& [key, s] : table.wall_seconds) fmt::print(timing, "{},{},{:.6f}\n", data.name, key, s);
    }
    std::string failures;
    for (const auto& [key, msg] : table.failures) failures += fmt::format("{},{}\n", key, msg);
    if (!failures.empty()) write_file_atomic(cfg.out_dir / "failures.csv", failures);
    return table;
}

// ---------------------------------------------------------------- scaling

std::tuple<double, double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InsufficientPoints, "line fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double intercept = my - slope * mx;
    const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return {slope, intercept, r2};
}

ScalingReport scaling_benchmark(const std::vector<Index>& n_list, Index k, Index m, Index nnz_per_row,
                                std::uint64_t seed, int iterations, int repeats) {
    if (n_list.empty() || iterations < 1 || repeats < 1) {
        fail(ErrorCode::InvalidParams, "scaling benchmark needs sizes, iterations and repeats");
    }
    ScalingReport report;
    for (const Index n : n_list) {
        const SparseDocMatrix x = l2_normalize_rows(
            synthetic::random_count_matrix(n, m, nnz_per_row, derive_seed(seed, static_cast<std::uint64_t>(n))));
        fuzzy::FuzzyParams p;
        p.k = k;
        p.q = 1.5;
        p.max_iterations = iterations;
        p.epsilon = 1e-300;
        p.seed = seed;

        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < repeats; ++r) {
            const auto t0 = Clock::now();
            (void)fuzzy::initial_prototypes(x, k, seed);
            const auto t1 = Clock::now();
            const auto fit = fuzzy::fit(x, p);
            const auto t2 = Clock::now();
            const double init_s = std::chrono::duration<double>(t1 - t0).count();
            const double fit_s = std::chrono::duration<double>(t2 - t1).count();
            best = std::min(best, std::max(0.0, fit_s - init_s) / fit.model.iterations_run);
        }
        report.points.push_back({n, best});
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& pt : report.points) {
        xs.push_back(static_cast<double>(pt.n));
        ys.push_back(pt.seconds_per_iteration);
    }
    for (std::size_t i = 1; i < ys.size(); ++i) report.ratios.push_back(ys[i] / ys[i - 1]);
    if (xs.size() >= 2) std::tie(report.slope, report.intercept, report.r_squared) = fit_line(xs, ys);
    return report;
}

}  // namespace fdr::harness
