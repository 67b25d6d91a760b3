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

#include "fuzzydr/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "fuzzydr/error.hpp"
#include "fuzzydr/fuzzy.hpp"
#include "fuzzydr/rng.hpp"

namespace fdr::classify {

namespace {

void check_training_set(const Eigen::MatrixXd& x, const Labels& y) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        fail(ErrorCode::DimensionMismatch, "feature rows differ from label count");
    }
    const auto pos = std::count(y.begin(), y.end(), 1);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y.size())) {
        fail(ErrorCode::SingleClass, "training labels contain a single class");
    }
    for (const int l : y) {
        if (l != 0 && l != 1) fail(ErrorCode::InvalidParams, "labels must be 0 or 1");
    }
}

int majority_label(const Labels& y) {
    const auto pos = std::count(y.begin(), y.end(), 1);
    return 2 * pos > static_cast<std::ptrdiff_t>(y.size()) ? 1 : 0;
}

std::uint64_t hash_matrix(const Eigen::MatrixXd& m, std::uint64_t h) {
    return hash_bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double), h);
}

template <typename T>
std::uint64_t hash_value(const T& v, std::uint64_t h) {
    return hash_bytes(&v, sizeof(T), h);
}

// ---- CART

struct TreeBuilder {
    const Eigen::MatrixXd& x;
    const Labels& y;
    const ForestParams& params;
    Index mtry;
    Rng rng;

    struct Split {
        Index feature = -1;
        double threshold = 0.0;
        double impurity = std::numeric_limits<double>::infinity();
    };

    static double gini_mass(double pos, double count) {
        if (count == 0.0) return 0.0;
        const double p = pos / count;
        return count * (1.0 - p * p - (1.0 - p) * (1.0 - p));
    }

    bool better(const Split& cand, const Split& best) const {
        if (cand.impurity != best.impurity) return cand.impurity < best.impurity;
        if (cand.feature != best.feature) return cand.feature < best.feature;
        return cand.threshold < best.threshold;
    }

    std::optional<Split> best_on_feature(std::vector<Index>& idx, Index f) const {
        std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
            return x(a, f) != x(b, f) ? x(a, f) < x(b, f) : a < b;
        });
        const double n = static_cast<double>(idx.size());
        double total_pos = 0.0;
        for (const Index i : idx) total_pos += y[i];
        std::optional<Split> best;
        double left_pos = 0.0;
        for (std::size_t s = 0; s + 1 < idx.size(); ++s) {
            left_pos += y[idx[s]];
            const double lo = x(idx[s], f);
            const double hi = x(idx[s + 1], f);
            if (!(lo < hi)) continue;
            const double nl = static_cast<double>(s + 1);
            const double imp = gini_mass(left_pos, nl) + gini_mass(total_pos - left_pos, n - nl);
            double t = lo + (hi - lo) / 2.0;
            if (!(t < hi)) t = lo;
            Split cand{f, t, imp};
            if (!best || better(cand, *best)) best = cand;
        }
        return best;
    }

    RandomForest::Tree build(std::vector<Index> sample) {
        RandomForest::Tree tree;
        struct Work {
            std::vector<Index> idx;
            int depth;
            std::int32_t node;
        };
        std::vector<Work> stack;
        tree.push_back({});
        stack.push_back({std::move(sample), 0, 0});
        std::vector<Index> features(static_cast<std::size_t>(x.cols()));
        std::iota(features.begin(), features.end(), Index{0});

        while (!stack.empty()) {
            Work w = std::move(stack.back());
            stack.pop_back();
            std::size_t pos = 0;
            for (const Index i : w.idx) pos += static_cast<std::size_t>(y[i]);
            const std::size_t count = w.idx.size();
            tree[w.node].label = 2 * pos > count ? 1 : 0;
            if (pos == 0 || pos == count || count < 2 || (params.max_depth > 0 && w.depth >= params.max_depth)) {
                continue;
            }

            rng.shuffle(features);
            std::optional<Split> best;
            Index tried = 0;
            for (const Index f : features) {
                if (tried >= mtry && best) break;
                ++tried;
                if (auto cand = best_on_feature(w.idx, f); cand && (!best || better(*cand, *best))) best = cand;
            }
            if (!best) continue;

            std::vector<Index> left;
            std::vector<Index> right;
            for (const Index i : w.idx) (x(i, best->feature) <= best->threshold ? left : right).push_back(i);
            const auto l = static_cast<std::int32_t>(tree.size());
            tree.push_back({});
            tree.push_back({});
            tree[w.node].feature = best->feature;
            tree[w.node].threshold = best->threshold;
            tree[w.node].left = l;
            tree[w.node].right = l + 1;
            stack.push_back({std::move(right), w.depth + 1, l + 1});
            stack.push_back({std::move(left), w.depth + 1, l});
        }
        return tree;
    }
};

int predict_tree(const RandomForest::Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    std::int32_t n = 0;
    while (tree[n].feature >= 0) n = x(tree[n].feature) <= tree[n].threshold ? tree[n].left : tree[n].right;
    return tree[n].label;
}

// ---- reducers

class FuzzyReducer final : public FittedReducer {
public:
    explicit FuzzyReducer(fuzzy::FuzzyModel model, kernels::Exec exec) : model_(std::move(model)), exec_(exec) {}
    ReducedMatrix transform(const SparseDocMatrix& raw) const override {
        return fuzzy::reduce(l2_normalize_rows(raw), model_, exec_);
    }
    std::uint64_t fingerprint() const override {
        const auto& p = model_.prototypes.term_major();
        return hash_bytes(p.data(), static_cast<std::size_t>(p.size()) * sizeof(double));
    }

private:
    fuzzy::FuzzyModel model_;
    kernels::Exec exec_;
};

class SvdReducer final : public FittedReducer {
public:
    SvdReducer(linear::SvdModel model, bool l2, kernels::Exec exec) : model_(std::move(model)), l2_(l2), exec_(exec) {}
    ReducedMatrix transform(const SparseDocMatrix& raw) const override {
        return model_.transform(l2_ ? l2_normalize_rows(raw) : raw, exec_);
    }
    std::uint64_t fingerprint() const override {
        const auto& v = model_.v();
        return hash_bytes(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
    }

private:
    linear::SvdModel model_;
    bool l2_;
    kernels::Exec exec_;
};

class PcaReducer final : public FittedReducer {
public:
    PcaReducer(linear::PcaModel model, bool l2, kernels::Exec exec) : model_(std::move(model)), l2_(l2), exec_(exec) {}
    ReducedMatrix transform(const SparseDocMatrix& raw) const override {
        return model_.transform(l2_ ? l2_normalize_rows(raw) : raw, exec_);
    }
    std::uint64_t fingerprint() const override {
        const auto& v = model_.loadings();
        auto h = hash_bytes(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
        return hash_matrix(model_.mean(), h);
    }

private:
    linear::PcaModel model_;
    bool l2_;
    kernels::Exec exec_;
};

}  // namespace

std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void ConfusionMatrix::add(int actual, int predicted) {
    if (actual == 1) {
        ++(predicted == 1 ? tp : fn);
    } else {
        ++(predicted == 1 ? fp : tn);
    }
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) fail(ErrorCode::EmptyMatrix, "confusion matrix is empty");
    return static_cast<double>(cm.correct()) / static_cast<double>(cm.total());
}

std::vector<int> Model::predict(const Eigen::MatrixXd& x) const {
    if (x.cols() != n_features()) {
        fail(ErrorCode::DimensionMismatch, fmt::format("{} features given, model uses {}", x.cols(), n_features()));
    }
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
    return out;
}

// ---------------------------------------------------------------- forest

int RandomForest::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    std::size_t pos = 0;
    for (const auto& t : trees_) pos += static_cast<std::size_t>(predict_tree(t, x));
    return 2 * pos > trees_.size() ? 1 : 0;
}

std::uint64_t RandomForest::fingerprint() const {
    std::uint64_t h = hash_value(n_features_, 0xcbf29ce484222325ULL);
    for (const auto& t : trees_) {
        for (const auto& n : t) {
            h = hash_value(n.feature, h);
            h = hash_value(n.threshold, h);
            h = hash_value(n.label, h);
        }
    }
    return h;
}

std::unique_ptr<RandomForest> train_random_forest(const Eigen::MatrixXd& x, const Labels& y, const ForestParams& params) {
    check_training_set(x, y);
    if (params.n_trees < 1 || params.max_depth < 0 || params.features_per_split < 0 || x.cols() < 1) {
        fail(ErrorCode::InvalidParams, "invalid forest parameters");
    }
    const Index mtry = params.features_per_split > 0
                           ? std::min<Index>(params.features_per_split, x.cols())
                           : std::max<Index>(1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<RandomForest::Tree> trees(static_cast<std::size_t>(params.n_trees));

#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < params.n_trees; ++t) {
        TreeBuilder builder{x, y, params, mtry, Rng(derive_seed(params.seed, "tree", static_cast<std::uint64_t>(t)))};
        std::vector<Index> sample(n);
        if (params.bootstrap) {
            for (auto& s : sample) s = static_cast<Index>(builder.rng.below(n));
        } else {
            std::iota(sample.begin(), sample.end(), Index{0});
        }
        trees[static_cast<std::size_t>(t)] = builder.build(std::move(sample));
    }
    return std::make_unique<RandomForest>(std::move(trees), x.cols());
}

// ---------------------------------------------------------------- boosting

Stump best_stump(const Eigen::MatrixXd& x, const Labels& y, std::span<const double> weights) {
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.size() != weights.size() || x.cols() < 1) {
        fail(ErrorCode::DimensionMismatch, "stump inputs disagree in size");
    }
    double w_pos = 0.0;
    double w_neg = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? w_pos : w_neg) += weights[i];

    Stump best;
    best.error = std::numeric_limits<double>::infinity();
    const auto consider = [&](Index f, double t, int polarity, double err) {
        if (err < best.error) best = {f, t, polarity, err};
    };
    std::vector<Index> order(static_cast<std::size_t>(x.rows()));
    for (Index f = 0; f < x.cols(); ++f) {
        std::iota(order.begin(), order.end(), Index{0});
        std::sort(order.begin(), order.end(), [&](Index a, Index b) {
            return x(a, f) != x(b, f) ? x(a, f) < x(b, f) : a < b;
        });
        const double ninf = -std::numeric_limits<double>::infinity();
        consider(f, ninf, 1, w_neg);
        consider(f, ninf, -1, w_pos);
        double left_pos = 0.0;
        double left_neg = 0.0;
        for (std::size_t s = 0; s + 1 < order.size(); ++s) {
            const Index i = order[s];
            (y[i] == 1 ? left_pos : left_neg) += weights[i];
            const double lo = x(i, f);
            const double hi = x(order[s + 1], f);
            if (!(lo < hi)) continue;
            double t = lo + (hi - lo) / 2.0;
            if (!(t < hi)) t = lo;
            consider(f, t, 1, left_pos + (w_neg - left_neg));
            consider(f, t, -1, left_neg + (w_pos - left_pos));
        }
    }
    return best;
}

void reweight(const Eigen::MatrixXd& x, const Labels& y, const Stump& stump, double alpha, std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const int yi = y[i] == 1 ? 1 : -1;
        w[i] *= std::exp(-alpha * yi * stump.vote(x.row(static_cast<Index>(i))));
        total += w[i];
    }
    for (auto& v : w) v /= total;
}

int AdaBoost::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    if (rounds_.empty()) return fallback_;
    double score = 0.0;
    for (const auto& r : rounds_) score += r.alpha * r.stump.vote(x);
    return score > 0.0 ? 1 : 0;
}

std::uint64_t AdaBoost::fingerprint() const {
    std::uint64_t h = hash_value(n_features_, 0xcbf29ce484222325ULL);
    for (const auto& r : rounds_) {
        h = hash_value(r.stump.feature, h);
        h = hash_value(r.stump.threshold, h);
        h = hash_value(r.stump.polarity, h);
        h = hash_value(r.alpha, h);
    }
    return h;
}

std::unique_ptr<AdaBoost> train_adaboost(const Eigen::MatrixXd& x, const Labels& y, const BoostParams& params) {
    check_training_set(x, y);
    if (params.n_rounds < 1) fail(ErrorCode::InvalidParams, "boosting needs at least one round");
    std::vector<double> w(y.size(), 1.0 / static_cast<double>(y.size()));
    std::vector<AdaBoost::Round> rounds;
    constexpr double kMinError = 1e-10;
    for (int r = 0; r < params.n_rounds; ++r) {
        const Stump s = best_stump(x, y, w);
        const double err = s.error;
        if (err >= 0.5) break;
        AdaBoost::Round round;
        round.stump = s;
        if (params.keep_round_weights) round.weights = w;
        if (err <= kMinError) {
            round.alpha = 0.5 * std::log((1.0 - kMinError) / kMinError);
            rounds.push_back(std::move(round));
            break;
        }
        round.alpha = 0.5 * std::log((1.0 - err) / err);
        reweight(x, y, s, round.alpha, w);
        rounds.push_back(std::move(round));
    }
    return std::make_unique<AdaBoost>(std::move(rounds), x.cols(), majority_label(y));
}

// ---------------------------------------------------------------- logistic

double logistic_loss(const Eigen::MatrixXd& z, const Labels& y, const Eigen::VectorXd& theta, double l2,
                     Eigen::VectorXd* grad) {
    const Index d = z.cols();
    const auto w = theta.head(d);
    const double b = theta(d);
    const double n = static_cast<double>(z.rows());
    const Eigen::VectorXd s = (z * w).array() + b;
    double loss = 0.0;
    Eigen::VectorXd coef(z.rows());
    for (Index i = 0; i < z.rows(); ++i) {
        const double yi = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        const double m = -yi * s(i);
        // log(1 + e^m) and sigmoid(m) without overflow
        loss += m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
        const double sig = m > 0.0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
        coef(i) = -yi * sig / n;
    }
    loss = loss / n + 0.5 * l2 * w.squaredNorm();
    if (grad) {
        grad->resize(d + 1);
        grad->head(d) = z.transpose() * coef + l2 * w;
        (*grad)(d) = coef.sum();
    }
    return loss;
}

double Logistic::decision(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    double s = bias_;
    for (Index c = 0; c < weights_.size(); ++c) s += weights_(c) * (x(c) - mean_(c)) * inv_scale_(c);
    return s;
}

int Logistic::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    const double s = decision(x);
    if (s == 0.0) return tie_label_;
    return s > 0.0 ? 1 : 0;
}

std::uint64_t Logistic::fingerprint() const {
    std::uint64_t h = hash_matrix(weights_, 0xcbf29ce484222325ULL);
    h = hash_value(bias_, h);
    h = hash_matrix(mean_, h);
    return hash_matrix(inv_scale_, h);
}

std::unique_ptr<Logistic> train_linear(const Eigen::MatrixXd& x, const Labels& y, const LinearParams& params) {
    check_training_set(x, y);
    if (params.l2_penalty < 0.0 || params.max_iterations < 0 || !(params.tolerance > 0.0)) {
        fail(ErrorCode::InvalidParams, "invalid logistic parameters");
    }
    const Index d = x.cols();
    const double n = static_cast<double>(x.rows());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd inv_scale = Eigen::VectorXd::Ones(d);
    if (params.standardize) {
        mean = x.colwise().mean().transpose();
        for (Index c = 0; c < d; ++c) {
            const double var = (x.col(c).array() - mean(c)).square().sum() / n;
            inv_scale(c) = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
        }
    }
    const Eigen::MatrixXd z = (x.rowwise() - mean.transpose()) * inv_scale.asDiagonal();

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd grad;
    double loss = logistic_loss(z, y, theta, params.l2_penalty, &grad);
    double step = 1.0;
    int it = 0;
    bool converged = grad.lpNorm<Eigen::Infinity>() <= params.tolerance;
    Eigen::VectorXd next_grad;
    for (; it < params.max_iterations && !converged; ++it) {
        double t = step;
        Eigen::VectorXd next;
        double next_loss = 0.0;
        const double g2 = grad.squaredNorm();
        for (int bt = 0; bt < 60; ++bt) {
            next = theta - t * grad;
            next_loss = logistic_loss(z, y, next, params.l2_penalty, &next_grad);
            // slack at rounding level so the search still moves once losses stop differing
            if (next_loss <= loss - 1e-4 * t * g2 + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(loss)) break;
            t *= 0.5;
        }
        const Eigen::VectorXd s = next - theta;
        const Eigen::VectorXd dg = next_grad - grad;
        theta = std::move(next);
        grad = next_grad;
        loss = next_loss;
        const double sy = s.dot(dg);
        step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10) : std::min(1e10, 2.0 * t);
        converged = grad.lpNorm<Eigen::Infinity>() <= params.tolerance;
    }
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (!converged && params.require_convergence) {
        fail(ErrorCode::NonConvergence, fmt::format("logistic fit stopped after {} iterations, |grad|_inf = {:.3e}", it, gnorm));
    }
    auto model = std::make_unique<Logistic>(theta.head(d), theta(d), std::move(mean), std::move(inv_scale),
                                            majority_label(y));
    model->converged = converged;
    model->iterations = it;
    model->gradient_norm = gnorm;
    return model;
}

// ---------------------------------------------------------------- protocol

ConfusionMatrix evaluate(const Model& model, const Eigen::MatrixXd& x, const Labels& y) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) fail(ErrorCode::DimensionMismatch, "rows differ from labels");
    const auto pred = model.predict(x);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y.size(); ++i) cm.add(y[i], pred[i]);
    return cm;
}

std::vector<int> stratified_kfold(const Labels& labels, int folds, std::uint64_t seed) {
    const auto n = labels.size();
    if (folds < 2) fail(ErrorCode::InvalidParams, "need at least 2 folds");
    if (static_cast<std::size_t>(folds) > n) {
        fail(ErrorCode::TooFewPerClass, fmt::format("{} folds for {} instances", folds, n));
    }
    std::vector<Index> by_class[2];
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(static_cast<Index>(i));
    const bool leave_one_out = static_cast<std::size_t>(folds) == n;
    for (const auto& members : by_class) {
        if (!leave_one_out && members.size() < static_cast<std::size_t>(folds)) {
            fail(ErrorCode::TooFewPerClass, fmt::format("a class has {} members for {} folds", members.size(), folds));
        }
    }
    Rng rng(seed);
    std::vector<int> out(n, 0);
    std::size_t cursor = 0;
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (const Index i : members) out[static_cast<std::size_t>(i)] = static_cast<int>(cursor++ % folds);
    }
    return out;
}

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::RandomForest: return "RandomForest";
        case ClassifierKind::AdaBoost: return "AdaBoost";
        case ClassifierKind::Logistic: return "Logistic";
    }
    return "?";
}

ClassifierKind parse_classifier(std::string_view s) {
    if (s == "RandomForest" || s == "forest" || s == "rf") return ClassifierKind::RandomForest;
    if (s == "AdaBoost" || s == "adaboost" || s == "boost") return ClassifierKind::AdaBoost;
    if (s == "Logistic" || s == "logistic" || s == "linear") return ClassifierKind::Logistic;
    fail(ErrorCode::InvalidParams, "unknown classifier '" + std::string(s) + "'");
}

std::unique_ptr<Model> train(const ClassifierSpec& spec, const Eigen::MatrixXd& x, const Labels& y,
                             std::uint64_t seed) {
    switch (spec.kind) {
        case ClassifierKind::RandomForest: {
            ForestParams p = spec.forest;
            p.seed = seed;
            return train_random_forest(x, y, p);
        }
        case ClassifierKind::AdaBoost: {
            BoostParams p = spec.boost;
            p.seed = seed;
            return train_adaboost(x, y, p);
        }
        case ClassifierKind::Logistic:
            return train_linear(x, y, spec.linear);
    }
    fail(ErrorCode::InvalidParams, "unknown classifier kind");
}

std::string DrSpec::variant() const {
    if (method == Method::FC) return fmt::format("FC-{}", q);
    return std::string(to_string(method));
}

FittedReduction fit_reducer(const DrSpec& spec, const SparseDocMatrix& raw_train, std::uint64_t seed,
                            kernels::Exec exec) {
    FittedReduction out;
    switch (spec.method) {
        case Method::FC: {
            fuzzy::FuzzyParams p;
            p.k = spec.k;
            p.q = spec.q;
            p.max_iterations = spec.max_iterations;
            p.epsilon = spec.epsilon;
            p.n_restarts = spec.n_restarts;
            p.seed = seed;
            auto result = fuzzy::fit(l2_normalize_rows(raw_train), p, exec);
            out.train_features = {Method::FC, Eigen::MatrixXd(result.memberships.values())};
            out.reducer = std::make_unique<FuzzyReducer>(std::move(result.model), exec);
            break;
        }
        case Method::SVD: {
            const bool l2 = spec.linear_input == LinearInput::L2;
            auto r = linear::svd_reduce(l2 ? l2_normalize_rows(raw_train) : raw_train, spec.k, seed, spec.svd, exec);
            out.train_features = std::move(r.features);
            out.reducer = std::make_unique<SvdReducer>(std::move(r.model), l2, exec);
            break;
        }
        case Method::PCA: {
            const bool l2 = spec.linear_input == LinearInput::L2;
            auto r = linear::pca_reduce(l2 ? l2_normalize_rows(raw_train) : raw_train, spec.k, seed, spec.svd, exec);
            out.train_features = std::move(r.features);
            out.reducer = std::make_unique<PcaReducer>(std::move(r.model), l2, exec);
            break;
        }
    }
    return out;
}

std::pair<double, double> mean_and_stddev(std::span<const double> v) {
    if (v.empty()) return {0.0, 0.0};
    // a constant series has sd 0 exactly, whatever the rounding of its mean
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return {v.front(), 0.0};
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

std::vector<CvReport> cross_validate_many(const SparseDocMatrix& raw, const Labels& y, const DrSpec& dr,
                                          std::span<const ClassifierSpec> classifiers, const CvOptions& opts) {
    if (static_cast<std::size_t>(raw.rows()) != y.size()) fail(ErrorCode::DimensionMismatch, "matrix rows differ from labels");
    const std::vector<int> assignment =
        opts.fold_assignment ? *opts.fold_assignment : stratified_kfold(y, opts.folds, derive_seed(opts.seed, "folds"));
    if (assignment.size() != y.size()) fail(ErrorCode::DimensionMismatch, "fold assignment length differs from labels");
    const int folds = opts.fold_assignment ? *std::max_element(assignment.begin(), assignment.end()) + 1 : opts.folds;

    std::vector<CvReport> reports(classifiers.size());
    for (std::size_t c = 0; c < classifiers.size(); ++c) {
        auto& r = reports[c];
        r.classifier = std::string(to_string(classifiers[c].kind));
        r.method = dr.method;
        r.variant = dr.variant();
        r.k = dr.k;
        if (dr.method == Method::FC) r.q = dr.q;
        r.seed = opts.seed;
    }

    for (int fold = 0; fold < folds; ++fold) {
        std::vector<Index> train_rows;
        std::vector<Index> test_rows;
        Labels y_train;
        Labels y_test;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (assignment[i] == fold) {
                test_rows.push_back(static_cast<Index>(i));
                y_test.push_back(y[i]);
            } else {
                train_rows.push_back(static_cast<Index>(i));
                y_train.push_back(y[i]);
            }
        }
        if (test_rows.empty()) fail(ErrorCode::InvalidParams, fmt::format("fold {} is empty", fold));
        const auto fitted =
            fit_reducer(dr, raw.select_rows(train_rows), derive_seed(opts.seed, "dr", static_cast<std::uint64_t>(fold)), opts.exec);
        const ReducedMatrix test_features = fitted.reducer->transform(raw.select_rows(test_rows));
        const std::uint64_t dr_fp = fitted.reducer->fingerprint();

        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            const auto model = train(classifiers[c], fitted.train_features.values, y_train,
                                     derive_seed(opts.seed, to_string(classifiers[c].kind), static_cast<std::uint64_t>(fold)));
            const auto cm = evaluate(*model, test_features.values, y_test);
            auto& r = reports[c];
            r.folds.push_back(cm);
            r.fold_accuracy.push_back(accuracy(cm));
            r.dr_fingerprints.push_back(dr_fp);
            r.model_fingerprints.push_back(model->fingerprint());
        }
    }
    for (auto& r : reports) std::tie(r.mean_accuracy, r.stddev) = mean_and_stddev(r.fold_accuracy);
    return reports;
}

CvReport cross_validate(const SparseDocMatrix& raw, const Labels& y, const DrSpec& dr, const ClassifierSpec& clf,
                        const CvOptions& opts) {
    return cross_validate_many(raw, y, dr, std::span<const ClassifierSpec>(&clf, 1), opts).front();
}

std::string csv_header() { return "dataset,method,k,fuzzifier,classifier,fold_accuracies,mean,sd,seed"; }

std::string to_csv_row(const std::string& dataset, const CvReport& r) {
    std::string folds;
    for (std::size_t i = 0; i < r.fold_accuracy.size(); ++i) {
        if (i > 0) folds.push_back(';');
        folds += fmt::format("{}", r.fold_accuracy[i]);
    }
    return fmt::format("{},{},{},{},{},{},{},{},{}", dataset, to_string(r.method), r.k,
                       r.q ? fmt::format("{}", *r.q) : std::string("NA"), r.classifier, folds, r.mean_accuracy,
                       r.stddev, r.seed);
}

}  // namespace fdr::classify
