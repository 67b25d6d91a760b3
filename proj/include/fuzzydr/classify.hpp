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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fuzzydr/kernels.hpp"
#include "fuzzydr/linear.hpp"
#include "fuzzydr/reduced.hpp"
#include "fuzzydr/sparse.hpp"

/// Binary classifiers on reduced features and the cross-validation protocol.
/// Labels are 0 (negative) / 1 (positive) throughout.
namespace fdr::classify {

using Labels = std::vector<int>;

/// Rows are the actual class, columns the predicted one.
struct ConfusionMatrix {
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tp = 0;

    std::size_t total() const { return tn + fp + fn + tp; }
    std::size_t correct() const { return tp + tn; }
    void add(int actual, int predicted);
    bool operator==(const ConfusionMatrix&) const = default;
};

/// (TP + TN) / total. Throws EmptyMatrix on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

class Model {
public:
    virtual ~Model() = default;
    virtual int predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const = 0;
    virtual Index n_features() const = 0;
    /// Hash of the fitted parameters; equal fingerprints mean equal models.
    virtual std::uint64_t fingerprint() const = 0;

    std::vector<int> predict(const Eigen::MatrixXd& x) const;
};

// ---------------------------------------------------------------- forest

struct ForestParams {
    int n_trees = 100;
    /// 0 means unlimited.
    int max_depth = 0;
    /// 0 means floor(sqrt(features)), at least 1.
    int features_per_split = 0;
    bool bootstrap = true;
    std::uint64_t seed = 1;
};

class RandomForest final : public Model {
public:
    struct Node {
        Index feature = -1;  ///< -1 marks a leaf
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int label = 0;
    };
    using Tree = std::vector<Node>;

    RandomForest(std::vector<Tree> trees, Index n_features) : trees_(std::move(trees)), n_features_(n_features) {}

    /// Majority vote; ties go to the negative class.
    int predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override;
    Index n_features() const override { return n_features_; }
    std::uint64_t fingerprint() const override;
    const std::vector<Tree>& trees() const { return trees_; }

private:
    std::vector<Tree> trees_;
    Index n_features_;
};

/// Bootstrap CART trees with Gini splits over random feature subsets. If none
/// of the sampled features can split a node, the remaining ones are tried.
std::unique_ptr<RandomForest> train_random_forest(const Eigen::MatrixXd& x, const Labels& y, const ForestParams& params);

// ---------------------------------------------------------------- boosting

/// h(x) = polarity if x[feature] > threshold else -polarity. A threshold of
/// -inf gives the constant classifier.
struct Stump {
    Index feature = 0;
    double threshold = 0.0;
    int polarity = 1;
    double error = 0.0;  ///< weighted error on the weights it was chosen with

    int vote(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        return x(feature) > threshold ? polarity : -polarity;
    }
};

/**
 * Minimum weighted-error stump. Candidates per feature are -inf and the
 * midpoints between consecutive distinct values. Ties go to the lower
 * feature, then the lower threshold, then polarity +1.
 */
Stump best_stump(const Eigen::MatrixXd& x, const Labels& y, std::span<const double> weights);

struct BoostParams {
    int n_rounds = 50;
    std::uint64_t seed = 1;
    /// Keep the weight vector each round was fitted on (for inspection).
    bool keep_round_weights = false;
};

class AdaBoost final : public Model {
public:
    struct Round {
        Stump stump;
        double alpha = 0.0;
        std::vector<double> weights;  ///< only filled with keep_round_weights
    };

    AdaBoost(std::vector<Round> rounds, Index n_features, int fallback)
        : rounds_(std::move(rounds)), n_features_(n_features), fallback_(fallback) {}

    /// sign(sum alpha h(x)); zero goes to the negative class, no rounds to the majority.
    int predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override;
    Index n_features() const override { return n_features_; }
    std::uint64_t fingerprint() const override;
    const std::vector<Round>& rounds() const { return rounds_; }

private:
    std::vector<Round> rounds_;
    Index n_features_;
    int fallback_;
};

/// Discrete AdaBoost over stumps, alpha = 0.5 ln((1 - e) / e). Stops early when
/// e >= 0.5; a perfect stump (e = 0) is kept with capped weight and ends training.
std::unique_ptr<AdaBoost> train_adaboost(const Eigen::MatrixXd& x, const Labels& y, const BoostParams& params);

/// Multiplies w_i by exp(-alpha y_i h(x_i)) and renormalizes.
void reweight(const Eigen::MatrixXd& x, const Labels& y, const Stump& stump, double alpha, std::vector<double>& w);

// ---------------------------------------------------------------- logistic

struct LinearParams {
    double l2_penalty = 1e-3;
    int max_iterations = 5000;
    /// Converged when the largest gradient component is below this.
    double tolerance = 1e-6;
    /// Throw NonConvergence instead of returning an unconverged model.
    bool require_convergence = false;
    /// Scale features to unit variance on the training rows first.
    bool standardize = true;
};

class Logistic final : public Model {
public:
    Logistic(Eigen::VectorXd weights, double bias, Eigen::VectorXd mean, Eigen::VectorXd inv_scale, int tie_label)
        : weights_(std::move(weights)),
          bias_(bias),
          mean_(std::move(mean)),
          inv_scale_(std::move(inv_scale)),
          tie_label_(tie_label) {}

    double decision(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    int predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override;
    Index n_features() const override { return weights_.size(); }
    std::uint64_t fingerprint() const override;

    const Eigen::VectorXd& weights() const { return weights_; }
    double bias() const { return bias_; }

    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;

private:
    Eigen::VectorXd weights_;
    double bias_;
    Eigen::VectorXd mean_;
    Eigen::VectorXd inv_scale_;
    int tie_label_;
};

/// Mean log-loss plus (l2 / 2) |w|^2 on features `z`; theta = (w, b). Fills
/// `grad` (same length as theta) when given.
double logistic_loss(const Eigen::MatrixXd& z, const Labels& y, const Eigen::VectorXd& theta, double l2,
                     Eigen::VectorXd* grad);

/// Standardizes features on the training rows, then gradient descent with
/// Barzilai-Borwein steps under an Armijo safeguard, starting from zero.
std::unique_ptr<Logistic> train_linear(const Eigen::MatrixXd& x, const Labels& y, const LinearParams& params);

// ---------------------------------------------------------------- protocol

ConfusionMatrix evaluate(const Model& model, const Eigen::MatrixXd& x, const Labels& y);

/// Fold id per instance with per-class counts balanced to within one. Each
/// class needs at least `folds` members, except for leave-one-out (folds == n).
std::vector<int> stratified_kfold(const Labels& labels, int folds, std::uint64_t seed);

enum class ClassifierKind { RandomForest, AdaBoost, Logistic };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view s);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::RandomForest;
    ForestParams forest;
    BoostParams boost;
    LinearParams linear;
};

/// Trains the configured classifier; `seed` replaces the seed in its params.
std::unique_ptr<Model> train(const ClassifierSpec& spec, const Eigen::MatrixXd& x, const Labels& y,
                             std::uint64_t seed);

enum class LinearInput { Counts, L2 };

struct DrSpec {
    Method method = Method::FC;
    Index k = 10;
    double q = 1.5;
    int max_iterations = 100;
    double epsilon = 1e-5;
    int n_restarts = 1;
    LinearInput linear_input = LinearInput::Counts;
    linear::SvdOptions svd;

    /// "FC-1.5", "PCA", "SVD".
    std::string variant() const;
};

/// A dimension reducer fitted on training rows that maps any rows of the
/// same vocabulary to features.
class FittedReducer {
public:
    virtual ~FittedReducer() = default;
    virtual ReducedMatrix transform(const SparseDocMatrix& raw) const = 0;
    virtual std::uint64_t fingerprint() const = 0;
};

struct FittedReduction {
    std::unique_ptr<FittedReducer> reducer;
    ReducedMatrix train_features;
};

/// Fits the reducer on raw count rows (normalization is applied inside as the method requires).
FittedReduction fit_reducer(const DrSpec& spec, const SparseDocMatrix& raw_train, std::uint64_t seed,
                            kernels::Exec exec = kernels::Exec::Parallel);

struct CvReport {
    std::string classifier;
    Method method = Method::FC;
    std::string variant;
    Index k = 0;
    std::optional<double> q;
    std::vector<ConfusionMatrix> folds;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    double stddev = 0.0;  ///< population
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> dr_fingerprints;
    std::vector<std::uint64_t> model_fingerprints;

    bool operator==(const CvReport&) const = default;
};

struct CvOptions {
    int folds = 5;
    std::uint64_t seed = 0;
    /// Overrides the seeded stratified assignment.
    std::optional<std::vector<int>> fold_assignment;
    kernels::Exec exec = kernels::Exec::Parallel;
};

/// Per fold: the reducer is fitted on the training rows only, test rows go
/// through the frozen reducer, and each classifier is trained and scored.
/// The reduction is shared by all classifiers of a fold.
std::vector<CvReport> cross_validate_many(const SparseDocMatrix& raw, const Labels& y, const DrSpec& dr,
                                          std::span<const ClassifierSpec> classifiers, const CvOptions& opts);

CvReport cross_validate(const SparseDocMatrix& raw, const Labels& y, const DrSpec& dr, const ClassifierSpec& clf,
                        const CvOptions& opts);

/// Population mean and standard deviation.
std::pair<double, double> mean_and_stddev(std::span<const double> v);

std::string csv_header();
/// dataset,method,k,fuzzifier,classifier,fold_accuracies,mean,sd,seed
std::string to_csv_row(const std::string& dataset, const CvReport& report);

/// FNV-1a over raw bytes; used for model fingerprints.
std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace fdr::classify
