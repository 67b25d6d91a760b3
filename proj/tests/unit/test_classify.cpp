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

#include <doctest.h>

#include "fuzzydr/classify.hpp"
#include "fuzzydr/corpus.hpp"
#include "fuzzydr/synthetic.hpp"
#include "oracles.hpp"

using namespace fdr;
using namespace fdr::classify;
using oracle::throws_code;

namespace {

class FixedModel final : public Model {
public:
    explicit FixedModel(bool invert) : invert_(invert) {}
    int predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
        const int truth = x(0) > 0.5 ? 1 : 0;
        return invert_ ? 1 - truth : truth;
    }
    Index n_features() const override { return 1; }
    std::uint64_t fingerprint() const override { return invert_; }

private:
    bool invert_;
};

SparseDocMatrix counts_of(const corpus::LabeledCorpus& c) {
    corpus::TokenizerConfig cfg;
    cfg.min_document_frequency = 1;
    return corpus::vectorize(c, corpus::build_vocabulary(c, cfg), cfg);
}

std::vector<ClassifierSpec> all_classifiers() {
    std::vector<ClassifierSpec> out;
    for (const auto kind : {ClassifierKind::Logistic, ClassifierKind::RandomForest, ClassifierKind::AdaBoost}) {
        ClassifierSpec s;
        s.kind = kind;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("accuracy and the confusion identity") {
    CHECK(accuracy({1, 0, 0, 1}) == 1.0);
    CHECK(accuracy({0, 1, 1, 0}) == 0.0);
    const ConfusionMatrix cm{50, 5, 10, 35};
    CHECK(accuracy(cm) == 0.85);
    CHECK(accuracy(cm) * static_cast<double>(cm.total()) == static_cast<double>(cm.tp + cm.tn));
    CHECK(throws_code([] { accuracy({}); }, ErrorCode::EmptyMatrix));
    ConfusionMatrix add;
    add.add(1, 1);
    add.add(1, 0);
    add.add(0, 1);
    add.add(0, 0);
    CHECK(add == ConfusionMatrix{1, 1, 1, 1});
}

TEST_CASE("evaluate counts by actual and predicted class") {
    const Eigen::MatrixXd x = (Eigen::MatrixXd(5, 1) << 0, 1, 1, 0, 1).finished();
    const Labels y{0, 1, 1, 0, 1};
    const auto good = evaluate(FixedModel(false), x, y);
    CHECK(good.fp == 0);
    CHECK(good.fn == 0);
    const auto bad = evaluate(FixedModel(true), x, y);
    CHECK(bad.tp == good.fn);
    CHECK(bad.fn == good.tp);
    CHECK(bad.tn == good.fp);
    CHECK(bad.fp == good.tn);
    CHECK(throws_code([&] { evaluate(FixedModel(false), Eigen::MatrixXd::Zero(5, 2), y); }, ErrorCode::DimensionMismatch));
}

TEST_CASE("stratified folds") {
    const Labels ten{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const auto a = stratified_kfold(ten, 5, 3);
    for (int f = 0; f < 5; ++f) {
        int pos = 0, neg = 0;
        for (std::size_t i = 0; i < ten.size(); ++i) {
            if (a[i] == f) (ten[i] ? pos : neg)++;
        }
        CHECK(pos == 1);
        CHECK(neg == 1);
    }
    CHECK(stratified_kfold(ten, 5, 3) == a);

    const auto two = stratified_kfold({1, 0, 1, 0}, 2, 1);
    CHECK(std::count(two.begin(), two.end(), 0) == 2);
    CHECK(std::count(two.begin(), two.end(), 1) == 2);

    CHECK(throws_code([] { stratified_kfold({1, 1, 0, 0, 0, 0}, 3, 1); }, ErrorCode::TooFewPerClass));
    CHECK(throws_code([] { stratified_kfold({1, 0}, 1, 1); }, ErrorCode::InvalidParams));

    const Labels six{1, 0, 1, 0, 0, 0};
    const auto loo = stratified_kfold(six, 6, 2);
    std::vector<int> sorted = loo;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});

    // class shares per fold stay within one instance of the global share
    std::mt19937_64 gen(3);
    Labels y(137);
    for (auto& v : y) v = gen() % 7 == 0;
    const int folds = 5;
    const auto asg = stratified_kfold(y, folds, 11);
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    for (int f = 0; f < folds; ++f) {
        double fp = 0, fn = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (asg[i] == f) (y[i] ? fp : fn) += 1;
        }
        CHECK(std::abs(fp - pos / folds) <= 1.0);
        CHECK(std::abs(fn - (static_cast<double>(y.size()) - pos) / folds) <= 1.0);
    }
}

TEST_CASE("random forest") {
    Eigen::MatrixXd line(20, 1);
    Labels yl(20);
    for (int i = 0; i < 20; ++i) {
        line(i, 0) = i;
        yl[static_cast<std::size_t>(i)] = i >= 10;
    }
    const auto f1 = train_random_forest(line, yl, {});
    CHECK(accuracy(evaluate(*f1, line, yl)) == 1.0);

    const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(9, 3, 2.0);
    const Labels yf{1, 0, 0, 1, 0, 0, 1, 0, 0};
    const auto f2 = train_random_forest(flat, yf, {});
    for (const int p : f2->predict(flat)) CHECK(p == 0);

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    Eigen::MatrixXd xor_x(200, 2);
    Labels xor_y(200);
    for (int i = 0; i < 200; ++i) {
        xor_x(i, 0) = u(gen);
        xor_x(i, 1) = u(gen);
        xor_y[static_cast<std::size_t>(i)] = (xor_x(i, 0) > 0.5) != (xor_x(i, 1) > 0.5);
    }
    ForestParams fp;
    fp.max_depth = 4;
    fp.n_trees = 100;
    const auto f3 = train_random_forest(xor_x, xor_y, fp);
    CHECK(accuracy(evaluate(*f3, xor_x, xor_y)) >= 0.95);
    CHECK(train_random_forest(xor_x, xor_y, fp)->fingerprint() == f3->fingerprint());
    fp.seed = 2;
    CHECK(train_random_forest(xor_x, xor_y, fp)->fingerprint() != f3->fingerprint());
    CHECK(throws_code([&] { train_random_forest(line, Labels(20, 1), {}); }, ErrorCode::SingleClass));
}

TEST_CASE("stump search equals brute force") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 5 + static_cast<Index>(gen() % 46);
        const Index d = 1 + static_cast<Index>(gen() % 4);
        Eigen::MatrixXd x(n, d);
        Labels y(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) {
            for (Index c = 0; c < d; ++c) x(j, c) = std::round(u(gen) * 6) / 2;  // repeated values on purpose
            y[static_cast<std::size_t>(j)] = u(gen) < 0.4;
        }
        y[0] = 1;
        y[1] = 0;
        BoostParams bp;
        bp.n_rounds = 10;
        bp.keep_round_weights = true;
        const auto model = train_adaboost(x, y, bp);
        CAPTURE(trial);
        for (const auto& round : model->rounds()) {
            const auto brute = oracle::brute_force_stump(x, y, round.weights);
            CHECK(std::abs(round.stump.error - brute.error) <= 1e-12);
            double err = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (round.stump.vote(x.row(j)) != (y[static_cast<std::size_t>(j)] ? 1 : -1)) err += round.weights[j];
            }
            CHECK(std::abs(err - brute.error) <= 1e-12);
        }
    }
}

TEST_CASE("stump ties go to the lower feature, then the lower threshold") {
    const Eigen::MatrixXd x = (Eigen::MatrixXd(4, 2) << 0, 0, 1, 1, 2, 2, 3, 3).finished();
    const Labels y{0, 0, 1, 1};
    const std::vector<double> w(4, 0.25);
    const auto s = best_stump(x, y, w);
    CHECK(s.feature == 0);
    CHECK(s.threshold == 1.5);
    CHECK(s.polarity == 1);
    CHECK(s.error == 0.0);
    const Eigen::MatrixXd z = (Eigen::MatrixXd(4, 1) << 0, 1, 2, 3).finished();
    const Labels alt{0, 1, 0, 1};
    const auto t = best_stump(z, alt, w);
    CHECK(t.error == doctest::Approx(0.25));
    CHECK(t.threshold == 0.5);
}

TEST_CASE("adaboost") {
    Eigen::MatrixXd x(10, 2);
    Labels y(10);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i % 3;
        x(i, 1) = i;
        y[static_cast<std::size_t>(i)] = i >= 6;
    }
    const auto model = train_adaboost(x, y, {});
    CHECK(model->rounds().size() == 1);
    CHECK(accuracy(evaluate(*model, x, y)) == 1.0);
    CHECK(throws_code([&] { train_adaboost(x, Labels(10, 0), {}); }, ErrorCode::SingleClass));

    // after a reweighting round the misclassified mass is one half
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    Eigen::MatrixXd r(40, 3);
    Labels ry(40);
    for (int i = 0; i < 40; ++i) {
        for (int c = 0; c < 3; ++c) r(i, c) = u(gen);
        ry[static_cast<std::size_t>(i)] = u(gen) < 0.5;
    }
    std::vector<double> w(40, 1.0 / 40);
    const auto s = best_stump(r, ry, w);
    REQUIRE(s.error > 0.0);
    REQUIRE(s.error < 0.5);
    const double alpha = 0.5 * std::log((1 - s.error) / s.error);
    reweight(r, ry, s, alpha, w);
    double wrong = 0.0;
    double total = 0.0;
    for (int i = 0; i < 40; ++i) {
        total += w[static_cast<std::size_t>(i)];
        if (s.vote(r.row(i)) != (ry[static_cast<std::size_t>(i)] ? 1 : -1)) wrong += w[static_cast<std::size_t>(i)];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(wrong == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("logistic model") {
    Eigen::MatrixXd x(8, 1);
    x << 0, 1, 2, 3, 6, 7, 8, 9;
    const Labels y{0, 0, 0, 0, 1, 1, 1, 1};
    const auto m = train_linear(x, y, {});
    CHECK(accuracy(evaluate(*m, x, y)) == 1.0);
    CHECK(m->decision((Eigen::RowVectorXd(1) << 3).finished()) < 0);
    CHECK(m->decision((Eigen::RowVectorXd(1) << 6).finished()) > 0);
    CHECK(m->converged);

    LinearParams none;
    none.l2_penalty = 0.0;
    none.max_iterations = 0;
    const Labels mostly_pos{1, 1, 1, 1, 1, 0, 0, 1};
    const auto z = train_linear(x, mostly_pos, none);
    CHECK(z->weights().cwiseAbs().maxCoeff() == 0.0);
    CHECK(z->bias() == 0.0);
    for (const int p : z->predict(x)) CHECK(p == 1);

    LinearParams strict;
    strict.max_iterations = 2;
    strict.require_convergence = true;
    CHECK(throws_code([&] { train_linear(x, y, strict); }, ErrorCode::NonConvergence));
    CHECK(throws_code([&] { train_linear(x, Labels(8, 1), {}); }, ErrorCode::SingleClass));
}

TEST_CASE("logistic gradient matches finite differences") {
    std::mt19937_64 gen(23);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd z(15, 4);
        Labels y(15);
        for (Index i = 0; i < 15; ++i) {
            for (Index c = 0; c < 4; ++c) z(i, c) = nd(gen);
            y[static_cast<std::size_t>(i)] = nd(gen) > 0;
        }
        Eigen::VectorXd theta(5);
        for (Index c = 0; c < 5; ++c) theta(c) = nd(gen);
        Eigen::VectorXd g;
        logistic_loss(z, y, theta, 0.1, &g);
        const auto num = oracle::numeric_gradient(
            [&](const Eigen::VectorXd& t) { return logistic_loss(z, y, t, 0.1, nullptr); }, theta);
        for (Index c = 0; c < 5; ++c) CHECK(std::abs(g(c) - num(c)) <= 1e-5 * std::max(1.0, std::abs(num(c))));
    }
}

TEST_CASE("cross validation on a separable corpus") {
    const auto c = synthetic::separable_corpus(100, 50, 40, 4);
    const auto x = counts_of(c);
    const auto y = corpus::labels_as_int(c.labels);
    DrSpec dr;
    dr.method = Method::FC;
    dr.k = 2;
    CvOptions opts;
    opts.seed = 9;
    const auto specs = all_classifiers();
    const auto reports = cross_validate_many(x, y, dr, specs, opts);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) {
        CAPTURE(r.classifier);
        CHECK(r.mean_accuracy >= 0.95);
        CHECK(r.folds.size() == 5);
        CHECK(r.fold_accuracy.size() == 5);
        std::size_t total = 0;
        for (const auto& cm : r.folds) total += cm.total();
        CHECK(total == 100);
        const auto [mean, sd] = mean_and_stddev(r.fold_accuracy);
        CHECK(mean == r.mean_accuracy);
        CHECK(sd == r.stddev);
    }
    CHECK(cross_validate_many(x, y, dr, specs, opts) == reports);
    CHECK(cross_validate(x, y, dr, specs[1], opts) == reports[1]);
}

TEST_CASE("leave-one-out runs six folds") {
    const auto c = synthetic::separable_corpus(6, 10, 20, 2);
    const auto x = counts_of(c);
    const auto y = corpus::labels_as_int(c.labels);
    DrSpec dr;
    dr.method = Method::SVD;
    dr.k = 2;
    CvOptions opts;
    opts.folds = 6;
    ClassifierSpec cs;
    cs.kind = ClassifierKind::Logistic;
    const auto r = cross_validate(x, y, dr, cs, opts);
    CHECK(r.folds.size() == 6);
    for (const auto& cm : r.folds) CHECK(cm.total() == 1);
}

TEST_CASE("test-fold documents never reach the fitted models") {
    const auto c = synthetic::separable_corpus(60, 30, 25, 8);
    const auto y = corpus::labels_as_int(c.labels);
    const auto assignment = stratified_kfold(y, 5, 1);
    const auto x = counts_of(c);
    for (const Method m : {Method::FC, Method::SVD, Method::PCA}) {
        DrSpec dr;
        dr.method = m;
        dr.k = 3;
        CvOptions opts;
        opts.fold_assignment = assignment;
        opts.seed = 4;
        // Swap the words of test-fold documents for other in-vocabulary words.
        std::vector<Triplet> moved;
        for (Index j = 0; j < x.rows(); ++j) {
            const auto r = x.row(j);
            for (std::size_t p = 0; p < r.size(); ++p) {
                const Index col = assignment[static_cast<std::size_t>(j)] == 2 ? (r.cols[p] + 7) % x.cols() : r.cols[p];
                moved.push_back({j, col, r.values[p]});
            }
        }
        const auto xm = SparseDocMatrix::from_triplets(x.rows(), x.cols(), moved);
        const auto specs = all_classifiers();
        const auto a = cross_validate_many(x, y, dr, specs, opts);
        const auto b = cross_validate_many(xm, y, dr, specs, opts);
        CAPTURE(to_string(m));
        for (std::size_t k = 0; k < specs.size(); ++k) {
            CHECK(a[k].dr_fingerprints[2] == b[k].dr_fingerprints[2]);
            CHECK(a[k].model_fingerprints[2] == b[k].model_fingerprints[2]);
            CHECK(a[k].dr_fingerprints[0] != b[k].dr_fingerprints[0]);
        }
    }
}

TEST_CASE("report serialization and population sd") {
    const std::vector<double> v{0.9, 1.0};
    CHECK(mean_and_stddev(v).second == doctest::Approx(0.05).epsilon(1e-14));
    const std::vector<double> flat{0.7, 0.7, 0.7};
    CHECK(mean_and_stddev(flat).second == 0.0);
    CHECK(csv_header() == "dataset,method,k,fuzzifier,classifier,fold_accuracies,mean,sd,seed");
    CvReport r;
    r.method = Method::PCA;
    r.k = 10;
    r.classifier = "AdaBoost";
    r.fold_accuracy = {0.5, 1};
    r.mean_accuracy = 0.75;
    r.stddev = 0.25;
    r.seed = 3;
    CHECK(to_csv_row("grain", r) == "grain,PCA,10,NA,AdaBoost,0.5;1,0.75,0.25,3");
    r.method = Method::FC;
    r.q = 1.5;
    CHECK(to_csv_row("grain", r) == "grain,FC,10,1.5,AdaBoost,0.5;1,0.75,0.25,3");
    CHECK(parse_classifier("forest") == ClassifierKind::RandomForest);
    CHECK(throws_code([] { parse_classifier("svm"); }, ErrorCode::InvalidParams));
}
