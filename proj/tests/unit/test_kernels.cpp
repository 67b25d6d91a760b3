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

#include <omp.h>

#include <doctest.h>

#include "fuzzydr/fuzzy.hpp"
#include "fuzzydr/kernels.hpp"
#include "fuzzydr/synthetic.hpp"
#include "oracles.hpp"

using namespace fdr;
using namespace fdr::kernels;

namespace {

RowMatrix random_protos(Index m, Index k, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    RowMatrix v(m, k);
    for (Index i = 0; i < m; ++i) {
        for (Index f = 0; f < k; ++f) v(i, f) = std::abs(nd(gen));
    }
    for (Index f = 0; f < k; ++f) v.col(f) /= v.col(f).norm();
    return v;
}

struct ThreadScope {
    explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadScope() { omp_set_num_threads(saved); }
    int saved;
};

}  // namespace

TEST_CASE("serial and parallel kernels are bit-identical") {
    const auto x = l2_normalize_rows(synthetic::random_count_matrix(700, 300, 12, 17));
    const RowMatrix v = random_protos(300, 7, 3);
    const RowMatrix w = random_protos(700, 7, 4);
    std::vector<double> vec(300);
    for (std::size_t i = 0; i < vec.size(); ++i) vec[i] = std::sin(static_cast<double>(i));

    RowMatrix d_s, u_s, ws_s, mm_s;
    std::vector<double> t_s, y_s(700);
    serial::dissimilarities(x, v, d_s);
    serial::memberships(d_s, 1.5, kSingularityTol, u_s);
    serial::objective_terms(d_s, u_s, 1.5, t_s);
    serial::weighted_sums(x, w, ws_s);
    serial::spmm(x, v, mm_s);
    serial::spmv(x, vec, y_s);

    for (const int threads : {1, 4}) {
        CAPTURE(threads);
        ThreadScope scope(threads);
        RowMatrix d_p, u_p, ws_p, mm_p;
        std::vector<double> t_p, y_p(700);
        parallel::dissimilarities(x, v, d_p);
        parallel::memberships(d_p, 1.5, kSingularityTol, u_p);
        parallel::objective_terms(d_p, u_p, 1.5, t_p);
        parallel::weighted_sums(x, w, ws_p);
        parallel::spmm(x, v, mm_p);
        parallel::spmv(x, vec, y_p);
        CHECK(d_p == d_s);
        CHECK(u_p == u_s);
        CHECK(t_p == t_s);
        CHECK(ws_p == ws_s);
        CHECK(mm_p == mm_s);
        CHECK(y_p == y_s);
    }
}

TEST_CASE("kernels agree with dense products") {
    const auto x = synthetic::random_count_matrix(40, 25, 6, 8);
    const RowMatrix b = random_protos(25, 4, 9);
    RowMatrix out;
    spmm(Exec::Parallel, x, b, out);
    const Eigen::MatrixXd ref = oracle::dense(x) * Eigen::MatrixXd(b);
    CHECK((Eigen::MatrixXd(out) - ref).cwiseAbs().maxCoeff() <= 1e-12);
    RowMatrix ws;
    const RowMatrix w = random_protos(40, 3, 10);
    weighted_sums(Exec::Serial, x, w, ws);
    const Eigen::MatrixXd ref2 = oracle::dense(x).transpose() * Eigen::MatrixXd(w);
    CHECK((Eigen::MatrixXd(ws) - ref2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("membership row rules") {
    std::vector<double> u(3);
    membership_row(std::vector<double>{0.4, 0.0, 0.9}, 2.0, kSingularityTol, u);
    CHECK(u == std::vector<double>{0.0, 1.0, 0.0});
    membership_row(std::vector<double>{0.0, 0.5, 0.0}, 2.0, kSingularityTol, u);
    CHECK(u == std::vector<double>{0.5, 0.0, 0.5});
    std::vector<double> u2(2);
    for (const double q : {1.1, 1.5, 2.0, 7.0}) {
        membership_row(std::vector<double>{0.3, 0.3}, q, kSingularityTol, u2);
        CHECK(u2[0] == 0.5);
        CHECK(u2[1] == 0.5);
    }
}

TEST_CASE("ordered_sum is a left fold") {
    const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    CHECK(ordered_sum(v) == ((1e16 + 1.0) - 1e16) + 1.0);
}

TEST_CASE("fuzzy fit is identical across execution modes and thread counts") {
    const auto x = l2_normalize_rows(synthetic::random_count_matrix(300, 120, 9, 21));
    fuzzy::FuzzyParams p;
    p.k = 6;
    p.q = 1.5;
    p.seed = 5;
    const auto ref = fuzzy::fit(x, p, Exec::Serial);
    for (const int threads : {1, 4}) {
        ThreadScope scope(threads);
        const auto par = fuzzy::fit(x, p, Exec::Parallel);
        CHECK(par.model.objective_trace == ref.model.objective_trace);
        CHECK(par.memberships == ref.memberships);
        CHECK(par.model.prototypes == ref.model.prototypes);
    }
}
