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

#include <sstream>

#include <doctest.h>

#include "fuzzydr/fuzzy.hpp"
#include "fuzzydr/synthetic.hpp"
#include "oracles.hpp"

using namespace fdr;
using namespace fdr::fuzzy;
using oracle::throws_code;

namespace {

SparseDocMatrix unit(const Eigen::MatrixXd& d) { return l2_normalize_rows(oracle::sparse(d)); }

Eigen::MatrixXd proto_rows(const Prototypes& v) { return Eigen::MatrixXd(v.term_major()).transpose(); }

Eigen::MatrixXd memb(const MembershipMatrix& u) { return Eigen::MatrixXd(u.values()); }

MembershipMatrix from_dense(const Eigen::MatrixXd& u) { return MembershipMatrix(RowMatrix(u)); }

/// Two groups with disjoint vocabularies, sizes a and b.
Eigen::MatrixXd two_groups(Index a, Index b, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a + b, 10);
    std::uniform_int_distribution<int> c(0, 3);
    for (Index j = 0; j < a + b; ++j) {
        const Index base = j < a ? 0 : 5;
        for (Index i = 0; i < 5; ++i) d(j, base + i) = c(gen);
        if (d.row(j).sum() == 0) d(j, base) = 1;
    }
    return d;
}

std::vector<int> hard(const MembershipMatrix& u) {
    std::vector<int> out;
    for (Index j = 0; j < u.rows(); ++j) {
        Index best = 0;
        for (Index f = 1; f < u.cols(); ++f) {
            if (u(j, f) > u(j, best)) best = f;
        }
        out.push_back(static_cast<int>(best));
    }
    return out;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    bool direct = true;
    bool swapped = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        direct = direct && a[i] == b[i];
        swapped = swapped && a[i] == 1 - b[i];
    }
    return direct || swapped;
}

}  // namespace

TEST_CASE("cosine dissimilarity") {
    const auto x = oracle::sparse((Eigen::MatrixXd(3, 2) << 0.6, 0.8, 0, 1, 0, 0).finished());
    const std::vector<double> v{1.0, 0.0};
    const std::vector<double> same{0.6, 0.8};
    CHECK(cosine_dissimilarity(x.row(0), v) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(cosine_dissimilarity(x.row(0), same) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cosine_dissimilarity(x.row(1), v) == 1.0);
    CHECK(cosine_dissimilarity(x.row(2), v) == 1.0);
}

TEST_CASE("memberships: singular, symmetric and closed-form cases") {
    const Eigen::MatrixXd protos = (Eigen::MatrixXd(3, 3) << 1, 0, 0, 0, 1, 0, 0, 0, 1).finished();
    const auto v = Prototypes::from_rows(protos);
    const auto x = oracle::sparse((Eigen::MatrixXd(2, 3) << 0, 1, 0, 0, 0, 0).finished());
    const auto u = update_memberships(x, v, 2.0);
    CHECK(u(0, 0) == 0.0);
    CHECK(u(0, 1) == 1.0);
    CHECK(u(0, 2) == 0.0);
    for (Index f = 0; f < 3; ++f) CHECK(u(1, f) == doctest::Approx(1.0 / 3).epsilon(1e-15));

    // D = (0.2, 0.6) at q = 2: x . v1 = 0.8, x . v2 = 0.4 with v1 = e1, v2 = e2.
    const Eigen::MatrixXd p2 = (Eigen::MatrixXd(2, 3) << 1, 0, 0, 0, 1, 0).finished();
    const double c = std::sqrt(1.0 - 0.8 * 0.8 - 0.4 * 0.4);
    const auto d = oracle::sparse((Eigen::MatrixXd(1, 3) << 0.8, 0.4, c).finished());
    const auto u2 = update_memberships(d, Prototypes::from_rows(p2), 2.0);
    CHECK(u2(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(u2(0, 1) == doctest::Approx(0.25).epsilon(1e-12));

    // Grid search over mu1 of the Lagrangian-constrained objective mu1^2 0.2 + (1 - mu1)^2 0.6.
    double best_mu = 0.0;
    double best_j = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100000; ++i) {
        const double mu = i / 100000.0;
        const double j = mu * mu * 0.2 + (1 - mu) * (1 - mu) * 0.6;
        if (j < best_j) {
            best_j = j;
            best_mu = mu;
        }
    }
    CHECK(best_mu == doctest::Approx(0.75).epsilon(1e-5));

    const auto eq = oracle::sparse((Eigen::MatrixXd(1, 3) << std::sqrt(0.5), std::sqrt(0.5), 0).finished());
    for (const double q : {1.2, 1.5, 2.0, 4.0}) {
        const auto u3 = update_memberships(eq, Prototypes::from_rows(p2), q);
        CHECK(u3(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("memberships match the dense closed form") {
    std::mt19937_64 gen(12);
    const Eigen::MatrixXd x = oracle::unit_rows(oracle::random_counts(15, 9, 0.5, gen));
    const Eigen::MatrixXd v = oracle::unit_rows(oracle::random_counts(4, 9, 0.6, gen));
    for (const double q : {1.5, 2.0, 3.0}) {
        const auto u = update_memberships(oracle::sparse(x), Prototypes::from_rows(v), q);
        const Eigen::MatrixXd ref = oracle::memberships(oracle::cosine_dissimilarities(x, v), q);
        CHECK((memb(u) - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("row entropy is non-decreasing in q") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd x = oracle::unit_rows(oracle::random_counts(12, 8, 0.5, gen));
        const Eigen::MatrixXd v = oracle::unit_rows(oracle::random_counts(3, 8, 0.7, gen));
        const auto sx = oracle::sparse(x);
        const auto sv = Prototypes::from_rows(v);
        std::vector<Eigen::MatrixXd> us;
        for (const double q : {1.2, 1.5, 2.0, 4.0}) us.push_back(memb(update_memberships(sx, sv, q)));
        for (Index j = 0; j < x.rows(); ++j) {
            for (std::size_t t = 1; t < us.size(); ++t) {
                CHECK(oracle::row_entropy(us[t].row(j)) >= oracle::row_entropy(us[t - 1].row(j)) - 1e-12);
            }
        }
    }
}

TEST_CASE("prototype updates") {
    const Eigen::MatrixXd x = (Eigen::MatrixXd(2, 3) << 1, 0, 0, 0, 1, 0).finished();
    const auto sx = oracle::sparse(x);
    const auto one = update_prototypes(sx, from_dense((Eigen::MatrixXd(2, 1) << 1, 0).finished()), 2.0);
    CHECK(proto_rows(one.prototypes).row(0) == x.row(0));
    const auto both = update_prototypes(sx, from_dense((Eigen::MatrixXd(2, 1) << 0.5, 0.5).finished()), 2.0);
    CHECK(proto_rows(both.prototypes)(0, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(proto_rows(both.prototypes)(0, 1) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));

    std::mt19937_64 gen(8);
    const Eigen::MatrixXd r = oracle::unit_rows(oracle::random_counts(8, 5, 0.6, gen));
    Eigen::MatrixXd u = Eigen::MatrixXd::Random(8, 3).cwiseAbs();
    for (Index j = 0; j < 8; ++j) u.row(j) /= u.row(j).sum();
    const auto got = proto_rows(update_prototypes(oracle::sparse(r), from_dense(u), 1.5).prototypes);
    const Eigen::MatrixXd ref = oracle::prototypes(r, u, 1.5);
    for (Index f = 0; f < 3; ++f) {
        CHECK(got.row(f).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(got.row(f).dot(ref.row(f)) >= 1 - 1e-12);
    }
}

TEST_CASE("degenerate cluster is re-seeded and flagged") {
    const Eigen::MatrixXd x = (Eigen::MatrixXd(3, 3) << 1, 0, 0, 0.6, 0.8, 0, 0, 0, 1).finished();
    const Eigen::MatrixXd u = (Eigen::MatrixXd(3, 2) << 1, 0, 1, 0, 1, 0).finished();
    const auto up = update_prototypes(oracle::sparse(x), from_dense(u), 2.0);
    REQUIRE(up.degenerate == std::vector<Index>{1});
    const auto v = proto_rows(up.prototypes);
    // the re-seeded prototype is the row farthest from the surviving cluster
    CHECK(v.row(1) == x.row(2));
}

TEST_CASE("objective") {
    const Eigen::MatrixXd x = (Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished();
    const auto sx = oracle::sparse(x);
    const auto v = Prototypes::from_rows(x);
    CHECK(objective(sx, v, from_dense(Eigen::MatrixXd::Identity(2, 2)), 2.0) == 0.0);
    const Eigen::MatrixXd v1 = (Eigen::MatrixXd(1, 2) << 0.6, 0.8).finished();
    const auto ones = from_dense(Eigen::MatrixXd::Ones(2, 1));
    const double a = objective(sx, Prototypes::from_rows(v1), ones, 1.5);
    const double b = objective(sx, Prototypes::from_rows(v1), ones, 3.0);
    CHECK(a == doctest::Approx(0.4 + 0.2).epsilon(1e-15));
    CHECK(a == b);
}

TEST_CASE("worked example: objective matches dense recomputation and pattern holds") {
    const Eigen::MatrixXd counts = oracle::worked_example_counts();
    const Eigen::MatrixXd xd = oracle::unit_rows(counts);
    const auto x = l2_normalize_rows(oracle::sparse(counts));
    for (const double q : {1.5, 2.0}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            FuzzyParams p;
            p.k = 2;
            p.q = q;
            p.seed = seed;
            const auto r = fit(x, p);
            const auto h = hard(r.memberships);
            CHECK(h[1] == h[3]);
            CHECK(h[0] == h[2]);
            CHECK(h[0] != h[1]);
            Index most = -1;
            double lowest = 2.0;
            for (Index j = 0; j < 5; ++j) {
                const double top = std::max(r.memberships(j, 0), r.memberships(j, 1));
                if (top < lowest) {
                    lowest = top;
                    most = j;
                }
            }
            CHECK(most == 4);
            const Eigen::MatrixXd v = proto_rows(r.model.prototypes);
            const double ref = oracle::objective(oracle::cosine_dissimilarities(xd, v), memb(r.memberships), q);
            CHECK(std::abs(ref - r.model.objective_trace.back()) <= 1e-12);
            CHECK(r.memberships.cols() == 2);
        }
    }
}

TEST_CASE("k = 1 gives the all-ones column and the mean direction") {
    std::mt19937_64 gen(2);
    const Eigen::MatrixXd x = oracle::unit_rows(oracle::random_counts(9, 6, 0.5, gen));
    FuzzyParams p;
    p.k = 1;
    p.seed = 4;
    const auto r = fit(oracle::sparse(x), p);
    for (Index j = 0; j < 9; ++j) CHECK(r.memberships(j, 0) == 1.0);
    const Eigen::RowVectorXd mean = x.colwise().sum().normalized();
    CHECK(proto_rows(r.model.prototypes).row(0).dot(mean) >= 1 - 1e-12);
}

TEST_CASE("separated groups are recovered and match the exhaustive optimum") {
    for (std::uint64_t s = 0; s < 8; ++s) {
        const Eigen::MatrixXd d = two_groups(4, 5, s);
        const Eigen::MatrixXd xd = oracle::unit_rows(d);
        FuzzyParams p;
        p.k = 2;
        p.q = 1.5;
        p.seed = s;
        p.n_restarts = 4;
        const auto r = fit(oracle::sparse(xd), p);
        const auto best = oracle::best_two_partition(xd);
        const auto h = hard(r.memberships);
        CHECK(same_partition(h, best.assign));
        CHECK(std::abs(oracle::hard_objective(xd, h, 2) - best.value) <= 1e-9);
        std::vector<int> truth(9, 0);
        for (int j = 4; j < 9; ++j) truth[static_cast<std::size_t>(j)] = 1;
        CHECK(same_partition(h, truth));
    }
}

TEST_CASE("multi-restart reaches the exhaustive optimum on small random matrices") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 15; ++trial) {
        const Eigen::MatrixXd xd = oracle::unit_rows(oracle::random_counts(8, 7, 0.4, gen));
        FuzzyParams p;
        p.k = 2;
        p.q = 1.1;
        p.seed = static_cast<std::uint64_t>(trial);
        p.n_restarts = 20;
        p.max_iterations = 300;
        p.epsilon = 1e-12;
        const auto r = fit(oracle::sparse(xd), p);
        const auto best = oracle::best_two_partition(xd);
        CAPTURE(trial);
        CHECK(oracle::hard_objective(xd, hard(r.memberships), 2) <= best.value + 1e-9);
    }
}

TEST_CASE("euclidean reference agrees on well-separated unit rows") {
    const Eigen::MatrixXd xd = oracle::unit_rows(two_groups(5, 5, 3));
    const Eigen::MatrixXd start = (Eigen::MatrixXd(2, 10) << xd.row(0), xd.row(9)).finished();
    const Eigen::MatrixXd ue = oracle::euclidean_fcm(xd, start, 2.0, 50);
    FuzzyParams p;
    p.k = 2;
    p.q = 2.0;
    p.seed = 0;
    const auto r = fit(oracle::sparse(xd), p);
    std::vector<int> he;
    for (Index j = 0; j < 10; ++j) he.push_back(ue(j, 0) > ue(j, 1) ? 0 : 1);
    CHECK(same_partition(he, hard(r.memberships)));
}

TEST_CASE("fit invariants on random fixtures") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = l2_normalize_rows(synthetic::random_count_matrix(60, 40, 5, s));
        FuzzyParams p;
        p.k = 2 + static_cast<Index>(s % 5);
        p.q = s % 2 ? 1.5 : 2.0;
        p.seed = s;
        const auto r = fit(x, p);
        const auto& u = r.memberships.values();
        for (Index j = 0; j < u.rows(); ++j) {
            CHECK(std::abs(u.row(j).sum() - 1.0) <= 1e-9);
            CHECK(u.row(j).minCoeff() >= 0.0);
            CHECK(u.row(j).maxCoeff() <= 1.0);
        }
        for (Index f = 0; f < u.cols(); ++f) {
            CHECK(u.col(f).sum() > 0.0);
            CHECK(u.col(f).sum() < static_cast<double>(u.rows()));
            CHECK(r.model.prototypes.vector(f).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
        const auto& tr = r.model.objective_trace;
        for (std::size_t t = 1; t < tr.size(); ++t) CHECK(tr[t] <= tr[t - 1] + 1e-10);
        CHECK(r.model.iterations_run <= p.max_iterations);
    }
}

TEST_CASE("fit is deterministic and reduce reproduces the training memberships") {
    const auto x = l2_normalize_rows(synthetic::random_count_matrix(80, 50, 6, 99));
    FuzzyParams p;
    p.k = 4;
    p.q = 1.5;
    p.seed = 7;
    const auto a = fit(x, p);
    const auto b = fit(x, p);
    CHECK(a.model.objective_trace == b.model.objective_trace);
    CHECK(a.memberships == b.memberships);
    const auto red = reduce(x, a.model);
    CHECK(red.method == Method::FC);
    CHECK(red.values == Eigen::MatrixXd(a.memberships.values()));

    const std::vector<Index> one{3};
    const auto single = reduce(x.select_rows(one), a.model);
    CHECK(single.values.row(0) == red.values.row(3));

    const auto wrong = l2_normalize_rows(synthetic::random_count_matrix(5, 49, 3, 1));
    CHECK(throws_code([&] { reduce(wrong, a.model); }, ErrorCode::DimensionMismatch));
}

TEST_CASE("duplicate rows share memberships and row permutation permutes them") {
    std::mt19937_64 gen(5);
    Eigen::MatrixXd d = oracle::random_counts(20, 12, 0.4, gen);
    d.row(7) = d.row(2);
    const auto x = l2_normalize_rows(oracle::sparse(d));
    FuzzyParams p;
    p.k = 3;
    p.q = 1.5;
    p.seed = 1;
    const auto r = fit(x, p);
    CHECK(memb(r.memberships).row(7) == memb(r.memberships).row(2));

    // Permuting rows with frozen prototypes permutes the memberships exactly.
    std::vector<Index> perm(20);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    const auto px = x.select_rows(perm);
    const auto pu = update_memberships(px, r.model.prototypes, p.q);
    for (Index j = 0; j < 20; ++j) CHECK(memb(pu).row(j) == memb(r.memberships).row(perm[static_cast<std::size_t>(j)]));

    // Refitting to a tight tolerance on permuted rows lands on the same fixed
    // point up to cluster labels.
    p.epsilon = 1e-15;
    p.max_iterations = 2000;
    const auto rt = fit(x, p);
    const auto rp = fit(px, p);
    const Eigen::MatrixXd a = memb(rp.memberships);
    const Eigen::MatrixXd b = memb(rt.memberships);
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> cols{0, 1, 2};
    do {
        double worst = 0.0;
        for (Index j = 0; j < 20; ++j) {
            for (Index f = 0; f < 3; ++f) {
                worst = std::max(worst, std::abs(a(j, cols[static_cast<std::size_t>(f)]) -
                                                 b(perm[static_cast<std::size_t>(j)], f)));
            }
        }
        best = std::min(best, worst);
    } while (std::next_permutation(cols.begin(), cols.end()));
    CHECK(best <= 1e-6);
}

TEST_CASE("parameter validation") {
    const auto x = l2_normalize_rows(synthetic::random_count_matrix(5, 8, 2, 1));
    FuzzyParams p;
    p.q = 1.0;
    CHECK(throws_code([&] { fit(x, p); }, ErrorCode::InvalidParams));
    p = {};
    p.k = 0;
    CHECK(throws_code([&] { fit(x, p); }, ErrorCode::InvalidParams));
    p = {};
    p.k = 6;
    CHECK(throws_code([&] { fit(x, p); }, ErrorCode::InvalidParams));
    p = {};
    p.epsilon = 0;
    CHECK(throws_code([&] { fit(x, p); }, ErrorCode::InvalidParams));
    p = {};
    p.max_iterations = 0;
    CHECK(throws_code([&] { fit(x, p); }, ErrorCode::InvalidParams));
    p = {};
    const auto raw = synthetic::random_count_matrix(5, 8, 2, 1);
    CHECK(throws_code([&] { fit(raw, p); }, ErrorCode::InvalidParams));
    const auto sparse_rows = l2_normalize_rows(SparseDocMatrix::from_triplets(4, 3, {{0, 0, 1.0}}));
    p.k = 2;
    CHECK(throws_code([&] { fit(sparse_rows, p); }, ErrorCode::TooFewDocuments));
}

TEST_CASE("xie-beni index") {
    const Eigen::MatrixXd v = (Eigen::MatrixXd(2, 2) << 1, 0, 1, 0).finished();
    const auto x = oracle::sparse((Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished());
    const auto u = from_dense((Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished());
    CHECK(throws_code([&] { xie_beni(x, Prototypes::from_rows(v), u, 2.0); }, ErrorCode::IdenticalPrototypes));
    CHECK(xie_beni(x, Prototypes::from_rows(Eigen::MatrixXd::Identity(2, 2)), u, 2.0) == 0.0);
    const auto k1 = from_dense(Eigen::MatrixXd::Ones(2, 1));
    CHECK(throws_code([&] { xie_beni(x, Prototypes::from_rows(v.topRows(1)), k1, 2.0); }, ErrorCode::InvalidParams));

    std::mt19937_64 gen(44);
    Eigen::MatrixXd d(30, 12);
    d.setZero();
    std::uniform_int_distribution<int> c(1, 4);
    for (Index j = 0; j < 30; ++j) {
        for (Index i = 0; i < 4; ++i) d(j, (j % 3) * 4 + i) = c(gen);
        d(j, (j + 1) % 12) += 1;
    }
    const Eigen::MatrixXd xd = oracle::unit_rows(d);
    FuzzyParams p;
    p.k = 3;
    p.q = 1.5;
    p.seed = 2;
    const auto r = fit(oracle::sparse(xd), p);
    const double got = xie_beni(oracle::sparse(xd), r.model.prototypes, r.memberships, 1.5);
    const double ref = oracle::xie_beni(xd, proto_rows(r.model.prototypes), memb(r.memberships), 1.5);
    CHECK(std::abs(got - ref) <= 1e-10);
}

TEST_CASE("model dump round-trips") {
    const auto x = l2_normalize_rows(synthetic::random_count_matrix(30, 20, 4, 6));
    FuzzyParams p;
    p.k = 3;
    p.q = 1.5;
    const auto r = fit(x, p);
    std::stringstream ss;
    write_model_dump(ss, r.model);
    const auto back = read_model_dump(ss);
    CHECK(back.params.k == 3);
    CHECK(back.params.q == 1.5);
    CHECK(back.prototypes == r.model.prototypes);
    CHECK(reduce(x, back).values == reduce(x, r.model).values);
}
