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

#include "fuzzydr/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fuzzydr/error.hpp"
#include "fuzzydr/rng.hpp"

namespace fdr::fuzzy {

namespace {

double sparse_dot(const SparseRow& a, const SparseRow& b) {
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.cols[i] == b.cols[j]) {
            s += a.values[i++] * b.values[j++];
        } else if (a.cols[i] < b.cols[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

double clamp_dissimilarity(double d) { return std::clamp(d, 0.0, 2.0); }

void set_prototype_from_row(RowMatrix& term_major, Index f, const SparseRow& r) {
    term_major.col(f).setZero();
    const double norm = std::sqrt(r.squared_norm());
    for (std::size_t p = 0; p < r.size(); ++p) term_major(r.cols[p], f) = r.values[p] / norm;
}

void require_unit_rows(const SparseDocMatrix& x) {
    if (!rows_unit_or_empty(x, 1e-9)) fail(ErrorCode::InvalidParams, "document rows must be L2-normalized");
}

FitResult fit_once(const SparseDocMatrix& x, const FuzzyParams& params,
                   std::uint64_t seed, Exec exec) {
    FuzzyModel model;
    model.params = params;
    model.seed_used = seed;
    Prototypes v = initial_prototypes(x, params.k, seed);

    RowMatrix d;
    RowMatrix u;
    std::vector<double> terms;
    for (int it = 0; it < params.max_iterations; ++it) {
        kernels::dissimilarities(exec, x, v.term_major(), d);
        kernels::memberships(exec, d, params.q, kernels::kSingularityTol, u);
        kernels::objective_terms(exec, d, u, params.q, terms);
        const double j = kernels::ordered_sum(terms);
        model.objective_trace.push_back(j);
        model.iterations_run = it + 1;
        if (it > 0) {
            const double prev = model.objective_trace[model.objective_trace.size() - 2];
            if (prev - j < params.epsilon) {
                model.converged = true;
                break;
            }
        }
        if (it + 1 == params.max_iterations) break;
        auto upd = update_prototypes(x, MembershipMatrix(u), params.q, exec);
        model.reseeds += static_cast<int>(upd.degenerate.size());
        v = std::move(upd.prototypes);
    }
    model.prototypes = std::move(v);
    return {std::move(model), MembershipMatrix(std::move(u))};
}

}  // namespace

void FuzzyParams::validate(Index n) const {
    if (k < 1) fail(ErrorCode::InvalidParams, "k must be >= 1");
    if (n >= 0 && k > n) fail(ErrorCode::InvalidParams, fmt::format("k = {} exceeds n = {}", k, n));
    if (!(q > 1.0) || !std::isfinite(q)) fail(ErrorCode::InvalidParams, "fuzzifier q must be > 1");
    if (max_iterations < 1) fail(ErrorCode::InvalidParams, "max_iterations must be >= 1");
    if (!(epsilon > 0.0)) fail(ErrorCode::InvalidParams, "epsilon must be > 0");
    if (n_restarts < 1) fail(ErrorCode::InvalidParams, "n_restarts must be >= 1");
}

Prototypes Prototypes::from_rows(const Eigen::MatrixXd& rows) { return Prototypes(RowMatrix(rows.transpose())); }

double cosine_dissimilarity(const SparseRow& x, std::span<const double> v) {
    if (x.empty()) return 1.0;
    double s = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p) s += x.values[p] * v[static_cast<std::size_t>(x.cols[p])];
    return clamp_dissimilarity(1.0 - s);
}

MembershipMatrix update_memberships(const SparseDocMatrix& x, const Prototypes& v, double q, Exec exec) {
    RowMatrix d;
    RowMatrix u;
    kernels::dissimilarities(exec, x, v.term_major(), d);
    kernels::memberships(exec, d, q, kernels::kSingularityTol, u);
    return MembershipMatrix(std::move(u));
}

PrototypeUpdate update_prototypes(const SparseDocMatrix& x, const MembershipMatrix& u, double q, Exec exec) {
    if (u.rows() != x.rows()) fail(ErrorCode::DimensionMismatch, "membership rows differ from document count");
    const Index k = u.cols();
    RowMatrix weights = u.values().array().pow(q).matrix();
    RowMatrix sums;
    kernels::weighted_sums(exec, x, weights, sums);

    PrototypeUpdate out;
    std::vector<bool> valid(static_cast<std::size_t>(k), true);
    for (Index f = 0; f < k; ++f) {
        double norm2 = 0.0;
        for (Index i = 0; i < sums.rows(); ++i) norm2 += sums(i, f) * sums(i, f);
        const double norm = std::sqrt(norm2);
        if (!(norm > std::numeric_limits<double>::min())) {
            valid[static_cast<std::size_t>(f)] = false;
            out.degenerate.push_back(f);
            sums.col(f).setZero();
            continue;
        }
        sums.col(f) /= norm;
    }

    if (!out.degenerate.empty()) {
        // Re-seed each empty cluster with the document farthest from its closest valid prototype.
        std::vector<double> best(static_cast<std::size_t>(x.rows()), 2.0);
        std::vector<double> dv(static_cast<std::size_t>(k));
        for (Index j = 0; j < x.rows(); ++j) {
            kernels::dissimilarity_row(x.row(j), sums, dv);
            for (Index f = 0; f < k; ++f) {
                if (valid[static_cast<std::size_t>(f)]) best[j] = std::min(best[j], dv[f]);
            }
        }
        std::vector<bool> taken(static_cast<std::size_t>(x.rows()), false);
        for (const Index f : out.degenerate) {
            Index pick = -1;
            for (Index j = 0; j < x.rows(); ++j) {
                if (x.row(j).empty() || taken[j]) continue;
                if (pick < 0 || best[j] > best[pick]) pick = j;
            }
            if (pick < 0) fail(ErrorCode::TooFewDocuments, "no document available to re-seed a cluster");
            taken[pick] = true;
            set_prototype_from_row(sums, f, x.row(pick));
            const Eigen::VectorXd col = sums.col(f);
            for (Index j = 0; j < x.rows(); ++j) {
                best[j] = std::min(best[j], cosine_dissimilarity(x.row(j), {col.data(), static_cast<std::size_t>(col.size())}));
            }
        }
    }
    out.prototypes = Prototypes(std::move(sums));
    return out;
}

double objective(const SparseDocMatrix& x, const Prototypes& v, const MembershipMatrix& u, double q, Exec exec) {
    if (u.rows() != x.rows() || u.cols() != v.k()) fail(ErrorCode::DimensionMismatch, "objective shape mismatch");
    RowMatrix d;
    std::vector<double> terms;
    kernels::dissimilarities(exec, x, v.term_major(), d);
    kernels::objective_terms(exec, d, u.values(), q, terms);
    return kernels::ordered_sum(terms);
}

Prototypes initial_prototypes(const SparseDocMatrix& x, Index k, std::uint64_t seed) {
    std::vector<Index> candidates;
    for (Index j = 0; j < x.rows(); ++j) {
        if (!x.row(j).empty()) candidates.push_back(j);
    }
    if (static_cast<Index>(candidates.size()) < k) {
        fail(ErrorCode::TooFewDocuments,
             fmt::format("{} non-empty documents cannot seed {} clusters", candidates.size(), k));
    }
    Rng rng(seed);
    RowMatrix protos = RowMatrix::Zero(x.cols(), k);
    std::vector<bool> chosen(candidates.size(), false);
    std::vector<double> mind(candidates.size(), std::numeric_limits<double>::infinity());

    std::size_t pick = rng.below(candidates.size());
    for (Index f = 0; f < k; ++f) {
        if (f > 0) {
            double total = 0.0;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (!chosen[c]) total += mind[c] * mind[c];
            }
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double acc = 0.0;
                pick = candidates.size();
                for (std::size_t c = 0; c < candidates.size(); ++c) {
                    if (chosen[c] || mind[c] == 0.0) continue;
                    acc += mind[c] * mind[c];
                    pick = c;
                    if (acc > target) break;
                }
            } else {
                // All remaining rows coincide with chosen ones; fall back to a uniform pick.
                std::vector<std::size_t> rest;
                for (std::size_t c = 0; c < candidates.size(); ++c) {
                    if (!chosen[c]) rest.push_back(c);
                }
                pick = rest[rng.below(rest.size())];
            }
        }
        chosen[pick] = true;
        const auto row = x.row(candidates[pick]);
        set_prototype_from_row(protos, f, row);
        const double self = std::sqrt(row.squared_norm());
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const auto other = x.row(candidates[c]);
            const double dot = sparse_dot(other, row) / (self * std::sqrt(other.squared_norm()));
            mind[c] = std::min(mind[c], clamp_dissimilarity(1.0 - dot));
        }
    }
    return Prototypes(std::move(protos));
}

FitResult fit(const SparseDocMatrix& x, const FuzzyParams& params, Exec exec) {
    params.validate(x.rows());
    require_unit_rows(x);
    FitResult best = fit_once(x, params, params.seed, exec);
    for (int r = 1; r < params.n_restarts; ++r) {
        FitResult cand = fit_once(x, params, params.seed + static_cast<std::uint64_t>(r), exec);
        if (cand.model.objective_trace.back() < best.model.objective_trace.back()) best = std::move(cand);
    }
    return best;
}

ReducedMatrix reduce(const SparseDocMatrix& x, const FuzzyModel& model, Exec exec) {
    if (x.cols() != model.prototypes.m()) {
        fail(ErrorCode::DimensionMismatch,
             fmt::format("matrix has {} terms, model expects {}", x.cols(), model.prototypes.m()));
    }
    require_unit_rows(x);
    const auto u = update_memberships(x, model.prototypes, model.params.q, exec);
    return {Method::FC, Eigen::MatrixXd(u.values())};
}

double xie_beni(const SparseDocMatrix& x, const Prototypes& v, const MembershipMatrix& u, double q) {
    if (v.k() < 2) fail(ErrorCode::InvalidParams, "Xie-Beni index needs k >= 2");
    double separation = std::numeric_limits<double>::infinity();
    for (Index f = 0; f < v.k(); ++f) {
        for (Index g = f + 1; g < v.k(); ++g) {
            const double dot = v.term_major().col(f).dot(v.term_major().col(g));
            separation = std::min(separation, clamp_dissimilarity(1.0 - dot));
        }
    }
    if (separation < 1e-12) fail(ErrorCode::IdenticalPrototypes, "two prototypes coincide");
    return objective(x, v, u, q, Exec::Serial) / (static_cast<double>(x.rows()) * separation);
}

void write_model_dump(std::ostream& os, const FuzzyModel& model) {
    const auto& p = model.prototypes.term_major();
    fmt::print(os, "{} {} {}\n", model.prototypes.k(), model.prototypes.m(), model.params.q);
    for (Index f = 0; f < p.cols(); ++f) {
        for (Index i = 0; i < p.rows(); ++i) {
            if (p(i, f) != 0.0) fmt::print(os, "{} {} {}\n", f, i, p(i, f));
        }
    }
}

FuzzyModel read_model_dump(std::istream& is) {
    Index k = 0;
    Index m = 0;
    std::string q;
    if (!(is >> k >> m >> q) || k < 1 || m < 1) fail(ErrorCode::ParseError, "bad model dump header");
    FuzzyModel model;
    model.params.k = k;
    model.params.q = std::stod(q);
    RowMatrix p = RowMatrix::Zero(m, k);
    Index f = 0;
    Index i = 0;
    std::string v;
    while (is >> f >> i >> v) {
        if (f < 0 || f >= k || i < 0 || i >= m) fail(ErrorCode::ParseError, "model dump entry out of range");
        p(i, f) = std::stod(v);
    }
    model.prototypes = Prototypes(std::move(p));
    return model;
}

}  // namespace fdr::fuzzy
