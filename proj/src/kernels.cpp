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

#include "fuzzydr/kernels.hpp"

#include <cmath>
#include <algorithm>
#include <cstdint>

#include <omp.h>

#include "fuzzydr/error.hpp"

namespace fdr::kernels {

namespace {

template <bool Parallel, typename Body>
void for_each_row(Index n, Body&& body) {
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < n; ++j) body(j);
    } else {
        for (std::int64_t j = 0; j < n; ++j) body(j);
    }
}

std::span<double> row_span(RowMatrix& m, Index j) {
    return {m.data() + j * m.cols(), static_cast<std::size_t>(m.cols())};
}

std::span<const double> row_span(const RowMatrix& m, Index j) {
    return {m.data() + j * m.cols(), static_cast<std::size_t>(m.cols())};
}

template <bool P>
void dissimilarities_impl(const SparseDocMatrix& x, const RowMatrix& term_protos, RowMatrix& d) {
    if (term_protos.rows() != x.cols()) fail(ErrorCode::DimensionMismatch, "prototype length differs from term count");
    d.resize(x.rows(), term_protos.cols());
    for_each_row<P>(x.rows(), [&](Index j) { dissimilarity_row(x.row(j), term_protos, row_span(d, j)); });
}

template <bool P>
void memberships_impl(const RowMatrix& d, double q, double tol, RowMatrix& u) {
    u.resize(d.rows(), d.cols());
    for_each_row<P>(d.rows(), [&](Index j) { membership_row(row_span(d, j), q, tol, row_span(u, j)); });
}

template <bool P>
void objective_terms_impl(const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& terms) {
    terms.assign(static_cast<std::size_t>(d.rows()), 0.0);
    for_each_row<P>(d.rows(), [&](Index j) {
        double s = 0.0;
        for (Index f = 0; f < d.cols(); ++f) s += std::pow(u(j, f), q) * d(j, f);
        terms[static_cast<std::size_t>(j)] = s;
    });
}

template <bool P>
void spmm_impl(const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out) {
    if (b.rows() != a.cols()) fail(ErrorCode::DimensionMismatch, "spmm inner dimensions differ");
    out.setZero(a.rows(), b.cols());
    const auto k = static_cast<std::size_t>(b.cols());
    for_each_row<P>(a.rows(), [&](Index j) {
        const auto r = a.row(j);
        double* dst = out.data() + static_cast<std::size_t>(j) * k;
        for (std::size_t p = 0; p < r.size(); ++p) {
            const double av = r.values[p];
            const double* src = b.data() + static_cast<std::size_t>(r.cols[p]) * k;
            for (std::size_t f = 0; f < k; ++f) dst[f] += av * src[f];
        }
    });
}

// Scatter in document order: each weight row is read once and contiguously, so
// the cost stays linear in n once the weights no longer fit in cache. Every
// output entry accumulates documents in ascending order, whatever the blocking.
template <bool P>
void weighted_sums_impl(const SparseDocMatrix& x, const RowMatrix& w, RowMatrix& out) {
    if (w.rows() != x.rows()) fail(ErrorCode::DimensionMismatch, "weight rows differ from document count");
    out.setZero(x.cols(), w.cols());
    const auto k = static_cast<std::size_t>(w.cols());
    const auto scatter = [&](std::size_t f0, std::size_t f1) {
        for (Index j = 0; j < x.rows(); ++j) {
            const auto r = x.row(j);
            const double* src = w.data() + static_cast<std::size_t>(j) * k;
            for (std::size_t p = 0; p < r.size(); ++p) {
                const double xv = r.values[p];
                double* dst = out.data() + static_cast<std::size_t>(r.cols[p]) * k;
                for (std::size_t f = f0; f < f1; ++f) dst[f] += xv * src[f];
            }
        }
    };
    if constexpr (P) {
        const auto blocks = static_cast<std::int64_t>(std::min<std::size_t>(k, static_cast<std::size_t>(omp_get_max_threads())));
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < blocks; ++b) {
            const auto ub = static_cast<std::size_t>(b);
            const auto nb = static_cast<std::size_t>(blocks);
            scatter(ub * k / nb, (ub + 1) * k / nb);
        }
    } else {
        scatter(0, k);
    }
}

template <bool P>
void spmv_impl(const SparseDocMatrix& a, std::span<const double> x, std::span<double> y) {
    if (static_cast<Index>(x.size()) != a.cols() || static_cast<Index>(y.size()) != a.rows()) {
        fail(ErrorCode::DimensionMismatch, "spmv shape mismatch");
    }
    for_each_row<P>(a.rows(), [&](Index j) {
        const auto r = a.row(j);
        double s = 0.0;
        for (std::size_t p = 0; p < r.size(); ++p) s += r.values[p] * x[static_cast<std::size_t>(r.cols[p])];
        y[static_cast<std::size_t>(j)] = s;
    });
}

}  // namespace

namespace serial {
void dissimilarities(const SparseDocMatrix& x, const RowMatrix& p, RowMatrix& d) { dissimilarities_impl<false>(x, p, d); }
void memberships(const RowMatrix& d, double q, double tol, RowMatrix& u) { memberships_impl<false>(d, q, tol, u); }
void objective_terms(const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& t) {
    objective_terms_impl<false>(d, u, q, t);
}
void weighted_sums(const SparseDocMatrix& x, const RowMatrix& w, RowMatrix& out) { weighted_sums_impl<false>(x, w, out); }
void spmm(const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out) { spmm_impl<false>(a, b, out); }
void spmv(const SparseDocMatrix& a, std::span<const double> x, std::span<double> y) { spmv_impl<false>(a, x, y); }
}  // namespace serial

namespace parallel {
void dissimilarities(const SparseDocMatrix& x, const RowMatrix& p, RowMatrix& d) { dissimilarities_impl<true>(x, p, d); }
void memberships(const RowMatrix& d, double q, double tol, RowMatrix& u) { memberships_impl<true>(d, q, tol, u); }
void objective_terms(const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& t) {
    objective_terms_impl<true>(d, u, q, t);
}
void weighted_sums(const SparseDocMatrix& x, const RowMatrix& w, RowMatrix& out) { weighted_sums_impl<true>(x, w, out); }
void spmm(const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out) { spmm_impl<true>(a, b, out); }
void spmv(const SparseDocMatrix& a, std::span<const double> x, std::span<double> y) { spmv_impl<true>(a, x, y); }
}  // namespace parallel

void dissimilarities(Exec exec, const SparseDocMatrix& x, const RowMatrix& p, RowMatrix& d) {
    exec == Exec::Parallel ? parallel::dissimilarities(x, p, d) : serial::dissimilarities(x, p, d);
}
void memberships(Exec exec, const RowMatrix& d, double q, double tol, RowMatrix& u) {
    exec == Exec::Parallel ? parallel::memberships(d, q, tol, u) : serial::memberships(d, q, tol, u);
}
void objective_terms(Exec exec, const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& t) {
    exec == Exec::Parallel ? parallel::objective_terms(d, u, q, t) : serial::objective_terms(d, u, q, t);
}
void weighted_sums(Exec exec, const SparseDocMatrix& x, const RowMatrix& w, RowMatrix& out) {
    exec == Exec::Parallel ? parallel::weighted_sums(x, w, out) : serial::weighted_sums(x, w, out);
}
void spmm(Exec exec, const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out) {
    exec == Exec::Parallel ? parallel::spmm(a, b, out) : serial::spmm(a, b, out);
}
void spmv(Exec exec, const SparseDocMatrix& a, std::span<const double> x, std::span<double> y) {
    exec == Exec::Parallel ? parallel::spmv(a, x, y) : serial::spmv(a, x, y);
}

double ordered_sum(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s;
}

}  // namespace fdr::kernels
