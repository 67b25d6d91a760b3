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

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fuzzydr/sparse.hpp"

// Hot loops of the fuzzy and linear reducers. Each kernel exists twice: a
// plain serial loop and an OpenMP version. Both call the same per-row body
// and never split a reduction across threads, so their outputs are
// bit-identical for any thread count.
namespace fdr::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Exec { Serial, Parallel };

inline constexpr double kSingularityTol = 1e-12;

/// d[f] = clamp(1 - <x, v_f>, 0, 2) for the k columns of the term-major prototype matrix.
/// An empty row is at dissimilarity 1 from everything.
inline void dissimilarity_row(const SparseRow& x, const RowMatrix& term_protos, std::span<double> d) {
    const auto k = static_cast<std::size_t>(term_protos.cols());
    if (x.empty()) {
        for (auto& v : d) v = 1.0;
        return;
    }
    for (auto& v : d) v = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p) {
        const double xv = x.values[p];
        const double* v = term_protos.data() + static_cast<std::size_t>(x.cols[p]) * k;
        for (std::size_t f = 0; f < k; ++f) d[f] += xv * v[f];
    }
    for (auto& v : d) {
        v = 1.0 - v;
        v = v < 0.0 ? 0.0 : (v > 2.0 ? 2.0 : v);
    }
}

/// Closed-form membership row for fixed prototypes. Mass is split evenly over
/// clusters within `tol` of the document when there are any.
inline void membership_row(std::span<const double> d, double q, double tol, std::span<double> u) {
    const std::size_t k = d.size();
    std::size_t zeros = 0;
    double dmin = d[0];
    for (std::size_t f = 0; f < k; ++f) {
        if (d[f] <= tol) ++zeros;
        dmin = d[f] < dmin ? d[f] : dmin;
    }
    if (zeros > 0) {
        const double share = 1.0 / static_cast<double>(zeros);
        for (std::size_t f = 0; f < k; ++f) u[f] = d[f] <= tol ? share : 0.0;
        return;
    }
    const double e = 1.0 / (q - 1.0);
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
        u[f] = std::pow(dmin / d[f], e);
        sum += u[f];
    }
    for (std::size_t f = 0; f < k; ++f) u[f] /= sum;
}

namespace serial {

/// n x k dissimilarities of the rows of `x` to the prototypes (term_protos is m x k).
void dissimilarities(const SparseDocMatrix& x, const RowMatrix& term_protos, RowMatrix& d);
void memberships(const RowMatrix& d, double q, double tol, RowMatrix& u);
/// Per-document objective terms sum_f u^q d.
void objective_terms(const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& terms);
/// out (m x k) = x^T (m x n) * weights (n x k) for the document matrix x.
void weighted_sums(const SparseDocMatrix& x, const RowMatrix& weights, RowMatrix& out);
/// out = a * b for a sparse a.
void spmm(const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out);
void spmv(const SparseDocMatrix& a, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace parallel {

void dissimilarities(const SparseDocMatrix& x, const RowMatrix& term_protos, RowMatrix& d);
void memberships(const RowMatrix& d, double q, double tol, RowMatrix& u);
void objective_terms(const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& terms);
void weighted_sums(const SparseDocMatrix& x, const RowMatrix& weights, RowMatrix& out);
void spmm(const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out);
void spmv(const SparseDocMatrix& a, std::span<const double> x, std::span<double> y);

}  // namespace parallel

// Dispatching front-ends.
void dissimilarities(Exec exec, const SparseDocMatrix& x, const RowMatrix& term_protos, RowMatrix& d);
void memberships(Exec exec, const RowMatrix& d, double q, double tol, RowMatrix& u);
void objective_terms(Exec exec, const RowMatrix& d, const RowMatrix& u, double q, std::vector<double>& terms);
void weighted_sums(Exec exec, const SparseDocMatrix& x, const RowMatrix& weights, RowMatrix& out);
void spmm(Exec exec, const SparseDocMatrix& a, const RowMatrix& b, RowMatrix& out);
void spmv(Exec exec, const SparseDocMatrix& a, std::span<const double> x, std::span<double> y);

/// Sequential left-to-right sum; the only reduction order used for objectives.
double ordered_sum(std::span<const double> v);

}  // namespace fdr::kernels
