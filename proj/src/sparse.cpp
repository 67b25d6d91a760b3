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

#include "fuzzydr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fuzzydr/error.hpp"

namespace fdr {

double SparseRow::squared_norm() const {
    double s = 0.0;
    for (const double v : values) s += v * v;
    return s;
}

SparseDocMatrix::SparseDocMatrix(Index n_rows, Index n_cols, std::vector<std::size_t> row_ptr,
                                 std::vector<Index> cols, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      values_(std::move(values)) {
    if (n_rows_ < 0 || n_cols_ < 0) fail(ErrorCode::InvalidParams, "negative matrix shape");
    if (row_ptr_.size() != static_cast<std::size_t>(n_rows_) + 1 || row_ptr_.front() != 0 ||
        row_ptr_.back() != cols_.size() || cols_.size() != values_.size()) {
        fail(ErrorCode::InvalidParams, "inconsistent CSR arrays");
    }
    for (Index j = 0; j < n_rows_; ++j) {
        const auto b = row_ptr_[j];
        const auto e = row_ptr_[j + 1];
        if (e < b) fail(ErrorCode::InvalidParams, "row pointers must be non-decreasing");
        for (auto p = b; p < e; ++p) {
            if (cols_[p] < 0 || cols_[p] >= n_cols_) {
                fail(ErrorCode::InvalidParams, fmt::format("column {} out of range in row {}", cols_[p], j));
            }
            if (p > b && cols_[p] <= cols_[p - 1]) {
                fail(ErrorCode::InvalidParams, fmt::format("columns not strictly increasing in row {}", j));
            }
            if (!(values_[p] > 0.0) || !std::isfinite(values_[p])) {
                fail(ErrorCode::InvalidParams, fmt::format("non-positive stored value in row {}", j));
            }
        }
    }
}

SparseDocMatrix SparseDocMatrix::from_triplets(Index n_rows, Index n_cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> row_ptr(static_cast<std::size_t>(std::max<Index>(n_rows, 0)) + 1, 0);
    std::vector<Index> cols;
    std::vector<double> values;
    cols.reserve(triplets.size());
    values.reserve(triplets.size());
    for (std::size_t t = 0; t < triplets.size();) {
        const Triplet& head = triplets[t];
        if (head.row < 0 || head.row >= n_rows) {
            fail(ErrorCode::InvalidParams, fmt::format("row {} out of range", head.row));
        }
        double sum = 0.0;
        std::size_t u = t;
        for (; u < triplets.size() && triplets[u].row == head.row && triplets[u].col == head.col; ++u) {
            sum += triplets[u].value;
        }
        if (sum != 0.0) {
            cols.push_back(head.col);
            values.push_back(sum);
            ++row_ptr[static_cast<std::size_t>(head.row) + 1];
        }
        t = u;
    }
    for (std::size_t j = 1; j < row_ptr.size(); ++j) row_ptr[j] += row_ptr[j - 1];
    return SparseDocMatrix(n_rows, n_cols, std::move(row_ptr), std::move(cols), std::move(values));
}

SparseDocMatrix SparseDocMatrix::transpose() const {
    std::vector<std::size_t> ptr(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (const Index c : cols_) ++ptr[static_cast<std::size_t>(c) + 1];
    for (std::size_t i = 1; i < ptr.size(); ++i) ptr[i] += ptr[i - 1];
    std::vector<std::size_t> cursor(ptr.begin(), ptr.end() - 1);
    std::vector<Index> rows(cols_.size());
    std::vector<double> vals(values_.size());
    for (Index j = 0; j < n_rows_; ++j) {
        for (auto p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) {
            const auto dst = cursor[static_cast<std::size_t>(cols_[p])]++;
            rows[dst] = j;
            vals[dst] = values_[p];
        }
    }
    return SparseDocMatrix(n_cols_, n_rows_, std::move(ptr), std::move(rows), std::move(vals));
}

SparseDocMatrix SparseDocMatrix::select_rows(std::span<const Index> rows) const {
    std::vector<std::size_t> ptr{0};
    std::vector<Index> cols;
    std::vector<double> vals;
    ptr.reserve(rows.size() + 1);
    for (const Index j : rows) {
        if (j < 0 || j >= n_rows_) fail(ErrorCode::InvalidParams, fmt::format("row {} out of range", j));
        const auto r = row(j);
        cols.insert(cols.end(), r.cols.begin(), r.cols.end());
        vals.insert(vals.end(), r.values.begin(), r.values.end());
        ptr.push_back(cols.size());
    }
    return SparseDocMatrix(static_cast<Index>(rows.size()), n_cols_, std::move(ptr), std::move(cols),
                           std::move(vals));
}

std::vector<double> SparseDocMatrix::column_means() const {
    std::vector<double> mean(static_cast<std::size_t>(n_cols_), 0.0);
    for (std::size_t p = 0; p < cols_.size(); ++p) mean[static_cast<std::size_t>(cols_[p])] += values_[p];
    if (n_rows_ > 0) {
        for (double& v : mean) v /= static_cast<double>(n_rows_);
    }
    return mean;
}

SparseDocMatrix l2_normalize_rows(const SparseDocMatrix& x) {
    std::vector<double> vals = x.values();
    const auto& ptr = x.row_ptr();
    for (Index j = 0; j < x.rows(); ++j) {
        const double norm = std::sqrt(x.row(j).squared_norm());
        if (norm == 0.0) continue;
        for (auto p = ptr[j]; p < ptr[j + 1]; ++p) vals[p] /= norm;
    }
    return SparseDocMatrix(x.rows(), x.cols(), x.row_ptr(), x.col_indices(), std::move(vals));
}

bool rows_unit_or_empty(const SparseDocMatrix& x, double tol) {
    for (Index j = 0; j < x.rows(); ++j) {
        const auto r = x.row(j);
        if (r.empty()) continue;
        if (std::abs(std::sqrt(r.squared_norm()) - 1.0) > tol) return false;
    }
    return true;
}

void write_matrix_dump(std::ostream& os, const SparseDocMatrix& x) {
    fmt::print(os, "{} {} {}\n", x.rows(), x.cols(), x.nnz());
    for (Index j = 0; j < x.rows(); ++j) {
        const auto r = x.row(j);
        for (std::size_t p = 0; p < r.size(); ++p) fmt::print(os, "{} {} {}\n", j, r.cols[p], r.values[p]);
    }
}

SparseDocMatrix read_matrix_dump(std::istream& is) {
    Index n = 0;
    Index m = 0;
    std::size_t nnz = 0;
    if (!(is >> n >> m >> nnz)) fail(ErrorCode::ParseError, "missing matrix dump header");
    std::vector<Triplet> triplets;
    triplets.reserve(nnz);
    for (std::size_t t = 0; t < nnz; ++t) {
        Triplet tr{};
        std::string value;
        if (!(is >> tr.row >> tr.col >> value)) {
            fail(ErrorCode::ParseError, fmt::format("matrix dump truncated at entry {}", t));
        }
        tr.value = std::stod(value);
        if (tr.col < 0 || tr.col >= m) fail(ErrorCode::ParseError, fmt::format("column out of range at entry {}", t));
        triplets.push_back(tr);
    }
    try {
        return SparseDocMatrix::from_triplets(n, m, std::move(triplets));
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, e.what());
    }
}

}  // namespace fdr
