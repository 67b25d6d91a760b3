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
#include <iosfwd>
#include <span>
#include <vector>

namespace fdr {

using Index = std::int64_t;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Read-only view of one compressed row.
struct SparseRow {
    std::span<const Index> cols;
    std::span<const double> values;

    std::size_t size() const { return cols.size(); }
    bool empty() const { return cols.empty(); }
    double squared_norm() const;
};

/**
 * Compressed sparse row matrix of document-term values.
 *
 * Every stored value is strictly positive and column ids are strictly
 * increasing within a row. Rows may be empty. Immutable once built.
 */
class SparseDocMatrix {
public:
    SparseDocMatrix() : row_ptr_(1, 0) {}

    /// Takes ownership of CSR arrays; throws InvalidParams if they break the invariants.
    SparseDocMatrix(Index n_rows, Index n_cols, std::vector<std::size_t> row_ptr,
                    std::vector<Index> cols, std::vector<double> values);

    /// Builds from unordered triplets. Duplicates are summed; zeros are dropped.
    static SparseDocMatrix from_triplets(Index n_rows, Index n_cols, std::vector<Triplet> triplets);

    Index rows() const { return n_rows_; }
    Index cols() const { return n_cols_; }
    std::size_t nnz() const { return values_.size(); }

    SparseRow row(Index j) const {
        const auto b = row_ptr_[static_cast<std::size_t>(j)];
        const auto e = row_ptr_[static_cast<std::size_t>(j) + 1];
        return {std::span<const Index>(cols_).subspan(b, e - b),
                std::span<const double>(values_).subspan(b, e - b)};
    }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<Index>& col_indices() const { return cols_; }
    const std::vector<double>& values() const { return values_; }

    /// Transposed copy (m x n), i.e. the CSC form of this matrix.
    SparseDocMatrix transpose() const;

    /// Rows picked in the given order; columns unchanged.
    SparseDocMatrix select_rows(std::span<const Index> rows) const;

    std::vector<double> column_means() const;

    bool operator==(const SparseDocMatrix& other) const = default;

private:
    Index n_rows_ = 0;
    Index n_cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<Index> cols_;
    std::vector<double> values_;
};

/// Every non-empty row scaled to unit Euclidean norm; empty rows untouched.
SparseDocMatrix l2_normalize_rows(const SparseDocMatrix& x);

/// True if each row is empty or has unit norm within `tol`.
bool rows_unit_or_empty(const SparseDocMatrix& x, double tol = 1e-9);

// ASCII dump: header "n m nnz", then "row col value" triples sorted by (row, col).
void write_matrix_dump(std::ostream& os, const SparseDocMatrix& x);
SparseDocMatrix read_matrix_dump(std::istream& is);

}  // namespace fdr
