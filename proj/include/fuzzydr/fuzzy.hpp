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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fuzzydr/kernels.hpp"
#include "fuzzydr/reduced.hpp"
#include "fuzzydr/sparse.hpp"

/// Soft spherical k-means: fuzzy c-means on the unit sphere with 1 - cosine as
/// the dissimilarity. The n x k membership matrix is the reduced representation.
namespace fdr::fuzzy {

using kernels::Exec;
using kernels::RowMatrix;

struct FuzzyParams {
    Index k = 2;
    double q = 2.0;
    int max_iterations = 100;
    /// Stop once the objective improves by less than this between iterations.
    double epsilon = 1e-5;
    std::uint64_t seed = 0;
    /// Independent starts with seeds seed, seed+1, ...; the lowest final objective wins.
    int n_restarts = 1;

    /// Throws InvalidParams. `n` is the document count when known.
    void validate(Index n = -1) const;
};

/// Row-stochastic n x k memberships.
class MembershipMatrix {
public:
    MembershipMatrix() = default;
    explicit MembershipMatrix(RowMatrix values) : values_(std::move(values)) {}

    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    double operator()(Index j, Index f) const { return values_(j, f); }
    const RowMatrix& values() const { return values_; }

    bool operator==(const MembershipMatrix& o) const { return values_ == o.values_; }

private:
    RowMatrix values_;
};

/// k unit-norm prototypes stored term-major (m x k) so a sparse row can read
/// all k weights of one term contiguously.
class Prototypes {
public:
    Prototypes() = default;
    explicit Prototypes(RowMatrix term_major) : term_major_(std::move(term_major)) {}
    /// From k rows of length m.
    static Prototypes from_rows(const Eigen::MatrixXd& rows);

    Index k() const { return term_major_.cols(); }
    Index m() const { return term_major_.rows(); }
    const RowMatrix& term_major() const { return term_major_; }
    Eigen::VectorXd vector(Index f) const { return term_major_.col(f); }

    bool operator==(const Prototypes& o) const { return term_major_ == o.term_major_; }

private:
    RowMatrix term_major_;
};

struct FuzzyModel {
    Prototypes prototypes;
    FuzzyParams params;
    std::vector<double> objective_trace;
    bool converged = false;
    int iterations_run = 0;
    /// Prototype re-seeds caused by clusters whose weighted sum vanished.
    int reseeds = 0;
    /// Seed of the restart that produced this model.
    std::uint64_t seed_used = 0;
};

struct FitResult {
    FuzzyModel model;
    MembershipMatrix memberships;
};

/// 1 - <x, v> clamped to [0, 2]; 1 for an empty x.
double cosine_dissimilarity(const SparseRow& x, std::span<const double> v);

MembershipMatrix update_memberships(const SparseDocMatrix& x, const Prototypes& v, double q, Exec exec = Exec::Parallel);

struct PrototypeUpdate {
    Prototypes prototypes;
    /// Clusters re-seeded because all of their weight was numerically zero.
    std::vector<Index> degenerate;
};

PrototypeUpdate update_prototypes(const SparseDocMatrix& x, const MembershipMatrix& u, double q,
                                  Exec exec = Exec::Parallel);

/// sum_f sum_j u_fj^q * D_fj.
double objective(const SparseDocMatrix& x, const Prototypes& v, const MembershipMatrix& u, double q,
                 Exec exec = Exec::Parallel);

/// Seeded D^2-weighted choice of k distinct non-empty rows as initial prototypes.
Prototypes initial_prototypes(const SparseDocMatrix& x, Index k, std::uint64_t seed);

/// Rows of `x` must be unit-norm or empty.
FitResult fit(const SparseDocMatrix& x, const FuzzyParams& params, Exec exec = Exec::Parallel);

/// Memberships of (possibly unseen) unit-norm rows against frozen prototypes.
ReducedMatrix reduce(const SparseDocMatrix& x, const FuzzyModel& model, Exec exec = Exec::Parallel);

/// Compactness over separation; lower is better. Needs k >= 2.
double xie_beni(const SparseDocMatrix& x, const Prototypes& v, const MembershipMatrix& u, double q);

// "k m q" header then "cluster col value" triples for non-zero prototype weights.
void write_model_dump(std::ostream& os, const FuzzyModel& model);
FuzzyModel read_model_dump(std::istream& is);

}  // namespace fdr::fuzzy
