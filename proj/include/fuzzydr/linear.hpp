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

#include <Eigen/Core>

#include "fuzzydr/kernels.hpp"
#include "fuzzydr/reduced.hpp"
#include "fuzzydr/sparse.hpp"

/// Truncated SVD and PCA baselines on sparse input.
namespace fdr::linear {

using kernels::Exec;

/// Matrix-free operator; the decomposition only ever sees products.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    /// y = A x
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    /// y = A^T x
    virtual void apply_transpose(std::span<const double> x, std::span<double> y) const = 0;
};

class SparseOperator final : public LinearOperator {
public:
    explicit SparseOperator(const SparseDocMatrix& x, Exec exec = Exec::Parallel);

    Index rows() const override { return x_.rows(); }
    Index cols() const override { return x_.cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

private:
    const SparseDocMatrix& x_;
    SparseDocMatrix xt_;
    Exec exec_;
};

/// X - 1 mean^T, applied implicitly: the centered matrix is never formed.
class CenteredSparseOperator final : public LinearOperator {
public:
    CenteredSparseOperator(const SparseDocMatrix& x, std::vector<double> mean, Exec exec = Exec::Parallel);

    Index rows() const override { return inner_.rows(); }
    Index cols() const override { return inner_.cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;
    const std::vector<double>& mean() const { return mean_; }

private:
    SparseOperator inner_;
    std::vector<double> mean_;
};

/// Dense wrapper, mostly for tests and small problems.
class DenseOperator final : public LinearOperator {
public:
    explicit DenseOperator(Eigen::MatrixXd a) : a_(std::move(a)) {}

    Index rows() const override { return a_.rows(); }
    Index cols() const override { return a_.cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;

private:
    Eigen::MatrixXd a_;
};

struct SvdFactors {
    Eigen::MatrixXd u;   ///< n x k, orthonormal columns
    Eigen::VectorXd s;   ///< k values, non-increasing
    Eigen::MatrixXd vt;  ///< k x m, orthonormal rows
    /// Trailing values below 1e-12 * s(0) were zeroed.
    bool rank_deficient = false;
    int restarts = 0;
};

struct SvdOptions {
    /// Converged when every Ritz residual is below tol * s(0).
    double tol = 1e-10;
    int max_restarts = 500;
    /// Lanczos basis size; 0 picks min(min(n, m), 2k + 10).
    Index work = 0;
};

/**
 * Top-k singular triplets by thick-restarted Golub-Kahan-Lanczos
 * bidiagonalization with full reorthogonalization. The result is sign
 * canonicalized (see canonicalize_signs) and deterministic for a fixed seed.
 *
 * Throws InvalidK unless 1 <= k <= min(n, m), and ConvergenceFailure when the
 * restart budget runs out.
 */
SvdFactors truncated_svd(const LinearOperator& a, Index k, std::uint64_t seed, const SvdOptions& opts = {});
SvdFactors truncated_svd(const SparseDocMatrix& x, Index k, std::uint64_t seed, const SvdOptions& opts = {},
                         Exec exec = Exec::Parallel);

/// Flips each triplet so the largest-magnitude entry of its right vector is positive.
void canonicalize_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& vt);

/// Frozen projection onto the leading right singular vectors.
class SvdModel {
public:
    SvdModel() = default;
    /// `v` is m x k; zero columns stand for dropped directions.
    explicit SvdModel(kernels::RowMatrix v) : v_(std::move(v)) {}

    Index k() const { return v_.cols(); }
    Index m() const { return v_.rows(); }
    const kernels::RowMatrix& v() const { return v_; }
    /// x V
    ReducedMatrix transform(const SparseDocMatrix& x, Exec exec = Exec::Parallel) const;

private:
    kernels::RowMatrix v_;
};

struct SvdReduction {
    SvdFactors factors;
    SvdModel model;
    /// U diag(S) for the training rows.
    ReducedMatrix features;
};

SvdReduction svd_reduce(const SparseDocMatrix& x, Index k, std::uint64_t seed, const SvdOptions& opts = {},
                        Exec exec = Exec::Parallel);

struct PcaFactors {
    Eigen::VectorXd mean;        ///< column means
    Eigen::MatrixXd components;  ///< k x m, orthonormal rows
    Eigen::MatrixXd scores;      ///< n x k
    Eigen::VectorXd singular_values;
    bool rank_deficient = false;
};

class PcaModel {
public:
    PcaModel() = default;
    PcaModel(Eigen::VectorXd mean, kernels::RowMatrix loadings);

    Index k() const { return loadings_.cols(); }
    Index m() const { return loadings_.rows(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    /// m x k, transposed components with dropped directions zeroed.
    const kernels::RowMatrix& loadings() const { return loadings_; }
    /// (x - mean) P^T, computed as x P^T - mean P^T.
    ReducedMatrix transform(const SparseDocMatrix& x, Exec exec = Exec::Parallel) const;

private:
    Eigen::VectorXd mean_;
    kernels::RowMatrix loadings_;
    Eigen::RowVectorXd mean_scores_;
};

struct PcaReduction {
    PcaFactors factors;
    PcaModel model;
    ReducedMatrix features;
};

/// Truncated SVD of the implicitly centered matrix. Needs 1 <= k <= min(n - 1, m).
PcaReduction pca_reduce(const SparseDocMatrix& x, Index k, std::uint64_t seed, const SvdOptions& opts = {},
                        Exec exec = Exec::Parallel);

/// "# <METHOD> <k>" header, then the triples of U, S and Vt as three dumps.
void write_factor_dump(std::ostream& os, Method method, const SvdFactors& f);

}  // namespace fdr::linear
