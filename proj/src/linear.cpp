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

#include "fuzzydr/linear.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/SVD>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fuzzydr/error.hpp"
#include "fuzzydr/rng.hpp"

namespace fdr::linear {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> as_span(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Presents A or A^T so that the right-hand dimension is the smaller one.
class Oriented {
public:
    explicit Oriented(const LinearOperator& a) : a_(a), flipped_(a.cols() > a.rows()) {}

    bool flipped() const { return flipped_; }
    Index rows() const { return flipped_ ? a_.cols() : a_.rows(); }
    Index cols() const { return flipped_ ? a_.rows() : a_.cols(); }

    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.resize(rows());
        flipped_ ? a_.apply_transpose(as_span(x), as_span(y)) : a_.apply(as_span(x), as_span(y));
    }
    void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.resize(cols());
        flipped_ ? a_.apply(as_span(x), as_span(y)) : a_.apply_transpose(as_span(x), as_span(y));
    }

private:
    const LinearOperator& a_;
    bool flipped_;
};

/// Two passes of classical Gram-Schmidt against the first `count` columns of `basis`.
void reorthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Index count) {
    if (count == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = basis.leftCols(count).transpose() * v;
        v.noalias() -= basis.leftCols(count) * c;
    }
}

Eigen::VectorXd random_orthogonal(Rng& rng, const Eigen::MatrixXd& basis, Index count) {
    Eigen::VectorXd v(basis.rows());
    for (int attempt = 0; attempt < 8; ++attempt) {
        for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
        reorthogonalize(v, basis, count);
        const double norm = v.norm();
        if (norm > 1e-8) return v / norm;
    }
    fail(ErrorCode::ConvergenceFailure, "could not extend the Lanczos basis");
}

struct SmallSvd {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
};

SmallSvd small_svd(const Eigen::MatrixXd& b) {
    if (b.rows() <= 100) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
        return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

void zero_trailing(SvdFactors& f) {
    if (f.s.size() == 0) return;
    const double cutoff = 1e-12 * f.s(0);
    for (Index i = 0; i < f.s.size(); ++i) {
        if (f.s(i) < cutoff || f.s(i) == 0.0) {
            f.s(i) = 0.0;
            f.rank_deficient = true;
        }
    }
}

kernels::RowMatrix masked_right_vectors(const SvdFactors& f) {
    kernels::RowMatrix v = f.vt.transpose();
    for (Index i = 0; i < f.s.size(); ++i) {
        if (f.s(i) == 0.0) v.col(i).setZero();
    }
    return v;
}

}  // namespace

SparseOperator::SparseOperator(const SparseDocMatrix& x, Exec exec) : x_(x), xt_(x.transpose()), exec_(exec) {}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const { kernels::spmv(exec_, x_, x, y); }

void SparseOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
    kernels::spmv(exec_, xt_, x, y);
}

CenteredSparseOperator::CenteredSparseOperator(const SparseDocMatrix& x, std::vector<double> mean, Exec exec)
    : inner_(x, exec), mean_(std::move(mean)) {
    if (static_cast<Index>(mean_.size()) != x.cols()) fail(ErrorCode::DimensionMismatch, "mean length differs from cols");
}

void CenteredSparseOperator::apply(std::span<const double> x, std::span<double> y) const {
    inner_.apply(x, y);
    double shift = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) shift += mean_[i] * x[i];
    for (auto& v : y) v -= shift;
}

void CenteredSparseOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
    inner_.apply_transpose(x, y);
    double total = 0.0;
    for (const double v : x) total += v;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= mean_[i] * total;
}

void DenseOperator::apply(std::span<const double> x, std::span<double> y) const {
    Eigen::Map<Eigen::VectorXd>(y.data(), a_.rows()).noalias() =
        a_ * Eigen::Map<const Eigen::VectorXd>(x.data(), a_.cols());
}

void DenseOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
    Eigen::Map<Eigen::VectorXd>(y.data(), a_.cols()).noalias() =
        a_.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), a_.rows());
}

void canonicalize_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& vt) {
    for (Index i = 0; i < vt.rows(); ++i) {
        Index arg = 0;
        for (Index c = 1; c < vt.cols(); ++c) {
            if (std::abs(vt(i, c)) > std::abs(vt(i, arg))) arg = c;
        }
        if (vt(i, arg) < 0.0) {
            vt.row(i) *= -1.0;
            u.col(i) *= -1.0;
        }
    }
}

SvdFactors truncated_svd(const LinearOperator& a, Index k, std::uint64_t seed, const SvdOptions& opts) {
    const Index min_dim = std::min(a.rows(), a.cols());
    if (k < 1 || k > min_dim) fail(ErrorCode::InvalidK, fmt::format("k = {} outside [1, {}]", k, min_dim));

    const Oriented op(a);
    const Index n = op.rows();
    const Index m = op.cols();
    const Index w = opts.work > 0 ? std::clamp<Index>(opts.work, k, m) : std::min<Index>(m, 2 * k + 10);

    Rng rng(seed);
    Eigen::MatrixXd v_basis = Eigen::MatrixXd::Zero(m, w);
    Eigen::MatrixXd p_basis = Eigen::MatrixXd::Zero(n, w);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(w, w);
    v_basis.col(0) = random_orthogonal(rng, v_basis, 0);

    Eigen::VectorXd p;
    Eigen::VectorXd r;
    Eigen::VectorXd residual;
    double residual_norm = 0.0;
    double scale = 0.0;
    Index start = 0;
    SmallSvd small;

    for (int restart = 0;; ++restart) {
        for (Index j = start; j < w; ++j) {
            op.apply(v_basis.col(j), p);
            if (j > 0) p.noalias() -= p_basis.leftCols(j) * b.col(j).head(j);
            reorthogonalize(p, p_basis, j);
            double alpha = p.norm();
            scale = std::max(scale, alpha);
            if (alpha <= 1e-14 * scale || alpha == 0.0) {
                p = random_orthogonal(rng, p_basis, j);
                alpha = 0.0;
            } else {
                p /= alpha;
            }
            p_basis.col(j) = p;
            b(j, j) = alpha;

            op.apply_transpose(p, r);
            r.noalias() -= alpha * v_basis.col(j);
            reorthogonalize(r, v_basis, j + 1);
            double beta = r.norm();
            scale = std::max(scale, beta);
            const bool breakdown = beta <= 1e-14 * scale || beta == 0.0;
            if (j + 1 < w) {
                if (breakdown) {
                    v_basis.col(j + 1) = random_orthogonal(rng, v_basis, j + 1);
                    beta = 0.0;
                } else {
                    v_basis.col(j + 1) = r / beta;
                }
                b(j, j + 1) = beta;
            } else {
                residual_norm = breakdown ? 0.0 : beta;
                residual = breakdown ? Eigen::VectorXd() : Eigen::VectorXd(r / beta);
            }
        }

        small = small_svd(b);
        const double top = small.s(0);
        bool converged = true;
        double worst = 0.0;
        for (Index i = 0; i < k; ++i) {
            const double res = residual_norm * std::abs(small.u(w - 1, i));
            worst = std::max(worst, res);
            if (res > opts.tol * top) converged = false;
        }
        if (top == 0.0) converged = true;
        if (converged) {
            SvdFactors out;
            out.restarts = restart;
            out.s = small.s.head(k);
            Eigen::MatrixXd left = p_basis * small.u.leftCols(k);
            Eigen::MatrixXd right = v_basis * small.v.leftCols(k);
            if (op.flipped()) std::swap(left, right);
            out.u = std::move(left);
            out.vt = right.transpose();
            zero_trailing(out);
            canonicalize_signs(out.u, out.vt);
            return out;
        }
        if (restart + 1 >= opts.max_restarts) {
            fail(ErrorCode::ConvergenceFailure,
                 fmt::format("no convergence after {} restarts; worst residual {:.3e} (top value {:.6e})",
                             opts.max_restarts, worst, top));
        }

        // Thick restart: keep the k leading Ritz pairs plus the residual direction.
        const Eigen::MatrixXd v_keep = v_basis * small.v.leftCols(k);
        const Eigen::MatrixXd p_keep = p_basis * small.u.leftCols(k);
        v_basis.leftCols(k) = v_keep;
        p_basis.leftCols(k) = p_keep;
        b.setZero();
        for (Index i = 0; i < k; ++i) {
            b(i, i) = small.s(i);
            if (k < w) b(i, k) = residual_norm * small.u(w - 1, i);
        }
        if (k < w) {
            if (residual_norm > 0.0) {
                Eigen::VectorXd next = residual;
                reorthogonalize(next, v_basis, k);
                v_basis.col(k) = next / next.norm();
            } else {
                v_basis.col(k) = random_orthogonal(rng, v_basis, k);
            }
        }
        start = k;
    }
}

SvdFactors truncated_svd(const SparseDocMatrix& x, Index k, std::uint64_t seed, const SvdOptions& opts, Exec exec) {
    return truncated_svd(SparseOperator(x, exec), k, seed, opts);
}

ReducedMatrix SvdModel::transform(const SparseDocMatrix& x, Exec exec) const {
    if (x.cols() != m()) fail(ErrorCode::DimensionMismatch, fmt::format("matrix has {} columns, model {}", x.cols(), m()));
    kernels::RowMatrix out;
    kernels::spmm(exec, x, v_, out);
    return {Method::SVD, Eigen::MatrixXd(out)};
}

SvdReduction svd_reduce(const SparseDocMatrix& x, Index k, std::uint64_t seed, const SvdOptions& opts, Exec exec) {
    SvdReduction out;
    out.factors = truncated_svd(x, k, seed, opts, exec);
    out.model = SvdModel(masked_right_vectors(out.factors));
    out.features.method = Method::SVD;
    out.features.values = out.factors.u * out.factors.s.asDiagonal();
    return out;
}

PcaModel::PcaModel(Eigen::VectorXd mean, kernels::RowMatrix loadings)
    : mean_(std::move(mean)), loadings_(std::move(loadings)) {
    mean_scores_ = mean_.transpose() * loadings_;
}

ReducedMatrix PcaModel::transform(const SparseDocMatrix& x, Exec exec) const {
    if (x.cols() != m()) fail(ErrorCode::DimensionMismatch, fmt::format("matrix has {} columns, model {}", x.cols(), m()));
    kernels::RowMatrix out;
    kernels::spmm(exec, x, loadings_, out);
    out.rowwise() -= mean_scores_;
    return {Method::PCA, Eigen::MatrixXd(out)};
}

PcaReduction pca_reduce(const SparseDocMatrix& x, Index k, std::uint64_t seed, const SvdOptions& opts, Exec exec) {
    const Index limit = std::min(x.rows() - 1, x.cols());
    if (k < 1 || k > limit) fail(ErrorCode::InvalidK, fmt::format("PCA k = {} outside [1, {}]", k, limit));
    std::vector<double> mean = x.column_means();
    const CenteredSparseOperator op(x, mean, exec);
    SvdFactors f = truncated_svd(op, k, seed, opts);

    PcaReduction out;
    out.factors.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Index>(mean.size()));
    out.factors.components = f.vt;
    out.factors.scores = f.u * f.s.asDiagonal();
    out.factors.singular_values = f.s;
    out.factors.rank_deficient = f.rank_deficient;
    out.model = PcaModel(out.factors.mean, masked_right_vectors(f));
    out.features = {Method::PCA, out.factors.scores};
    return out;
}

void write_factor_dump(std::ostream& os, Method method, const SvdFactors& f) {
    const auto dense = [&](const Eigen::MatrixXd& m) {
        fmt::print(os, "{} {} {}\n", m.rows(), m.cols(), m.size());
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) fmt::print(os, "{} {} {}\n", i, j, m(i, j));
        }
    };
    fmt::print(os, "# {} {}\n", to_string(method), f.s.size());
    dense(f.u);
    dense(Eigen::MatrixXd(f.s.transpose()));
    dense(f.vt);
}

}  // namespace fdr::linear
