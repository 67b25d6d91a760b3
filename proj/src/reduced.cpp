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

#include "fuzzydr/reduced.hpp"

#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fuzzydr/error.hpp"

namespace fdr {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::FC: return "FC";
        case Method::PCA: return "PCA";
        case Method::SVD: return "SVD";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    if (s == "FC" || s == "fc") return Method::FC;
    if (s == "PCA" || s == "pca") return Method::PCA;
    if (s == "SVD" || s == "svd") return Method::SVD;
    fail(ErrorCode::InvalidParams, "unknown method '" + std::string(s) + "'");
}

void write_reduced_dump(std::ostream& os, const ReducedMatrix& r) {
    fmt::print(os, "# {} {}\n", to_string(r.method), r.cols());
    fmt::print(os, "{} {} {}\n", r.rows(), r.cols(), r.rows() * r.cols());
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
        for (Eigen::Index f = 0; f < r.cols(); ++f) fmt::print(os, "{} {} {}\n", j, f, r.values(j, f));
    }
}

ReducedMatrix read_reduced_dump(std::istream& is) {
    std::string hash;
    std::string method;
    Eigen::Index k = 0;
    if (!(is >> hash >> method >> k) || hash != "#") fail(ErrorCode::ParseError, "missing reduced dump header");
    ReducedMatrix out;
    out.method = parse_method(method);
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    Eigen::Index nnz = 0;
    if (!(is >> n >> m >> nnz) || m != k) fail(ErrorCode::ParseError, "bad reduced dump shape line");
    out.values = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index t = 0; t < nnz; ++t) {
        Eigen::Index j = 0;
        Eigen::Index f = 0;
        std::string v;
        if (!(is >> j >> f >> v) || j < 0 || j >= n || f < 0 || f >= m) {
            fail(ErrorCode::ParseError, fmt::format("reduced dump entry {} invalid", t));
        }
        out.values(j, f) = std::stod(v);
    }
    return out;
}

}  // namespace fdr
