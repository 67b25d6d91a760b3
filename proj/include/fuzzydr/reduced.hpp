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

#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace fdr {

enum class Method { FC, PCA, SVD };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

/// Dense n x k document features produced by any reducer.
struct ReducedMatrix {
    Method method = Method::FC;
    Eigen::MatrixXd values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

// Same triple format as the sparse matrix dump, but every entry is written
// (values may be zero or negative), preceded by "# <METHOD> <k>".
void write_reduced_dump(std::ostream& os, const ReducedMatrix& r);
ReducedMatrix read_reduced_dump(std::istream& is);

}  // namespace fdr
