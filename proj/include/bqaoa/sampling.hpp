// Copyright 2026 The bqaoa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "common.hpp"

#include <numeric>

namespace bqaoa {

/// Latin hypercube design: in every dimension the n points occupy the n
/// equal-width strata of the interval exactly once, uniform within a stratum.
/// Returned as an n x d matrix, one point per row.
inline Matrix latin_hypercube(int n, const Bounds &bounds, Rng &rng) {
    if (n < 1) {
        throw std::invalid_argument("latin_hypercube: n must be >= 1");
    }
    validate_bounds(bounds);
    const auto d = static_cast<Eigen::Index>(bounds.size());
    Matrix pts(n, d);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        shuffle(perm, rng);
        const auto &iv = bounds[static_cast<std::size_t>(j)];
        const double w = iv.width() / n;
        for (int i = 0; i < n; ++i) {
            const double x = iv.lo + w * (perm[static_cast<std::size_t>(i)] + uniform01(rng));
            pts(i, j) = std::min(x, iv.hi);
        }
    }
    return pts;
}

} // namespace bqaoa
