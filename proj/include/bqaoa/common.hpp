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

/**
 * @file
 * Shared vocabulary types: box bounds, the random engine, seed derivation
 * and a few numeric helpers used across modules.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bqaoa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] double clamp(double x) const { return std::clamp(x, lo, hi); }
    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Axis-aligned box, one interval per coordinate.
using Bounds = std::vector<Interval>;

/// Objective over a parameter vector. Minimized unless stated otherwise.
using Objective = std::function<double(std::span<const double>)>;

inline Bounds uniform_bounds(std::size_t dim, Interval iv) {
    return Bounds(dim, iv);
}

inline void validate_bounds(const Bounds &bounds) {
    if (bounds.empty()) {
        throw std::invalid_argument("bounds must have at least one dimension");
    }
    for (const auto &iv : bounds) {
        if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
            throw std::invalid_argument("bounds must be finite with lo < hi");
        }
    }
}

inline void clip_to_bounds(Vector &x, const Bounds &bounds) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = bounds[static_cast<std::size_t>(i)].clamp(x[i]);
    }
}

inline bool inside_bounds(std::span<const double> x, const Bounds &bounds) {
    if (x.size() != bounds.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!bounds[i].contains(x[i])) {
            return false;
        }
    }
    return true;
}

inline std::span<const double> as_span(const Vector &v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vector to_vector(std::span<const double> s) {
    Vector v(static_cast<Eigen::Index>(s.size()));
    std::copy(s.begin(), s.end(), v.data());
    return v;
}

/// SplitMix64 finalizer; used to derive independent, counter-based seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Seed for stream `index` below `parent`. Pure function of its inputs.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index,
                                    Rest... rest) {
    return derive_seed(derive_seed(parent, index), static_cast<std::uint64_t>(rest)...);
}

/// Uniform double in [0, 1) with 53 random bits; independent of the
/// standard library's distribution implementation.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

inline double uniform(Rng &rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n).
inline std::size_t uniform_index(Rng &rng, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index: empty range");
    }
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t r = rng();
    while (r >= limit) {
        r = rng();
    }
    return static_cast<std::size_t>(r % range);
}

/// Standard normal deviate (Marsaglia polar method).
inline double standard_normal(Rng &rng) {
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform01(rng) - 1.0;
        v = 2.0 * uniform01(rng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

template <typename T> void shuffle(std::vector<T> &v, Rng &rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_index(rng, i)]);
    }
}

/// Printf-style "%.12g" formatting used by every CSV writer.
inline std::string format_real(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline double mean_of(std::span<const double> xs) {
    if (xs.empty()) {
        return kNaN;
    }
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation; 0 for fewer than two values.
inline double stddev_of(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double median_of(std::vector<double> xs) {
    if (xs.empty()) {
        return kNaN;
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

} // namespace bqaoa
