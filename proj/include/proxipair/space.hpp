#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>

#include "proxipair/error.hpp"

namespace proxipair {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite-dimensional real sequence space with the p-norm, 1 < p < inf.
///
/// The endpoints are rejected: p = 1 and p = inf are not strictly convex,
/// so metric projections onto convex sets stop being single valued.
class LpSpace {
public:
    LpSpace(std::size_t dim, double p) : dim_(dim), p_(p) {
        if (dim == 0) throw InvalidArgument("space.dim: must be positive");
        if (!(p > 1.0) || !std::isfinite(p))
            throw InvalidArgument("space.p: must lie strictly between 1 and infinity, got " +
                                  std::to_string(p));
    }

    std::size_t dim() const noexcept { return dim_; }
    double p() const noexcept { return p_; }
    /// Hoelder conjugate exponent q with 1/p + 1/q = 1.
    double conjugate() const noexcept { return p_ / (p_ - 1.0); }
    bool euclidean() const noexcept { return p_ == 2.0; }

    void check(const Point& x) const {
        if (static_cast<std::size_t>(x.size()) != dim_)
            throw DimensionMismatch(dim_, static_cast<std::size_t>(x.size()));
    }

    Point zero() const { return Point::Zero(static_cast<Eigen::Index>(dim_)); }

    friend bool operator==(const LpSpace&, const LpSpace&) = default;

private:
    std::size_t dim_;
    double p_;
};

namespace detail {

// (sum |x_i|^p)^(1/p), scaled by the largest magnitude so that large or tiny
// coordinates neither overflow nor underflow.
inline double lp_norm(const Point& x, double p) {
    if (p == 2.0) return x.stableNorm();
    const double scale = x.cwiseAbs().maxCoeff();
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) / scale, p);
    return scale * std::pow(acc, 1.0 / p);
}

}  // namespace detail

inline double norm(const LpSpace& space, const Point& x) {
    space.check(x);
    return detail::lp_norm(x, space.p());
}

inline double distance(const LpSpace& space, const Point& x, const Point& y) {
    space.check(x);
    space.check(y);
    return detail::lp_norm(x - y, space.p());
}

/// Norm of the dual space (exponent q) evaluated on a functional's coefficients.
inline double dual_norm(const LpSpace& space, const Point& a) {
    space.check(a);
    return detail::lp_norm(a, space.conjugate());
}

enum class Side { A, B };

inline Side opposite(Side s) noexcept { return s == Side::A ? Side::B : Side::A; }
inline const char* to_string(Side s) noexcept { return s == Side::A ? "A" : "B"; }

enum class Mode { cyclic, noncyclic };

inline Mode flipped(Mode m) noexcept {
    return m == Mode::cyclic ? Mode::noncyclic : Mode::cyclic;
}
inline const char* to_string(Mode m) noexcept {
    return m == Mode::cyclic ? "cyclic" : "noncyclic";
}

}  // namespace proxipair
