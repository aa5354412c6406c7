#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical routines.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double phi(double z, double alpha) {
    const double a = std::abs(z);
    return a <= 1.0 ? a * a : std::pow(a, alpha);
}

/// Largest z >= 0 with phi(z) <= p.
inline double phi_inverse(double p, double alpha) {
    return p <= 1.0 ? std::sqrt(p) : std::pow(p, 1.0 / alpha);
}

/// All vectors of length n over {0, ..., steps-1} as index tuples.
inline void for_each_index(std::size_t n, std::size_t steps, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        fn(idx);
        std::size_t k = 0;
        while (k < n && ++idx[k] == steps) idx[k++] = 0;
        if (k == n) return;
    }
}

/// Feasible, coordinatewise-maximal magnitude vectors on the grid
/// {0, h, ..., zmax} with h = zmax / (points - 1).
inline std::vector<Eigen::VectorXd> pareto_magnitudes(std::size_t n, double p, double alpha, std::size_t points) {
    const double zmax = phi_inverse(p, alpha);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = zmax * double(i) / double(points - 1);
    std::vector<Eigen::VectorXd> feasible;
    for_each_index(n, points, [&](const std::vector<std::size_t>& idx) {
        double cost = 0.0;
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            z[static_cast<Eigen::Index>(i)] = grid[idx[i]];
            cost += phi(grid[idx[i]], alpha);
        }
        if (cost > p * (1.0 + 1e-12)) return;
        // maximal if no single coordinate can be raised by one grid step
        for (std::size_t i = 0; i < n; ++i) {
            if (idx[i] + 1 == points) continue;
            const double raised = cost - phi(grid[idx[i]], alpha) + phi(grid[idx[i] + 1], alpha);
            if (raised <= p * (1.0 + 1e-12)) return;
        }
        feasible.push_back(z);
    });
    return feasible;
}

/// Grid lower bound for sup 2 sum_i z_i |a_i|_2 over sum phi(z_i) <= p.
inline double al12_coupled_grid(const Eigen::MatrixXd& a, double p, double alpha, std::size_t points = 21) {
    const auto n = static_cast<std::size_t>(a.rows());
    const Eigen::VectorXd w = a.rowwise().norm();
    double best = 0.0;
    for (const auto& z : pareto_magnitudes(n, p, alpha, points)) best = std::max(best, 2.0 * w.dot(z));
    return best;
}

/// Grid lower bound for sup x^T A y over sum phi(x_i) <= p, sum phi(y_j) <= p.
/// x ranges over the full symmetric grid; for each x the best grid y has
/// signs matching A^T x and a maximal magnitude vector.
inline double al12_decoupled_grid(const Eigen::MatrixXd& a, double p, double alpha, std::size_t points = 21) {
    const auto n = static_cast<std::size_t>(a.rows());
    const auto magnitudes = pareto_magnitudes(n, p, alpha, points);
    const double zmax = phi_inverse(p, alpha);
    const std::size_t half = points / 2;
    std::vector<double> grid(2 * half + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = zmax * (double(i) - double(half)) / double(half);
    double best = 0.0;
    for_each_index(n, grid.size(), [&](const std::vector<std::size_t>& idx) {
        double cost = 0.0;
        Eigen::VectorXd x(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            x[static_cast<Eigen::Index>(i)] = grid[idx[i]];
            cost += phi(grid[idx[i]], alpha);
        }
        if (cost > p * (1.0 + 1e-12)) return;
        const Eigen::VectorXd g = (a.transpose() * x).cwiseAbs();
        for (const auto& m : magnitudes) best = std::max(best, g.dot(m));
    });
    return best;
}

/// Maximizes 2 sum_ij a_ij x_ij subject to sum_i phi(|x_i.|_2) <= p directly
/// over the n^2 raw entries with a (1+1) evolution strategy. Candidates are
/// scaled onto the constraint boundary, where the objective is largest. The
/// feasible set is not convex for alpha < 2, so the search starts from A with
/// every nonempty subset of its rows kept, then from `restarts` random points.
inline double al12_raw_entries(const Eigen::MatrixXd& a, double p, double alpha, std::uint64_t seed,
                               int iterations = 3000, int restarts = 6) {
    const Eigen::Index n = a.rows();
    auto cost = [&](const Eigen::MatrixXd& x, double s) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) total += phi(s * x.row(i).norm(), alpha);
        return total;
    };
    auto to_boundary = [&](Eigen::MatrixXd x) {
        if (x.norm() == 0.0) return x;
        double lo = 0.0, hi = 1.0;
        while (cost(x, hi) < p) hi *= 2.0;
        for (int k = 0; k < 60; ++k) {
            const double mid = 0.5 * (lo + hi);
            (cost(x, mid) <= p ? lo : hi) = mid;
        }
        return Eigen::MatrixXd(lo * x);
    };
    auto value = [&](const Eigen::MatrixXd& x) { return 2.0 * (a.array() * x.array()).sum(); };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double best = 0.0;
    const int masks = (1 << n) - 1;
    for (int r = 0; r < masks + restarts; ++r) {
        Eigen::MatrixXd x(n, n);
        if (r < masks) {
            for (Eigen::Index i = 0; i < n; ++i) x.row(i) = (((r + 1) >> i) & 1) ? Eigen::RowVectorXd(a.row(i)) : Eigen::RowVectorXd::Zero(n);
        } else {
            for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
        }
        x = to_boundary(x);
        double fx = value(x);
        double sigma = 0.3 * std::max(1.0, x.norm());
        for (int it = 0; it < iterations && sigma > 1e-12; ++it) {
            Eigen::MatrixXd y = x;
            for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += sigma * normal(rng);
            y = to_boundary(y);
            const double fy = value(y);
            if (fy > fx) {
                x = y;
                fx = fy;
                sigma *= 1.5;
            } else {
                sigma *= std::pow(1.5, -0.25);
            }
        }
        best = std::max(best, fx);
    }
    return best;
}

/// Binomial CDF P(B <= k) for B ~ Bin(n, q), summed in log space.
inline double binomial_cdf(std::uint64_t k, std::uint64_t n, double q) {
    if (q <= 0.0) return 1.0;
    if (q >= 1.0) return k >= n ? 1.0 : 0.0;
    double total = 0.0;
    for (std::uint64_t j = 0; j <= k; ++j) {
        const double lj = std::lgamma(double(n) + 1) - std::lgamma(double(j) + 1) - std::lgamma(double(n - j) + 1) +
                          double(j) * std::log(q) + double(n - j) * std::log1p(-q);
        total += std::exp(lj);
    }
    return std::min(1.0, total);
}

/// Clopper-Pearson limits by bisection on the binomial CDF; `tail` is the
/// probability in each excluded tail.
inline double cp_upper(std::uint64_t k, std::uint64_t n, double tail) {
    if (k >= n) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (binomial_cdf(k, n, mid) > tail ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double cp_lower(std::uint64_t k, std::uint64_t n, double tail) {
    if (k == 0) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        // P(B >= k) = 1 - P(B <= k - 1)
        (1.0 - binomial_cdf(k - 1, n, mid) < tail ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Psi_alpha norm of a finite sample by plain bisection on the direct mean.
inline double orlicz_direct(const std::vector<double>& x, double alpha) {
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return 0.0;
    auto mean_exp = [&](double t) {
        long double s = 0.0;
        for (double v : x) s += std::exp(static_cast<long double>(std::pow(std::abs(v) / t, alpha)));
        return static_cast<double>(s / static_cast<long double>(x.size()));
    };
    double lo = mx * 1e-3, hi = mx * 1e3;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (mean_exp(mid) <= 2.0 ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace oracle
