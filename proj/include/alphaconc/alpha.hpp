#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace alphaconc {

/// Tail order alpha in (0, 2] together with the split constants
/// c = min(2^(alpha-1), 1) and C = max(2^(alpha-1), 1), which satisfy
/// c (x^a + y^a) <= (x + y)^a <= C (x^a + y^a) for x, y > 0.
class AlphaParam {
public:
    explicit AlphaParam(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha <= 2.0)) {
            throw std::invalid_argument("alpha must lie in (0, 2], got " + std::to_string(alpha));
        }
        const double split = std::exp2(alpha - 1.0);
        c_split_ = std::min(split, 1.0);
        C_split_ = std::max(split, 1.0);
    }

    double value() const noexcept { return alpha_; }
    double c_split() const noexcept { return c_split_; }
    double C_split() const noexcept { return C_split_; }
    double inverse() const noexcept { return 1.0 / alpha_; }

    friend bool operator==(const AlphaParam& a, const AlphaParam& b) noexcept {
        return a.alpha_ == b.alpha_;
    }

private:
    double alpha_;
    double c_split_;
    double C_split_;
};

}  // namespace alphaconc
