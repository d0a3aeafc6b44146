#pragma once

#include <cmath>
#include <limits>

namespace quakescore {

// Kahan compensated summation. Spatial sums add ~10^4 tiny values per
// day; naive summation loses the low-order bits the aggregation
// identities are tested against. +inf terms are tracked separately so
// an infinite score propagates as +inf instead of turning into NaN
// through the compensation step.
class KahanSum {
public:
    void add(double v) {
        if (std::isinf(v)) {
            if (v > 0) pos_inf_ = true; else neg_inf_ = true;
            return;
        }
        double y = v - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    double value() const {
        if (pos_inf_ && neg_inf_) return std::numeric_limits<double>::quiet_NaN();
        if (pos_inf_) return std::numeric_limits<double>::infinity();
        if (neg_inf_) return -std::numeric_limits<double>::infinity();
        return sum_;
    }

    bool saw_infinity() const { return pos_inf_ || neg_inf_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    bool pos_inf_ = false;
    bool neg_inf_ = false;
};

} // namespace quakescore
