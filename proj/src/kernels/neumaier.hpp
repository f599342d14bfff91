// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace trivergence::kernels::detail {

/// Neumaier's variant of Kahan summation.
class Neumaier {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double result() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace trivergence::kernels::detail
