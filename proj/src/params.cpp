#include "fraclab/params.hpp"

#include <cmath>

#include "fraclab/errors.hpp"

namespace fraclab {

FractionalParams::FractionalParams(double s, double p, int n, int N)
    : s_(s), p_(p), n_(n), N_(N), sp_minus_n_(s * p - static_cast<double>(n)) {
    Violations v;
    v.check(std::isfinite(s) && s > 0.0 && s < 1.0, "s must lie in (0, 1), got " + std::to_string(s));
    v.check(std::isfinite(p) && p > 1.0, "p must be > 1, got " + std::to_string(p));
    v.check(n >= 1 && n <= 3, "spatial dimension n must be 1, 2 or 3, got " + std::to_string(n));
    v.check(N >= 2, "target dimension N must be >= 2, got " + std::to_string(N));
    v.throw_if_any();
}

void FractionalParams::require_operator_range(const std::string& what) const {
    if (p_ < 2.0) {
        throw ValidationError(what + " requires p >= 2 (operator range), got p = " + std::to_string(p_));
    }
}

std::string FractionalParams::regime_tag() const {
    return sp() < static_cast<double>(n_) ? "subcritical-sp-lt-n" : "outside-theorem-regime";
}

}  // namespace fraclab
