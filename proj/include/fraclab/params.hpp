#pragma once

#include <string>

namespace fraclab {

/// Fractional order s, integrability p, spatial dimension n and ambient
/// target dimension N. Immutable once constructed.
class FractionalParams {
public:
    /// Throws ValidationError unless 0 < s < 1, p > 1, 1 <= n <= 3, N >= 2.
    FractionalParams(double s, double p, int n, int N);

    double s() const { return s_; }
    double p() const { return p_; }
    int n() const { return n_; }
    int N() const { return N_; }

    double sp() const { return s_ * p_; }
    double sp_minus_n() const { return sp_minus_n_; }
    /// Exponent of the kernel |x-y|^{-(n+sp)}.
    double kernel_exponent() const { return static_cast<double>(n_) + s_ * p_; }

    /// Operator and solver paths are only defined for p >= 2.
    void require_operator_range(const std::string& what) const;

    /// "outside-theorem-regime" when sp >= n, otherwise the subcritical tag
    /// (the lower bound n - delta < sp is never verifiable).
    std::string regime_tag() const;

private:
    double s_;
    double p_;
    int n_;
    int N_;
    double sp_minus_n_;
};

}  // namespace fraclab
