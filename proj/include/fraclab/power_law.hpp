#pragma once

#include <cmath>

namespace fraclab {

// Evaluates |d|^p and |d|^{p-2} from the squared norm |d|^2, with fast paths
// for the exponents that show up in practice. Coincident values (d2 == 0)
// give 0 for both, which is the continuous extension for p > 2 and
// harmless for p = 2 because the factor multiplies d = 0.
class PowerLaw {
public:
    explicit PowerLaw(double p) : p_(p), half_pm2_(0.5 * (p - 2.0)) {
        if (p == 2.0) mode_ = Mode::two;
        else if (p == 2.5) mode_ = Mode::two_and_half;
        else if (p == 3.0) mode_ = Mode::three;
        else if (p == 4.0) mode_ = Mode::four;
        else mode_ = Mode::general;
    }

    double p() const { return p_; }

    /// |d|^{p-2}
    double pow_pm2(double d2) const {
        if (d2 <= 0.0) return mode_ == Mode::two ? 1.0 : 0.0;
        switch (mode_) {
            case Mode::two: return 1.0;
            case Mode::two_and_half: return std::sqrt(std::sqrt(d2));
            case Mode::three: return std::sqrt(d2);
            case Mode::four: return d2;
            default: return std::pow(d2, half_pm2_);
        }
    }

    /// |d|^p
    double pow_p(double d2) const {
        if (d2 <= 0.0) return 0.0;
        return d2 * pow_pm2(d2);
    }

private:
    enum class Mode { two, two_and_half, three, four, general };
    double p_;
    double half_pm2_;
    Mode mode_ = Mode::general;
};

}  // namespace fraclab
