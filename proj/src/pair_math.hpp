#pragma once

namespace fraclab::detail {

inline double squared_difference(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) {
        const double t = a[c] - b[c];
        s += t * t;
    }
    return s;
}

}  // namespace fraclab::detail
