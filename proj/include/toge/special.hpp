#ifndef TOGE_SPECIAL_HPP
#define TOGE_SPECIAL_HPP

#include "toge/types.hpp"

#include <cmath>
#include <cstdint>

namespace toge {

/// log of the multinomial coefficient k! / (alpha_1! ... alpha_m! (k-|alpha|)!).
inline double log_multinomial(std::int64_t k, const VecI& alpha) {
    double s = std::lgamma(static_cast<double>(k) + 1.0);
    std::int64_t tot = 0;
    for (int j = 0; j < alpha.size(); ++j) {
        s -= std::lgamma(static_cast<double>(alpha[j]) + 1.0);
        tot += alpha[j];
    }
    s -= std::lgamma(static_cast<double>(k - tot) + 1.0);
    return s;
}

/// log Beta(a, b).
inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Regularized lower incomplete gamma P(a, x); series for x < a+1, Lentz
/// continued fraction otherwise.
inline double gamma_p(double a, double x) {
    if (x < 0 || a <= 0) fail(ErrorCode::SchemaError, "gamma_p domain");
    if (x == 0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

/// log of the lower incomplete gamma function gamma(a, x) = P(a, x) Gamma(a).
inline double log_lower_incomplete_gamma(double a, double x) {
    return std::log(gamma_p(a, x)) + std::lgamma(a);
}

} // namespace toge

#endif
