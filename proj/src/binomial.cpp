#include "smc/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace smc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add(double a, double b)
{
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

double binomial_log_pmf(std::int64_t k, std::int64_t n, double p)
{
    if (k < 0 || k > n) return kNegInf;
    if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
    if (p >= 1.0) return k == n ? 0.0 : kNegInf;
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
           kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

// Terms are added from the far tail toward the bulk, so small terms
// accumulate before they meet large ones.
double binomial_log_cdf(std::int64_t c, std::int64_t n, double p)
{
    if (c < 0) return kNegInf;
    if (c >= n) return 0.0;
    double acc = kNegInf;
    for (std::int64_t k = 0; k <= c; ++k) acc = log_add(acc, binomial_log_pmf(k, n, p));
    return std::min(acc, 0.0);
}

double binomial_log_sf(std::int64_t c, std::int64_t n, double p)
{
    if (c < 0) return 0.0;
    if (c >= n) return kNegInf;
    double acc = kNegInf;
    for (std::int64_t k = n; k > c; --k) acc = log_add(acc, binomial_log_pmf(k, n, p));
    return std::min(acc, 0.0);
}

double binomial_cdf(std::int64_t c, std::int64_t n, double p)
{
    if (c < 0) return 0.0;
    if (c >= n) return 1.0;
    // sum whichever tail lies away from the mean, then complement
    if (static_cast<double>(c) < static_cast<double>(n) * p) {
        return std::exp(binomial_log_cdf(c, n, p));
    }
    return -std::expm1(binomial_log_sf(c, n, p));
}

}  // namespace smc
