#pragma once

#include <cstdint>

namespace smc {

/// log P[Bin(n,p) = k]; -inf outside the support.
double binomial_log_pmf(std::int64_t k, std::int64_t n, double p);

/// log P[Bin(n,p) <= c], summed in the log domain.
double binomial_log_cdf(std::int64_t c, std::int64_t n, double p);

/// log P[Bin(n,p) > c], summed in the log domain.
double binomial_log_sf(std::int64_t c, std::int64_t n, double p);

/// P[Bin(n,p) <= c] for -1 <= c <= n. c = -1 gives 0, c = n gives 1.
double binomial_cdf(std::int64_t c, std::int64_t n, double p);

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

}  // namespace smc
