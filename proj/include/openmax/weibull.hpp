#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace openmax {

// Three-parameter Weibull: CDF(a) = 1 - exp(-((a - location) / scale)^shape).
struct WeibullParams {
    double shape = 1.0;
    double scale = 1.0;
    double location = 0.0;

    friend bool operator==(const WeibullParams&, const WeibullParams&) = default;
};

// Throws InvalidArgument unless shape > 0, scale > 0 and all are finite.
void validate(const WeibullParams& params);

struct TailConfig {
    // Number of largest distances used for fitting.
    std::size_t tail_size = 20;
    std::size_t min_samples = 3;
};

void validate(const TailConfig& config);

// Zero at or below the location.
double weibull_cdf(const WeibullParams& params, double a);

double weibull_pdf(const WeibullParams& params, double a);

// Inverse CDF for u in [0, 1).
double weibull_quantile(const WeibullParams& params, double u);

// Profile likelihood equation for the two-parameter shape:
//   g(k) = sum(x^k ln x) / sum(x^k) - 1/k - mean(ln x)
// increasing in k; its root is the maximum-likelihood shape.
double shape_equation_residual(double k, std::span<const double> xs);

struct TailFit {
    WeibullParams params;
    std::size_t n_tail = 0;
    // Requested tail_size exceeded the number of distances.
    bool tail_clamped = false;
    int iterations = 0;
};

// Location estimate for a selected tail with minimum m and maximum M:
// m - 0.01 (M - m) - 1e-9.
double estimate_location(double tail_min, double tail_max);

// Fits the tail_size largest distances: location from estimate_location, then
// the two-parameter MLE on the shifted values. Throws FitError.
TailFit fit_weibull_tail(std::span<const double> distances, const TailConfig& config);

// Inverse-CDF sampling from a seeded SplitMix64 stream.
std::vector<double> sample_weibull(const WeibullParams& params, std::size_t n, std::uint64_t seed);

}  // namespace openmax
