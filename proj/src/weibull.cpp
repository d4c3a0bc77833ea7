#include "openmax/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "openmax/error.hpp"
#include "openmax/rng.hpp"

namespace openmax {

void validate(const WeibullParams& params) {
    if (!std::isfinite(params.shape) || !std::isfinite(params.scale) || !std::isfinite(params.location)) {
        throw InvalidArgument("Weibull parameters must be finite");
    }
    if (params.shape <= 0.0) throw InvalidArgument("Weibull shape must be positive");
    if (params.scale <= 0.0) throw InvalidArgument("Weibull scale must be positive");
}

void validate(const TailConfig& config) {
    if (config.min_samples < 2) throw InvalidArgument("min_samples must be at least 2");
    if (config.tail_size < config.min_samples) {
        throw InvalidArgument("tail_size " + std::to_string(config.tail_size) + " is below min_samples " +
                              std::to_string(config.min_samples));
    }
}

double weibull_cdf(const WeibullParams& params, double a) {
    validate(params);
    if (!std::isfinite(a)) throw InvalidArgument("weibull_cdf: non-finite argument");
    if (a <= params.location) return 0.0;
    const double t = (a - params.location) / params.scale;
    return -std::expm1(-std::pow(t, params.shape));
}

double weibull_pdf(const WeibullParams& params, double a) {
    validate(params);
    if (!std::isfinite(a)) throw InvalidArgument("weibull_pdf: non-finite argument");
    const double b = params.shape;
    if (a < params.location) return 0.0;
    if (a == params.location) {
        if (b > 1.0) return 0.0;
        if (b == 1.0) return 1.0 / params.scale;
        throw InvalidArgument("weibull_pdf: density diverges at the location for shape < 1");
    }
    const double t = (a - params.location) / params.scale;
    return (b / params.scale) * std::pow(t, b - 1.0) * std::exp(-std::pow(t, b));
}

double weibull_quantile(const WeibullParams& params, double u) {
    validate(params);
    if (!(u >= 0.0 && u < 1.0)) throw InvalidArgument("weibull_quantile: u must lie in [0, 1)");
    return params.location + params.scale * std::pow(-std::log1p(-u), 1.0 / params.shape);
}

namespace {

// Log-samples with their mean and max, shared by the residual and the solver.
struct LogSample {
    std::vector<double> logs;
    double mean = 0.0;
    double max = 0.0;

    explicit LogSample(std::span<const double> xs) {
        if (xs.empty()) throw InvalidArgument("shape equation needs at least one sample");
        logs.reserve(xs.size());
        max = -INFINITY;
        double sum = 0.0;
        for (double x : xs) {
            if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("shape equation samples must be positive");
            const double y = std::log(x);
            logs.push_back(y);
            sum += y;
            max = std::max(max, y);
        }
        mean = sum / static_cast<double>(logs.size());
    }
};

struct ShapeEval {
    double residual;
    double derivative;
    // mean of exp(k (ln x - max ln x)), used for the scale estimate
    double mean_weight;
};

// Weights are rescaled by exp(-k max ln x) so large k cannot overflow; the
// ratio in g is unchanged.
ShapeEval evaluate_shape(double k, const LogSample& s) {
    double sw = 0.0;
    double swy = 0.0;
    double swyy = 0.0;
    for (double y : s.logs) {
        const double w = std::exp(k * (y - s.max));
        const double dy = y - s.mean;
        sw += w;
        swy += w * dy;
        swyy += w * dy * dy;
    }
    const double weighted_mean = swy / sw;
    const double variance = std::max(0.0, swyy / sw - weighted_mean * weighted_mean);
    return ShapeEval{weighted_mean - 1.0 / k, variance + 1.0 / (k * k),
                     sw / static_cast<double>(s.logs.size())};
}

constexpr double kShapeLo = 1e-3;
constexpr double kShapeHi = 1e3;
constexpr double kResidualTol = 1e-9;
constexpr int kMaxIterations = 200;

}  // namespace

double shape_equation_residual(double k, std::span<const double> xs) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("shape must be positive");
    return evaluate_shape(k, LogSample(xs)).residual;
}

double estimate_location(double tail_min, double tail_max) {
    return tail_min - 0.01 * (tail_max - tail_min) - 1e-9;
}

TailFit fit_weibull_tail(std::span<const double> distances, const TailConfig& config) {
    validate(config);
    for (double d : distances) {
        if (!std::isfinite(d) || d < 0.0) throw InvalidArgument("distances must be finite and non-negative");
    }

    TailFit fit;
    fit.tail_clamped = config.tail_size > distances.size();
    fit.n_tail = std::min(config.tail_size, distances.size());
    if (fit.n_tail < config.min_samples) {
        throw FitError(FitErrorKind::too_few_samples,
                       std::to_string(fit.n_tail) + " samples, need " + std::to_string(config.min_samples));
    }

    std::vector<double> tail(distances.begin(), distances.end());
    std::sort(tail.begin(), tail.end(), std::greater<>());
    tail.resize(fit.n_tail);

    const double hi = tail.front();
    const double lo = tail.back();
    if (hi == lo) throw FitError(FitErrorKind::degenerate_tail, "all tail distances equal " + std::to_string(hi));
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < tail.size(); ++i) {
        if (tail[i] != tail[i - 1]) ++distinct;
    }
    if (distinct < config.min_samples) {
        throw FitError(FitErrorKind::too_few_samples, std::to_string(distinct) + " distinct tail values, need " +
                                                          std::to_string(config.min_samples));
    }

    const double location = estimate_location(lo, hi);
    for (double& x : tail) x -= location;
    const LogSample sample(tail);

    double k_lo = kShapeLo;
    double k_hi = kShapeHi;
    if (!(evaluate_shape(k_lo, sample).residual < 0.0) || !(evaluate_shape(k_hi, sample).residual > 0.0)) {
        throw FitError(FitErrorKind::no_bracket, "shape root not bracketed in [1e-3, 1e3]");
    }

    double k = 1.0;
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        const ShapeEval e = evaluate_shape(k, sample);
        fit.iterations = iter;
        if (std::abs(e.residual) < kResidualTol) {
            fit.params = WeibullParams{k, std::exp(sample.max) * std::pow(e.mean_weight, 1.0 / k), location};
            return fit;
        }
        if (e.residual < 0.0) {
            k_lo = k;
        } else {
            k_hi = k;
        }
        double next = k - e.residual / e.derivative;
        if (!(next > k_lo && next < k_hi)) next = std::sqrt(k_lo * k_hi);
        k = next;
    }
    throw FitError(FitErrorKind::no_bracket, "shape root search did not converge in 200 iterations");
}

std::vector<double> sample_weibull(const WeibullParams& params, std::size_t n, std::uint64_t seed) {
    validate(params);
    SplitMix64 rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(weibull_quantile(params, rng.uniform_open()));
    return out;
}

}  // namespace openmax
