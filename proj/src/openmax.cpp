#include "openmax/openmax.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <numeric>
#include <thread>

#include "openmax/error.hpp"

namespace openmax {

const char* to_string(WeightMode mode) noexcept {
    return mode == WeightMode::classic ? "classic" : "paper_literal";
}

const char* to_string(MavSource source) noexcept {
    return source == MavSource::all ? "all" : "correct_only";
}

const char* to_string(RejectionMode mode) noexcept {
    return mode == RejectionMode::simple_recalibrated ? "simple_recalibrated" : "openmax_probability";
}

namespace {

std::string class_tag(std::size_t c) { return "class " + std::to_string(c); }

void require_unit_interval(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
    }
}

}  // namespace

OpenMaxModel::OpenMaxModel(LabelSpace label_space, std::vector<ClassCalibration> calibrations,
                           OpenMaxConfig config, int format_version)
    : label_space_(std::move(label_space)),
      calibrations_(std::move(calibrations)),
      config_(std::move(config)),
      format_version_(format_version) {
    const std::size_t num_classes = label_space_.num_classes();
    if (format_version_ < 1 || format_version_ > kModelFormatVersion) {
        throw InvalidArgument("unsupported format_version " + std::to_string(format_version_));
    }
    if (!config_.beta) config_.beta = num_classes;
    if (*config_.beta > num_classes) {
        throw InvalidArgument("beta " + std::to_string(*config_.beta) + " exceeds class count " +
                              std::to_string(num_classes));
    }
    validate(config_.tail);
    if (calibrations_.size() != num_classes) {
        throw InvalidArgument("expected " + std::to_string(num_classes) + " class calibrations, got " +
                              std::to_string(calibrations_.size()));
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        const auto& cal = calibrations_[c];
        if (cal.class_index != c) {
            throw InvalidArgument("calibration at position " + std::to_string(c) + " has index " +
                                  std::to_string(cal.class_index));
        }
        if (cal.mav.size() != num_classes) throw DimensionMismatch(class_tag(c) + " MAV", num_classes, cal.mav.size());
        if (!std::all_of(cal.mav.begin(), cal.mav.end(), [](double v) { return std::isfinite(v); })) {
            throw InvalidArgument(class_tag(c) + ": MAV has a non-finite component");
        }
        try {
            validate(cal.weibull);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(class_tag(c) + ": " + e.what());
        }
        if (cal.n_tail < 2) throw InvalidArgument(class_tag(c) + ": n_tail must be at least 2");
        if (cal.n_tail > cal.n_calibration) {
            throw InvalidArgument(class_tag(c) + ": n_tail exceeds n_calibration");
        }
    }
}

std::size_t OpenMaxModel::beta() const noexcept { return *config_.beta; }

Vector compute_mav(std::span<const Vector> vectors) {
    if (vectors.empty()) throw InvalidArgument("compute_mav: empty vector list");
    const std::size_t dim = vectors.front().size();
    Vector mean(dim, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw DimensionMismatch("compute_mav", dim, v.size());
        for (std::size_t k = 0; k < dim; ++k) mean[k] += v[k];
    }
    const double n = static_cast<double>(vectors.size());
    for (double& m : mean) m /= n;
    return mean;
}

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw DimensionMismatch("euclidean_distance", u.size(), v.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = u[k] - v[k];
        sum += d * d;
    }
    return std::sqrt(sum);
}

namespace {

ClassCalibration fit_class(std::size_t c, const std::vector<Vector>& vectors, const TailConfig& tail) {
    if (vectors.size() < tail.min_samples) {
        throw FitError(FitErrorKind::class_underpopulated,
                       std::to_string(vectors.size()) + " usable records, need " + std::to_string(tail.min_samples),
                       c);
    }
    ClassCalibration cal;
    cal.class_index = c;
    cal.mav = compute_mav(vectors);
    cal.n_calibration = vectors.size();
    std::vector<double> distances;
    distances.reserve(vectors.size());
    for (const auto& v : vectors) distances.push_back(euclidean_distance(v, cal.mav));
    try {
        const TailFit fit = fit_weibull_tail(distances, tail);
        cal.weibull = fit.params;
        cal.n_tail = fit.n_tail;
        cal.tail_clamped = fit.tail_clamped;
    } catch (const FitError& e) {
        throw FitError(e.kind(), e.detail(), c);
    }
    return cal;
}

}  // namespace

OpenMaxModel fit_openmax(const ActivationSet& calibration_set, const OpenMaxConfig& config) {
    if (calibration_set.has_unknown_labels()) {
        throw InvalidArgument("calibration set must not contain unknown-labeled records");
    }
    validate(config.tail);
    const std::size_t num_classes = calibration_set.dim();
    if (config.beta && *config.beta > num_classes) {
        throw InvalidArgument("beta " + std::to_string(*config.beta) + " exceeds class count " +
                              std::to_string(num_classes));
    }

    const auto groups = config.mav_source == MavSource::correct_only
                            ? group_by_label(partition_correct(calibration_set).correct)
                            : group_by_label(calibration_set);

    // Classes are independent; each worker takes a strided share of them and
    // slots are read back in index order so the first failing class is the
    // one reported.
    std::vector<std::optional<ClassCalibration>> fitted(num_classes);
    std::vector<std::exception_ptr> errors(num_classes);
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(num_classes, 1));
    auto work = [&](std::size_t first) {
        for (std::size_t c = first; c < num_classes; c += workers) {
            try {
                fitted[c] = fit_class(c, groups[c], config.tail);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
        work(0);
    }
    std::vector<ClassCalibration> calibrations;
    calibrations.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (errors[c]) std::rethrow_exception(errors[c]);
        calibrations.push_back(std::move(*fitted[c]));
    }
    return OpenMaxModel(calibration_set.label_space(), std::move(calibrations), config);
}

Vector class_distances(const OpenMaxModel& model, std::span<const double> logits) {
    if (logits.size() != model.num_classes()) {
        throw DimensionMismatch("logits", model.num_classes(), logits.size());
    }
    Vector out;
    out.reserve(model.num_classes());
    for (const auto& cal : model.calibrations()) out.push_back(euclidean_distance(logits, cal.mav));
    return out;
}

Vector recalibrated_scores(const OpenMaxModel& model, std::span<const double> logits) {
    Vector scores = class_distances(model, logits);
    for (std::size_t c = 0; c < scores.size(); ++c) {
        scores[c] = 1.0 - weibull_cdf(model.calibrations()[c].weibull, scores[c]);
    }
    return scores;
}

namespace {

Label simple_decision(std::span<const double> recalibrated, double threshold) {
    require_unit_interval(threshold, "threshold");
    const std::size_t best = argmax(recalibrated);
    if (recalibrated[best] < threshold) return Label::unknown();
    return Label::known(best);
}

}  // namespace

Label predict_simple(const OpenMaxModel& model, std::span<const double> logits, double threshold) {
    require_unit_interval(threshold, "threshold");
    return simple_decision(recalibrated_scores(model, logits), threshold);
}

Vector openmax_activations(std::span<const double> logits, std::span<const double> cdf_values,
                           std::size_t beta, WeightMode weight_mode) {
    const std::size_t num_classes = logits.size();
    if (cdf_values.size() != num_classes) throw DimensionMismatch("cdf values", num_classes, cdf_values.size());
    if (beta > num_classes) {
        throw InvalidArgument("beta " + std::to_string(beta) + " exceeds class count " + std::to_string(num_classes));
    }
    for (double f : cdf_values) require_unit_interval(f, "cdf value");

    std::vector<std::size_t> ranked(num_classes);
    std::iota(ranked.begin(), ranked.end(), std::size_t{0});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });

    Vector theta(num_classes, 1.0);
    const double b = static_cast<double>(beta);
    for (std::size_t j = 1; j <= beta; ++j) {
        const double rank = static_cast<double>(j);
        const double weight = weight_mode == WeightMode::classic ? (b - rank + 1.0) / b : (b - rank) / b;
        const std::size_t k = ranked[j - 1];
        theta[k] = 1.0 - weight * cdf_values[k];
    }

    Vector out(num_classes + 1, 0.0);
    for (std::size_t k = 0; k < num_classes; ++k) {
        out[k + 1] = logits[k] * theta[k];
        out[0] += logits[k] * (1.0 - theta[k]);
    }
    return out;
}

Vector stable_softmax(std::span<const double> activations) {
    if (activations.empty()) throw InvalidArgument("softmax of an empty vector");
    const double peak = *std::max_element(activations.begin(), activations.end());
    Vector out(activations.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < activations.size(); ++i) {
        out[i] = std::exp(activations[i] - peak);
        sum += out[i];
    }
    for (double& p : out) p /= sum;
    return out;
}

OpenMaxOutput openmax_probabilities(const OpenMaxModel& model, std::span<const double> logits) {
    OpenMaxOutput out;
    out.distances = class_distances(model, logits);
    Vector cdf(model.num_classes());
    out.recalibrated.resize(model.num_classes());
    for (std::size_t c = 0; c < cdf.size(); ++c) {
        cdf[c] = weibull_cdf(model.calibrations()[c].weibull, out.distances[c]);
        out.recalibrated[c] = 1.0 - cdf[c];
    }
    out.probabilities = stable_softmax(openmax_activations(logits, cdf, model.beta(), model.config().weight_mode));
    const std::size_t winner = argmax(out.probabilities);
    out.predicted = winner == 0 ? Label::unknown() : Label::known(winner - 1);
    out.max_probability = out.probabilities[winner];
    return out;
}

std::vector<OpenMaxOutput> score_set(const OpenMaxModel& model, const ActivationSet& set) {
    if (set.dim() != model.num_classes()) {
        throw DimensionMismatch("activation set vs model classes", model.num_classes(), set.dim());
    }
    std::vector<OpenMaxOutput> out;
    out.reserve(set.size());
    for (const auto& rec : set.records()) out.push_back(openmax_probabilities(model, rec.logits));
    return out;
}

Label openmax_decision(const OpenMaxOutput& output, double epsilon) {
    require_unit_interval(epsilon, "epsilon");
    if (output.predicted.is_unknown() || output.max_probability < epsilon) return Label::unknown();
    return output.predicted;
}

Label predict_openmax(const OpenMaxModel& model, std::span<const double> logits, double epsilon) {
    require_unit_interval(epsilon, "epsilon");
    return openmax_decision(openmax_probabilities(model, logits), epsilon);
}

Label decide(const OpenMaxModel& model, const OpenMaxOutput& output, double threshold) {
    if (model.config().rejection_mode == RejectionMode::simple_recalibrated) {
        return simple_decision(output.recalibrated, threshold);
    }
    return openmax_decision(output, threshold);
}

Label predict(const OpenMaxModel& model, std::span<const double> logits, double threshold) {
    if (model.config().rejection_mode == RejectionMode::simple_recalibrated) {
        return predict_simple(model, logits, threshold);
    }
    return predict_openmax(model, logits, threshold);
}

}  // namespace openmax
