#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "openmax/activation.hpp"
#include "openmax/weibull.hpp"

namespace openmax {

enum class WeightMode {
    // w_j = (beta - j) / beta; the last modified rank gets weight 0.
    paper_literal,
    // w_j = (beta - j + 1) / beta; rank 1 gets weight 1.
    classic,
};

enum class MavSource {
    correct_only,
    all,
};

enum class RejectionMode {
    // Reject when the unknown channel wins or the winner is below epsilon.
    openmax_probability,
    // Reject when the best recalibrated score is below the threshold.
    simple_recalibrated,
};

struct OpenMaxConfig {
    // Number of top-ranked classes to modify. nullopt means all classes.
    std::optional<std::size_t> beta;
    WeightMode weight_mode = WeightMode::paper_literal;
    MavSource mav_source = MavSource::correct_only;
    TailConfig tail;
    RejectionMode rejection_mode = RejectionMode::openmax_probability;

    friend bool operator==(const OpenMaxConfig& a, const OpenMaxConfig& b) {
        return a.beta == b.beta && a.weight_mode == b.weight_mode &&
               a.mav_source == b.mav_source && a.tail.tail_size == b.tail.tail_size &&
               a.tail.min_samples == b.tail.min_samples && a.rejection_mode == b.rejection_mode;
    }
};

struct ClassCalibration {
    std::size_t class_index = 0;
    Vector mav;
    WeibullParams weibull;
    std::size_t n_calibration = 0;
    std::size_t n_tail = 0;
    bool tail_clamped = false;

    friend bool operator==(const ClassCalibration&, const ClassCalibration&) = default;
};

inline constexpr int kModelFormatVersion = 1;

class OpenMaxModel {
public:
    // Validates one calibration per class in index order, beta <= C, and
    // every calibration's invariants.
    OpenMaxModel(LabelSpace label_space, std::vector<ClassCalibration> calibrations,
                 OpenMaxConfig config, int format_version = kModelFormatVersion);

    const LabelSpace& label_space() const noexcept { return label_space_; }
    const std::vector<ClassCalibration>& calibrations() const noexcept { return calibrations_; }
    const OpenMaxConfig& config() const noexcept { return config_; }
    int format_version() const noexcept { return format_version_; }
    std::size_t num_classes() const noexcept { return label_space_.num_classes(); }
    // Resolved beta (config beta, or C when unset).
    std::size_t beta() const noexcept;

    friend bool operator==(const OpenMaxModel& a, const OpenMaxModel& b) {
        return a.label_space_ == b.label_space_ && a.calibrations_ == b.calibrations_ &&
               a.config_ == b.config_ && a.format_version_ == b.format_version_;
    }

private:
    LabelSpace label_space_;
    std::vector<ClassCalibration> calibrations_;
    OpenMaxConfig config_;
    int format_version_;
};

struct OpenMaxOutput {
    // C + 1 entries; index 0 is the unknown channel, index k + 1 is class k.
    Vector probabilities;
    // Winner over all C + 1 channels, before any epsilon test.
    Label predicted;
    double max_probability = 0.0;
    Vector recalibrated;
    Vector distances;

    friend bool operator==(const OpenMaxOutput&, const OpenMaxOutput&) = default;
};

// Component-wise mean. Throws on an empty list or mixed dimensions.
Vector compute_mav(std::span<const Vector> vectors);

double euclidean_distance(std::span<const double> u, std::span<const double> v);

OpenMaxModel fit_openmax(const ActivationSet& calibration_set, const OpenMaxConfig& config);

// Distances from logits to every class MAV.
Vector class_distances(const OpenMaxModel& model, std::span<const double> logits);

// r_c = 1 - CDF_c(distance to MAV_c).
Vector recalibrated_scores(const OpenMaxModel& model, std::span<const double> logits);

// Unknown when max r_c < threshold, otherwise argmax r_c.
Label predict_simple(const OpenMaxModel& model, std::span<const double> logits, double threshold);

// openmax_probabilities for every record, in order.
std::vector<OpenMaxOutput> score_set(const OpenMaxModel& model, const ActivationSet& set);

// Modified activations [a0, a1 .. aC] before softmax, from the raw logits and
// the per-class CDF values at the sample's distances. Index 0 is the unknown
// activation.
Vector openmax_activations(std::span<const double> logits, std::span<const double> cdf_values,
                           std::size_t beta, WeightMode weight_mode);

// exp(a_k - max) / sum_j exp(a_j - max).
Vector stable_softmax(std::span<const double> activations);

OpenMaxOutput openmax_probabilities(const OpenMaxModel& model, std::span<const double> logits);

// Decision on a precomputed output.
Label openmax_decision(const OpenMaxOutput& output, double epsilon);
Label predict_openmax(const OpenMaxModel& model, std::span<const double> logits, double epsilon);

// Dispatches on the model's rejection mode.
Label predict(const OpenMaxModel& model, std::span<const double> logits, double threshold);
Label decide(const OpenMaxModel& model, const OpenMaxOutput& output, double threshold);

// Calibration-model file (JSON, canonical ordering, round-trip numbers).
void save_model(std::ostream& out, const OpenMaxModel& model);
std::string save_model(const OpenMaxModel& model);
OpenMaxModel load_model(std::istream& in);
OpenMaxModel load_model(const std::string& text);

const char* to_string(WeightMode mode) noexcept;
const char* to_string(MavSource source) noexcept;
const char* to_string(RejectionMode mode) noexcept;

}  // namespace openmax
