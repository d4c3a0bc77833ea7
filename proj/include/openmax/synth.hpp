#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "openmax/activation.hpp"

namespace openmax {

struct SynthConfig {
    std::size_t n_known_classes = 10;
    std::size_t n_unknown_clusters = 3;
    std::size_t dim = 32;
    double class_radius = 4.0;
    double unknown_radius = 6.0;
    double cluster_sigma = 0.5;
    std::size_t per_class_train = 300;
    std::size_t per_class_test = 100;
    std::size_t per_unknown_test = 100;
};

void validate(const SynthConfig& config);

struct Blobs {
    std::vector<Vector> features;
    std::vector<std::size_t> labels;
    std::vector<Vector> means;
};

// Known-class means: class_radius times seed-permuted coordinate axes (random
// unit directions when dim < n_known_classes). Samples are mean plus isotropic
// Gaussian noise, grouped by class.
Blobs generate_blobs(const SynthConfig& config, std::uint64_t seed);

struct LinearClassifier {
    std::size_t num_classes = 0;
    std::size_t dim = 0;
    // Row-major num_classes x dim.
    std::vector<double> weights;
    Vector bias;

    static LinearClassifier zeros(std::size_t num_classes, std::size_t dim);
    double& weight(std::size_t c, std::size_t d) { return weights[c * dim + d]; }
    double weight(std::size_t c, std::size_t d) const { return weights[c * dim + d]; }
    Vector logits(std::span<const double> x) const;
};

struct TrainHyper {
    double learning_rate = 0.1;
    std::size_t iterations = 300;
    double l2 = 1e-4;
};

// Mean cross-entropy plus (l2 / 2) ||W||^2; the bias is not penalized.
double cross_entropy_loss(const LinearClassifier& classifier, std::span<const Vector> features,
                          std::span<const std::size_t> labels, double l2);

struct Gradient {
    std::vector<double> weights;
    Vector bias;
};

Gradient cross_entropy_gradient(const LinearClassifier& classifier, std::span<const Vector> features,
                                std::span<const std::size_t> labels, double l2);

struct TrainResult {
    LinearClassifier classifier;
    // Loss before each step, plus the final loss.
    std::vector<double> loss_trace;
};

// Full-batch gradient descent from zero weights.
TrainResult train_linear_softmax(std::span<const Vector> features, std::span<const std::size_t> labels,
                                 std::size_t num_classes, const TrainHyper& hyper = {});

// Logits for each feature row; ids are id_prefix followed by a zero-padded
// sequence number.
ActivationSet classifier_logits(const LinearClassifier& classifier, std::span<const Vector> features,
                                std::span<const Label> labels, const LabelSpace& label_space,
                                const std::string& id_prefix = "r");

struct OpenSetBenchmark {
    ActivationSet calibration;
    ActivationSet eval;
    LinearClassifier classifier;
    std::vector<Vector> known_means;
    std::vector<Vector> unknown_means;
    std::vector<double> loss_trace;
};

OpenSetBenchmark make_openset_benchmark(const SynthConfig& config, std::uint64_t seed,
                                        const TrainHyper& hyper = {});

}  // namespace openmax
