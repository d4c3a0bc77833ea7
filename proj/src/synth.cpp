#include "openmax/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "openmax/error.hpp"
#include "openmax/rng.hpp"

namespace openmax {

void validate(const SynthConfig& config) {
    if (config.n_known_classes < 2) throw InvalidArgument("synth: need at least 2 known classes");
    if (config.dim < 2) throw InvalidArgument("synth: dim must be at least 2");
    if (!(config.class_radius > 0.0) || !(config.unknown_radius > 0.0) || !(config.cluster_sigma > 0.0)) {
        throw InvalidArgument("synth: radii and sigma must be positive");
    }
    if (config.n_unknown_clusters > 0 && config.unknown_radius == config.class_radius) {
        throw InvalidArgument("synth: unknown_radius must differ from class_radius");
    }
}

namespace {

// Draw order on the seeded stream: known means, unknown means, then samples.
struct Geometry {
    std::vector<Vector> known;
    std::vector<Vector> unknown;
};

Vector scaled_unit(Vector v, double radius) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x *= radius / norm;
    return v;
}

Vector random_direction(SplitMix64& rng, std::size_t dim, double radius) {
    while (true) {
        Vector v(dim);
        double norm = 0.0;
        for (double& x : v) {
            x = rng.normal();
            norm += x * x;
        }
        if (norm > 1e-12) return scaled_unit(std::move(v), radius);
    }
}

Geometry draw_geometry(const SynthConfig& config, SplitMix64& rng) {
    Geometry g;
    if (config.dim >= config.n_known_classes) {
        std::vector<std::size_t> axes(config.dim);
        std::iota(axes.begin(), axes.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(axes));
        for (std::size_t c = 0; c < config.n_known_classes; ++c) {
            Vector m(config.dim, 0.0);
            m[axes[c]] = config.class_radius;
            g.known.push_back(std::move(m));
        }
    } else {
        for (std::size_t c = 0; c < config.n_known_classes; ++c) {
            g.known.push_back(random_direction(rng, config.dim, config.class_radius));
        }
    }
    // Each unknown cluster sits between a seeded pair of known classes.
    for (std::size_t u = 0; u < config.n_unknown_clusters; ++u) {
        const auto a = static_cast<std::size_t>(rng.below(config.n_known_classes));
        auto b = static_cast<std::size_t>(rng.below(config.n_known_classes - 1));
        if (b >= a) ++b;
        Vector dir(config.dim);
        for (std::size_t d = 0; d < config.dim; ++d) dir[d] = g.known[a][d] + g.known[b][d];
        bool degenerate = std::all_of(dir.begin(), dir.end(), [](double x) { return std::abs(x) < 1e-12; });
        g.unknown.push_back(degenerate ? random_direction(rng, config.dim, config.unknown_radius)
                                       : scaled_unit(std::move(dir), config.unknown_radius));
    }
    return g;
}

void draw_cluster(SplitMix64& rng, const Vector& mean, double sigma, std::size_t n, std::vector<Vector>& out) {
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(mean.size());
        for (std::size_t d = 0; d < mean.size(); ++d) x[d] = mean[d] + sigma * rng.normal();
        out.push_back(std::move(x));
    }
}

std::vector<std::size_t> grouped_labels(std::size_t classes, std::size_t per_class) {
    std::vector<std::size_t> labels;
    labels.reserve(classes * per_class);
    for (std::size_t c = 0; c < classes; ++c) labels.insert(labels.end(), per_class, c);
    return labels;
}

}  // namespace

Blobs generate_blobs(const SynthConfig& config, std::uint64_t seed) {
    validate(config);
    SplitMix64 rng(seed);
    Geometry g = draw_geometry(config, rng);
    Blobs blobs;
    for (const auto& mean : g.known) draw_cluster(rng, mean, config.cluster_sigma, config.per_class_train, blobs.features);
    blobs.labels = grouped_labels(config.n_known_classes, config.per_class_train);
    blobs.means = std::move(g.known);
    return blobs;
}

LinearClassifier LinearClassifier::zeros(std::size_t num_classes, std::size_t dim) {
    return LinearClassifier{num_classes, dim, std::vector<double>(num_classes * dim, 0.0), Vector(num_classes, 0.0)};
}

Vector LinearClassifier::logits(std::span<const double> x) const {
    if (x.size() != dim) throw DimensionMismatch("classifier input", dim, x.size());
    Vector z(bias);
    for (std::size_t c = 0; c < num_classes; ++c) {
        const double* w = weights.data() + c * dim;
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) acc += w[d] * x[d];
        z[c] += acc;
    }
    return z;
}

namespace {

void check_training_inputs(const LinearClassifier& classifier, std::span<const Vector> features,
                           std::span<const std::size_t> labels) {
    if (features.size() != labels.size()) {
        throw InvalidArgument("training: " + std::to_string(features.size()) + " features but " +
                              std::to_string(labels.size()) + " labels");
    }
    if (features.empty()) throw InvalidArgument("training: no samples");
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != classifier.dim) throw DimensionMismatch("training feature", classifier.dim, features[i].size());
        if (labels[i] >= classifier.num_classes) throw InvalidArgument("training: label out of range");
    }
}

// Loss and (optionally) gradient in one pass over the data.
double loss_and_gradient(const LinearClassifier& clf, std::span<const Vector> features,
                         std::span<const std::size_t> labels, double l2, Gradient* grad) {
    const std::size_t num_classes = clf.num_classes;
    const std::size_t dim = clf.dim;
    const double inv_n = 1.0 / static_cast<double>(features.size());
    if (grad) {
        grad->weights.assign(num_classes * dim, 0.0);
        grad->bias.assign(num_classes, 0.0);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        Vector z = clf.logits(features[i]);
        double peak = z[0];
        for (double v : z) peak = std::max(peak, v);
        double sum = 0.0;
        for (double& v : z) {
            v = std::exp(v - peak);
            sum += v;
        }
        const std::size_t y = labels[i];
        loss -= std::log(z[y] / sum);
        if (!grad) continue;
        for (std::size_t c = 0; c < num_classes; ++c) {
            const double delta = (z[c] / sum - (c == y ? 1.0 : 0.0)) * inv_n;
            grad->bias[c] += delta;
            double* row = grad->weights.data() + c * dim;
            const Vector& x = features[i];
            for (std::size_t d = 0; d < dim; ++d) row[d] += delta * x[d];
        }
    }
    loss *= inv_n;
    double sq = 0.0;
    for (double w : clf.weights) sq += w * w;
    loss += 0.5 * l2 * sq;
    if (grad) {
        for (std::size_t k = 0; k < clf.weights.size(); ++k) grad->weights[k] += l2 * clf.weights[k];
    }
    return loss;
}

}  // namespace

double cross_entropy_loss(const LinearClassifier& classifier, std::span<const Vector> features,
                          std::span<const std::size_t> labels, double l2) {
    check_training_inputs(classifier, features, labels);
    return loss_and_gradient(classifier, features, labels, l2, nullptr);
}

Gradient cross_entropy_gradient(const LinearClassifier& classifier, std::span<const Vector> features,
                                std::span<const std::size_t> labels, double l2) {
    check_training_inputs(classifier, features, labels);
    Gradient grad;
    loss_and_gradient(classifier, features, labels, l2, &grad);
    return grad;
}

TrainResult train_linear_softmax(std::span<const Vector> features, std::span<const std::size_t> labels,
                                 std::size_t num_classes, const TrainHyper& hyper) {
    if (features.empty()) throw InvalidArgument("training: no samples");
    if (!(hyper.learning_rate > 0.0) || !(hyper.l2 >= 0.0)) throw InvalidArgument("training: bad hyperparameters");
    TrainResult result{LinearClassifier::zeros(num_classes, features.front().size()), {}};
    check_training_inputs(result.classifier, features, labels);
    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t y : labels) ++counts[y];
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (counts[c] == 0) throw InvalidArgument("training: class " + std::to_string(c) + " has no samples");
    }

    auto& clf = result.classifier;
    Gradient grad;
    result.loss_trace.reserve(hyper.iterations + 1);
    for (std::size_t it = 0; it < hyper.iterations; ++it) {
        const double loss = loss_and_gradient(clf, features, labels, hyper.l2, &grad);
        if (!std::isfinite(loss)) throw InvalidArgument("training diverged: non-finite loss at iteration " + std::to_string(it));
        result.loss_trace.push_back(loss);
        for (std::size_t k = 0; k < clf.weights.size(); ++k) clf.weights[k] -= hyper.learning_rate * grad.weights[k];
        for (std::size_t c = 0; c < num_classes; ++c) clf.bias[c] -= hyper.learning_rate * grad.bias[c];
    }
    const double final_loss = loss_and_gradient(clf, features, labels, hyper.l2, nullptr);
    if (!std::isfinite(final_loss)) throw InvalidArgument("training diverged: non-finite final loss");
    result.loss_trace.push_back(final_loss);
    return result;
}

ActivationSet classifier_logits(const LinearClassifier& classifier, std::span<const Vector> features,
                                std::span<const Label> labels, const LabelSpace& label_space,
                                const std::string& id_prefix) {
    if (features.size() != labels.size()) throw InvalidArgument("classifier_logits: features/labels length mismatch");
    if (classifier.num_classes != label_space.num_classes()) {
        throw DimensionMismatch("classifier outputs vs label space", label_space.num_classes(), classifier.num_classes);
    }
    std::vector<ActivationRecord> records;
    records.reserve(features.size());
    char id[32];
    for (std::size_t i = 0; i < features.size(); ++i) {
        std::snprintf(id, sizeof id, "%06zu", i);
        records.push_back(ActivationRecord{id_prefix + id, labels[i], classifier.logits(features[i])});
    }
    return ActivationSet(label_space, std::move(records));
}

OpenSetBenchmark make_openset_benchmark(const SynthConfig& config, std::uint64_t seed, const TrainHyper& hyper) {
    validate(config);
    if (config.n_unknown_clusters == 0) throw InvalidArgument("benchmark needs at least one unknown cluster");
    SplitMix64 rng(seed);
    Geometry g = draw_geometry(config, rng);

    std::vector<Vector> train;
    for (const auto& mean : g.known) draw_cluster(rng, mean, config.cluster_sigma, config.per_class_train, train);
    std::vector<Vector> test;
    for (const auto& mean : g.known) draw_cluster(rng, mean, config.cluster_sigma, config.per_class_test, test);
    std::vector<Vector> unknown;
    for (const auto& mean : g.unknown) draw_cluster(rng, mean, config.cluster_sigma, config.per_unknown_test, unknown);

    const auto train_labels = grouped_labels(config.n_known_classes, config.per_class_train);
    TrainResult trained = train_linear_softmax(train, train_labels, config.n_known_classes, hyper);

    const LabelSpace space = LabelSpace::with_default_names(config.n_known_classes);
    auto as_labels = [](std::span<const std::size_t> idx) {
        std::vector<Label> out;
        for (std::size_t i : idx) out.push_back(Label::known(i));
        return out;
    };
    ActivationSet calibration =
        classifier_logits(trained.classifier, train, as_labels(train_labels), space, "train-");
    ActivationSet known_eval = classifier_logits(
        trained.classifier, test, as_labels(grouped_labels(config.n_known_classes, config.per_class_test)), space,
        "test-");
    ActivationSet unknown_eval = classifier_logits(trained.classifier, unknown,
                                                   std::vector<Label>(unknown.size(), Label::unknown()), space, "unk-");
    std::vector<ActivationRecord> eval_records = known_eval.records();
    eval_records.insert(eval_records.end(), unknown_eval.records().begin(), unknown_eval.records().end());

    return OpenSetBenchmark{std::move(calibration),
                            ActivationSet(space, std::move(eval_records)),
                            std::move(trained.classifier),
                            std::move(g.known),
                            std::move(g.unknown),
                            std::move(trained.loss_trace)};
}

}  // namespace openmax
