#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "openmax/activation.hpp"
#include "openmax/labels.hpp"

namespace openmax {

class OpenMaxModel;

// Metric label order: class 0 .. C-1, then unknown at position C.
std::size_t metric_index(Label label, std::size_t num_classes);
Label metric_label(std::size_t index, std::size_t num_classes);

// Rows are truth, columns are prediction.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint64_t>> counts;

    std::size_t size() const noexcept { return labels.size(); }
    std::uint64_t total() const noexcept;
    std::vector<std::uint64_t> row_sums() const;
    std::vector<std::uint64_t> column_sums() const;
    // Rows divided by their sums; empty rows stay zero.
    std::vector<std::vector<double>> row_normalized() const;
};

ConfusionMatrix confusion_matrix(std::span<const Label> truths, std::span<const Label> predictions,
                                 const LabelSpace& label_space);

struct PrfTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct LabelMetrics {
    std::string label;
    PrfTriple prf;
    std::uint64_t support = 0;
    std::uint64_t predicted = 0;
    // Set when the metric's denominator vanished and the value was defined as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
};

struct ClassificationReport {
    double accuracy = 0.0;
    // Micro-averaged F1 over all labels.
    double micro_f1 = 0.0;
    std::vector<LabelMetrics> per_label;
    PrfTriple macro;
    PrfTriple weighted;
    std::size_t macro_label_count = 0;
};

// Macro averages run over labels that occur in the truths or the predictions.
ClassificationReport classification_report(const ConfusionMatrix& cm);

struct RocPoint {
    double threshold = 0.0;
    double false_positive_rate = 0.0;
    double true_positive_rate = 0.0;
};

struct RocCurve {
    // Begins at (0, 0) with an infinite threshold and ends at (1, 1).
    std::vector<RocPoint> points;
    double auc = 0.0;
};

// Mann-Whitney AUC with ties credited 0.5.
double mann_whitney_auc(std::span<const double> scores, std::span<const bool> positives);

RocCurve roc_curve(std::span<const double> scores, std::span<const bool> positives);

// per_label_scores[l][i] is sample i's score for metric label l (classes in
// order, unknown last). Pools every (score, truth == l) pair.
RocCurve micro_average_roc(std::span<const std::vector<double>> per_label_scores, std::span<const Label> truths);

struct SweepRow {
    double threshold = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    PrfTriple macro;
    PrfTriple weighted;
    double reject_rate = 0.0;
};

inline const std::vector<double> kDefaultThresholds{0.5, 0.4, 0.3, 0.2, 0.1};

std::vector<SweepRow> threshold_sweep(const OpenMaxModel& model, const ActivationSet& eval_set,
                                      std::span<const double> thresholds);

}  // namespace openmax
