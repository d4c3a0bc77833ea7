#include "openmax/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "openmax/error.hpp"
#include "openmax/openmax.hpp"

namespace openmax {

std::size_t metric_index(Label label, std::size_t num_classes) {
    if (label.is_unknown()) return num_classes;
    if (label.index() >= num_classes) {
        throw InvalidArgument("label index " + std::to_string(label.index()) + " out of range");
    }
    return label.index();
}

Label metric_label(std::size_t index, std::size_t num_classes) {
    return index == num_classes ? Label::unknown() : Label::known(index);
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t sum = 0;
    for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
    return sum;
}

std::vector<std::uint64_t> ConfusionMatrix::row_sums() const {
    std::vector<std::uint64_t> out;
    for (const auto& row : counts) out.push_back(std::accumulate(row.begin(), row.end(), std::uint64_t{0}));
    return out;
}

std::vector<std::uint64_t> ConfusionMatrix::column_sums() const {
    std::vector<std::uint64_t> out(size(), 0);
    for (const auto& row : counts) {
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
    }
    return out;
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const {
    std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
    const auto sums = row_sums();
    for (std::size_t i = 0; i < size(); ++i) {
        if (sums[i] == 0) continue;
        for (std::size_t j = 0; j < size(); ++j) {
            out[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(sums[i]);
        }
    }
    return out;
}

ConfusionMatrix confusion_matrix(std::span<const Label> truths, std::span<const Label> predictions,
                                 const LabelSpace& label_space) {
    if (truths.size() != predictions.size()) {
        throw InvalidArgument("confusion_matrix: " + std::to_string(truths.size()) + " truths but " +
                              std::to_string(predictions.size()) + " predictions");
    }
    const std::size_t num_classes = label_space.num_classes();
    ConfusionMatrix cm;
    cm.labels = label_space.class_names();
    cm.labels.push_back(label_space.unknown_name());
    cm.counts.assign(num_classes + 1, std::vector<std::uint64_t>(num_classes + 1, 0));
    for (std::size_t i = 0; i < truths.size(); ++i) {
        ++cm.counts[metric_index(truths[i], num_classes)][metric_index(predictions[i], num_classes)];
    }
    return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

ClassificationReport classification_report(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw InvalidArgument("classification_report: empty confusion matrix");
    const auto support = cm.row_sums();
    const auto predicted = cm.column_sums();

    ClassificationReport report;
    std::uint64_t trace = 0;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        const std::uint64_t tp = cm.counts[i][i];
        trace += tp;
        LabelMetrics m;
        m.label = cm.labels[i];
        m.support = support[i];
        m.predicted = predicted[i];
        m.precision_undefined = predicted[i] == 0;
        m.recall_undefined = support[i] == 0;
        m.prf.precision = ratio(tp, predicted[i]);
        m.prf.recall = ratio(tp, support[i]);
        m.prf.f1 = harmonic(m.prf.precision, m.prf.recall);
        report.per_label.push_back(m);
    }
    report.accuracy = ratio(trace, total);
    // Single-label predictions: pooled TP = trace, pooled TP + FP = pooled TP + FN = total.
    report.micro_f1 = harmonic(ratio(trace, total), ratio(trace, total));

    for (const auto& m : report.per_label) {
        const double w = static_cast<double>(m.support);
        report.weighted.precision += w * m.prf.precision;
        report.weighted.recall += w * m.prf.recall;
        report.weighted.f1 += w * m.prf.f1;
        if (m.support == 0 && m.predicted == 0) continue;
        ++report.macro_label_count;
        report.macro.precision += m.prf.precision;
        report.macro.recall += m.prf.recall;
        report.macro.f1 += m.prf.f1;
    }
    const double t = static_cast<double>(total);
    report.weighted.precision /= t;
    report.weighted.recall /= t;
    report.weighted.f1 /= t;
    const double n = static_cast<double>(report.macro_label_count);
    report.macro.precision /= n;
    report.macro.recall /= n;
    report.macro.f1 /= n;
    return report;
}

namespace {

struct TieGroup {
    double score;
    std::uint64_t positives;
    std::uint64_t negatives;
};

// Groups of equal score, highest score first.
std::vector<TieGroup> tie_groups(std::span<const double> scores, std::span<const bool> positives) {
    if (scores.size() != positives.size()) {
        throw InvalidArgument("ROC: " + std::to_string(scores.size()) + " scores but " +
                              std::to_string(positives.size()) + " truth flags");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (double s : scores) {
        if (std::isnan(s)) throw InvalidArgument("ROC: NaN score");
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<TieGroup> groups;
    for (std::size_t i : order) {
        if (groups.empty() || groups.back().score != scores[i]) groups.push_back({scores[i], 0, 0});
        (positives[i] ? groups.back().positives : groups.back().negatives) += 1;
    }
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    for (const auto& g : groups) {
        pos += g.positives;
        neg += g.negatives;
    }
    if (pos == 0 || neg == 0) throw InvalidArgument("ROC needs at least one positive and one negative");
    return groups;
}

double auc_from_groups(const std::vector<TieGroup>& groups) {
    // Walk from the lowest score up, counting negatives already passed.
    double wins = 0.0;
    std::uint64_t negatives_below = 0;
    std::uint64_t pos = 0;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
        wins += static_cast<double>(it->positives) * static_cast<double>(negatives_below) +
                0.5 * static_cast<double>(it->positives) * static_cast<double>(it->negatives);
        negatives_below += it->negatives;
        pos += it->positives;
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(negatives_below));
}

}  // namespace

double mann_whitney_auc(std::span<const double> scores, std::span<const bool> positives) {
    return auc_from_groups(tie_groups(scores, positives));
}

RocCurve roc_curve(std::span<const double> scores, std::span<const bool> positives) {
    const auto groups = tie_groups(scores, positives);
    std::uint64_t total_pos = 0;
    std::uint64_t total_neg = 0;
    for (const auto& g : groups) {
        total_pos += g.positives;
        total_neg += g.negatives;
    }
    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    for (const auto& g : groups) {
        tp += g.positives;
        fp += g.negatives;
        curve.points.push_back({g.score, ratio(fp, total_neg), ratio(tp, total_pos)});
    }
    curve.auc = auc_from_groups(groups);
    return curve;
}

RocCurve micro_average_roc(std::span<const std::vector<double>> per_label_scores, std::span<const Label> truths) {
    if (per_label_scores.size() < 2) throw InvalidArgument("micro-average ROC needs at least 2 labels");
    const std::size_t num_classes = per_label_scores.size() - 1;
    const std::size_t pooled = per_label_scores.size() * truths.size();
    std::vector<double> scores;
    scores.reserve(pooled);
    // std::vector<bool> cannot back a span.
    auto positives = std::make_unique<bool[]>(pooled);
    for (std::size_t l = 0; l < per_label_scores.size(); ++l) {
        const auto& column = per_label_scores[l];
        if (column.size() != truths.size()) {
            throw InvalidArgument("micro-average ROC: label " + std::to_string(l) + " has " +
                                  std::to_string(column.size()) + " scores for " + std::to_string(truths.size()) +
                                  " samples");
        }
        for (std::size_t i = 0; i < truths.size(); ++i) {
            positives[scores.size()] = metric_index(truths[i], num_classes) == l;
            scores.push_back(column[i]);
        }
    }
    return roc_curve(scores, std::span<const bool>(positives.get(), pooled));
}

std::vector<SweepRow> threshold_sweep(const OpenMaxModel& model, const ActivationSet& eval_set,
                                      std::span<const double> thresholds) {
    if (eval_set.empty()) throw InvalidArgument("threshold_sweep: empty evaluation set");
    if (thresholds.empty()) throw InvalidArgument("threshold_sweep: no thresholds");
    for (double t : thresholds) {
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("threshold_sweep: thresholds must lie in [0, 1]");
    }
    const auto outputs = score_set(model, eval_set);
    std::vector<Label> truths;
    truths.reserve(eval_set.size());
    for (const auto& rec : eval_set.records()) truths.push_back(rec.label);

    std::vector<SweepRow> rows;
    std::vector<Label> predictions(outputs.size());
    for (double t : thresholds) {
        std::size_t rejected = 0;
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            predictions[i] = decide(model, outputs[i], t);
            if (predictions[i].is_unknown()) ++rejected;
        }
        const auto report = classification_report(confusion_matrix(truths, predictions, model.label_space()));
        rows.push_back(SweepRow{t, report.accuracy, report.micro_f1, report.macro, report.weighted,
                                static_cast<double>(rejected) / static_cast<double>(outputs.size())});
    }
    return rows;
}

}  // namespace openmax
