#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "openmax/labels.hpp"

namespace openmax {

using Vector = std::vector<double>;

struct ActivationRecord {
    std::string id;
    Label label;
    Vector logits;

    friend bool operator==(const ActivationRecord&, const ActivationRecord&) = default;
};

// Labeled activation (logit) vectors sharing one label space. Immutable once
// constructed; the constructor enforces dimensionality, finiteness and id
// uniqueness.
class ActivationSet {
public:
    explicit ActivationSet(LabelSpace label_space, std::vector<ActivationRecord> records = {});

    const LabelSpace& label_space() const noexcept { return label_space_; }
    const std::vector<ActivationRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    std::size_t dim() const noexcept { return label_space_.num_classes(); }

    bool has_unknown_labels() const noexcept;

    friend bool operator==(const ActivationSet& a, const ActivationSet& b) {
        return a.label_space_ == b.label_space_ && a.records_ == b.records_;
    }

private:
    LabelSpace label_space_;
    std::vector<ActivationRecord> records_;
};

struct ParseOptions {
    // When set, labels that are empty or outside the label space are read as
    // unknown instead of rejected. Used for scoring, where truth is unused.
    bool lenient_labels = false;
};

// Reads the CSV activation table or its JSON-lines variant (dispatching on a
// leading '{'). Without a label space, classes are named cls0..cls{C-1}.
ActivationSet parse_activation_table(std::istream& in,
                                     const std::optional<LabelSpace>& label_space = std::nullopt,
                                     ParseOptions options = {});
ActivationSet parse_activation_table(const std::string& text,
                                     const std::optional<LabelSpace>& label_space = std::nullopt,
                                     ParseOptions options = {});

// Canonical CSV form; numbers use the shortest round-trip representation.
void write_activation_table(std::ostream& out, const ActivationSet& set);
std::string write_activation_table(const ActivationSet& set);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

struct Partition {
    ActivationSet correct;
    ActivationSet incorrect;
};

// Splits records by whether argmax(logits) equals the label.
Partition partition_correct(const ActivationSet& set);

// groups[c] holds the logits of every record labeled c, in input order.
std::vector<std::vector<Vector>> group_by_label(const ActivationSet& set);

}  // namespace openmax
