#include "openmax/activation.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include <json.hpp>

#include "openmax/error.hpp"

namespace openmax {

ActivationSet::ActivationSet(LabelSpace label_space, std::vector<ActivationRecord> records)
    : label_space_(std::move(label_space)), records_(std::move(records)) {
    const std::size_t dim = label_space_.num_classes();
    std::unordered_set<std::string_view> ids;
    ids.reserve(records_.size());
    for (const auto& rec : records_) {
        if (rec.logits.size() != dim) {
            throw DimensionMismatch("record '" + rec.id + "' logits", dim, rec.logits.size());
        }
        for (double v : rec.logits) {
            if (!std::isfinite(v)) throw InvalidArgument("record '" + rec.id + "' has a non-finite logit");
        }
        if (rec.label.is_known() && rec.label.index() >= dim) {
            throw InvalidArgument("record '" + rec.id + "' label index out of range");
        }
        if (!ids.insert(rec.id).second) throw InvalidArgument("duplicate record id '" + rec.id + "'");
    }
}

bool ActivationSet::has_unknown_labels() const noexcept {
    for (const auto& rec : records_) {
        if (rec.label.is_unknown()) return true;
    }
    return false;
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), end);
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

double parse_logit(std::string_view token, std::size_t line_no) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (token.empty() || ec != std::errc{} || ptr != last) {
        fail(line_no, "non-numeric logit '" + std::string(token) + "'");
    }
    if (!std::isfinite(value)) fail(line_no, "non-finite logit '" + std::string(token) + "'");
    return value;
}

Label resolve_label(const LabelSpace& space, std::string_view name, std::size_t line_no,
                    const ParseOptions& options) {
    if (auto label = space.find(name)) return *label;
    if (options.lenient_labels) return Label::unknown();
    fail(line_no, "unknown label '" + std::string(name) + "'");
}

void add_record(std::vector<ActivationRecord>& records, std::unordered_set<std::string>& ids,
                ActivationRecord rec, std::size_t line_no) {
    if (rec.id.empty()) fail(line_no, "empty id");
    if (!ids.insert(rec.id).second) fail(line_no, "duplicate id '" + rec.id + "'");
    records.push_back(std::move(rec));
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

ActivationSet parse_csv(std::istream& in, const std::optional<LabelSpace>& label_space,
                        const ParseOptions& options) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("malformed header: empty input");
    const auto header = split_commas(strip_cr(line));
    if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
        throw ParseError("malformed header: expected 'id,label,z0,...'");
    }
    const std::size_t dim = header.size() - 2;
    for (std::size_t k = 0; k < dim; ++k) {
        if (header[k + 2] != "z" + std::to_string(k)) {
            throw ParseError("malformed header: column " + std::to_string(k + 2) + " should be z" +
                             std::to_string(k));
        }
    }
    if (label_space && label_space->num_classes() != dim) {
        throw DimensionMismatch("activation table logit columns vs label space classes", label_space->num_classes(),
                                dim);
    }
    LabelSpace space = label_space ? *label_space : LabelSpace::with_default_names(dim);

    std::vector<ActivationRecord> records;
    std::unordered_set<std::string> ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = strip_cr(line);
        if (row.empty()) continue;
        const auto cols = split_commas(row);
        if (cols.size() != dim + 2) {
            fail(line_no, "wrong column count: expected " + std::to_string(dim + 2) + ", got " +
                              std::to_string(cols.size()));
        }
        ActivationRecord rec;
        rec.id = std::string(cols[0]);
        rec.label = resolve_label(space, cols[1], line_no, options);
        rec.logits.reserve(dim);
        for (std::size_t k = 0; k < dim; ++k) rec.logits.push_back(parse_logit(cols[k + 2], line_no));
        add_record(records, ids, std::move(rec), line_no);
    }
    return ActivationSet(std::move(space), std::move(records));
}

ActivationSet parse_jsonl(std::istream& in, const std::optional<LabelSpace>& label_space,
                          const ParseOptions& options) {
    std::optional<LabelSpace> space = label_space;
    std::vector<ActivationRecord> records;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = strip_cr(line);
        if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            fail(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object() || obj.size() != 3 || !obj.contains("id") || !obj.contains("label") ||
            !obj.contains("logits")) {
            fail(line_no, "expected an object with exactly id, label, logits");
        }
        if (!obj["id"].is_string() || !obj["label"].is_string() || !obj["logits"].is_array()) {
            fail(line_no, "id and label must be strings, logits an array");
        }
        const auto& logits = obj["logits"];
        if (!space) {
            if (logits.size() < 2) fail(line_no, "need at least 2 logits");
            space = LabelSpace::with_default_names(logits.size());
        }
        if (label_space && logits.size() != label_space->num_classes()) {
            throw DimensionMismatch("line " + std::to_string(line_no) + " logits vs label space classes",
                                    label_space->num_classes(), logits.size());
        }
        if (logits.size() != space->num_classes()) {
            fail(line_no, "wrong logit count: expected " + std::to_string(space->num_classes()) + ", got " +
                              std::to_string(logits.size()));
        }
        ActivationRecord rec;
        rec.id = obj["id"].get<std::string>();
        rec.label = resolve_label(*space, obj["label"].get<std::string>(), line_no, options);
        for (const auto& v : logits) {
            if (!v.is_number()) fail(line_no, "non-numeric logit");
            const double x = v.get<double>();
            if (!std::isfinite(x)) fail(line_no, "non-finite logit");
            rec.logits.push_back(x);
        }
        add_record(records, ids, std::move(rec), line_no);
    }
    if (!space) throw ParseError("empty JSON-lines input");
    return ActivationSet(std::move(*space), std::move(records));
}

}  // namespace

ActivationSet parse_activation_table(std::istream& in, const std::optional<LabelSpace>& label_space,
                                     ParseOptions options) {
    in >> std::ws;
    if (in.peek() == '{') return parse_jsonl(in, label_space, options);
    return parse_csv(in, label_space, options);
}

ActivationSet parse_activation_table(const std::string& text, const std::optional<LabelSpace>& label_space,
                                     ParseOptions options) {
    std::istringstream in(text);
    return parse_activation_table(in, label_space, options);
}

void write_activation_table(std::ostream& out, const ActivationSet& set) {
    out << "id,label";
    for (std::size_t k = 0; k < set.dim(); ++k) out << ",z" << k;
    out << '\n';
    for (const auto& rec : set.records()) {
        out << rec.id << ',' << set.label_space().name_of(rec.label);
        for (double v : rec.logits) out << ',' << format_double(v);
        out << '\n';
    }
}

std::string write_activation_table(const ActivationSet& set) {
    std::ostringstream out;
    write_activation_table(out, set);
    return out.str();
}

namespace {

void require_no_unknown(const ActivationSet& set, const char* op) {
    for (const auto& rec : set.records()) {
        if (rec.label.is_unknown()) {
            throw InvalidArgument(std::string(op) + ": record '" + rec.id + "' is labeled unknown");
        }
    }
}

}  // namespace

Partition partition_correct(const ActivationSet& set) {
    require_no_unknown(set, "partition_correct");
    std::vector<ActivationRecord> correct;
    std::vector<ActivationRecord> incorrect;
    for (const auto& rec : set.records()) {
        if (argmax(rec.logits) == rec.label.index()) {
            correct.push_back(rec);
        } else {
            incorrect.push_back(rec);
        }
    }
    return Partition{ActivationSet(set.label_space(), std::move(correct)),
                     ActivationSet(set.label_space(), std::move(incorrect))};
}

std::vector<std::vector<Vector>> group_by_label(const ActivationSet& set) {
    require_no_unknown(set, "group_by_label");
    std::vector<std::vector<Vector>> groups(set.dim());
    for (const auto& rec : set.records()) groups[rec.label.index()].push_back(rec.logits);
    return groups;
}

}  // namespace openmax
