#include "openmax/labels.hpp"

#include "openmax/error.hpp"

namespace openmax {

LabelSpace::LabelSpace(std::vector<std::string> class_names, std::string unknown_name)
    : class_names_(std::move(class_names)), unknown_name_(std::move(unknown_name)) {
    if (class_names_.size() < 2) {
        throw InvalidArgument("label space needs at least 2 classes, got " +
                              std::to_string(class_names_.size()));
    }
    if (unknown_name_.empty()) throw InvalidArgument("unknown class name is empty");
    for (std::size_t i = 0; i < class_names_.size(); ++i) {
        const auto& name = class_names_[i];
        if (name.empty()) throw InvalidArgument("class name " + std::to_string(i) + " is empty");
        if (name == unknown_name_) {
            throw InvalidArgument("class name '" + name + "' collides with the unknown name");
        }
        if (!index_.emplace(name, i).second) {
            throw InvalidArgument("duplicate class name '" + name + "'");
        }
    }
}

LabelSpace LabelSpace::with_default_names(std::size_t num_classes) {
    std::vector<std::string> names;
    names.reserve(num_classes);
    for (std::size_t i = 0; i < num_classes; ++i) names.push_back("cls" + std::to_string(i));
    return LabelSpace(std::move(names));
}

std::optional<Label> LabelSpace::find(std::string_view name) const {
    if (name == unknown_name_) return Label::unknown();
    if (auto it = index_.find(std::string(name)); it != index_.end()) {
        return Label::known(it->second);
    }
    return std::nullopt;
}

const std::string& LabelSpace::name_of(Label label) const {
    if (label.is_unknown()) return unknown_name_;
    if (label.index() >= class_names_.size()) {
        throw InvalidArgument("class index " + std::to_string(label.index()) + " out of range");
    }
    return class_names_[label.index()];
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

}  // namespace openmax
