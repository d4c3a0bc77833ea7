#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace openmax {

// A ground-truth or predicted label: either a known class index or unknown.
class Label {
public:
    constexpr Label() = default;

    static constexpr Label unknown() noexcept { return Label{}; }
    static constexpr Label known(std::size_t index) noexcept { return Label{index}; }

    constexpr bool is_unknown() const noexcept { return !index_.has_value(); }
    constexpr bool is_known() const noexcept { return index_.has_value(); }
    // Precondition: is_known().
    constexpr std::size_t index() const { return *index_; }

    friend constexpr bool operator==(const Label&, const Label&) = default;

private:
    constexpr explicit Label(std::size_t index) noexcept : index_(index) {}
    std::optional<std::size_t> index_;
};

// Ordered class names plus the reserved name of the unknown class.
class LabelSpace {
public:
    static constexpr std::string_view kDefaultUnknownName = "unknown";

    LabelSpace(std::vector<std::string> class_names,
               std::string unknown_name = std::string(kDefaultUnknownName));

    // Names "cls0" .. "cls{C-1}".
    static LabelSpace with_default_names(std::size_t num_classes);

    std::size_t num_classes() const noexcept { return class_names_.size(); }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    const std::string& unknown_name() const noexcept { return unknown_name_; }

    // Resolves a class name or the unknown name; nullopt when neither.
    std::optional<Label> find(std::string_view name) const;
    const std::string& name_of(Label label) const;

    friend bool operator==(const LabelSpace& a, const LabelSpace& b) {
        return a.class_names_ == b.class_names_ && a.unknown_name_ == b.unknown_name_;
    }

private:
    std::vector<std::string> class_names_;
    std::string unknown_name_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Index of the largest element; ties go to the lowest index.
// Precondition: values is non-empty.
std::size_t argmax(std::span<const double> values);

}  // namespace openmax
