#include "openmax/error.hpp"

namespace openmax {

const char* to_string(FitErrorKind kind) noexcept {
    switch (kind) {
        case FitErrorKind::degenerate_tail: return "DegenerateTail";
        case FitErrorKind::too_few_samples: return "TooFewSamples";
        case FitErrorKind::no_bracket: return "NoBracket";
        case FitErrorKind::class_underpopulated: return "ClassUnderpopulated";
    }
    return "FitError";
}

namespace {

std::string fit_message(FitErrorKind kind, const std::string& detail,
                        std::optional<std::size_t> class_index) {
    std::string msg = to_string(kind);
    if (class_index) msg += "(class " + std::to_string(*class_index) + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
}

}  // namespace

FitError::FitError(FitErrorKind kind, const std::string& detail,
                   std::optional<std::size_t> class_index)
    : Error(fit_message(kind, detail, class_index)),
      kind_(kind),
      detail_(detail),
      class_index_(class_index) {}

}  // namespace openmax
