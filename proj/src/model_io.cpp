#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "openmax/error.hpp"
#include "openmax/openmax.hpp"

namespace openmax {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

void save_model(std::ostream& out, const OpenMaxModel& model) {
    const auto& config = model.config();
    ordered_json doc;
    doc["format_version"] = model.format_version();
    doc["unknown_name"] = model.label_space().unknown_name();
    doc["class_names"] = model.label_space().class_names();
    doc["config"] = ordered_json{
        {"beta", model.beta()},
        {"weight_mode", to_string(config.weight_mode)},
        {"mav_source", to_string(config.mav_source)},
        {"tail_size", config.tail.tail_size},
        {"min_samples", config.tail.min_samples},
        {"rejection_mode", to_string(config.rejection_mode)},
    };
    ordered_json classes = ordered_json::array();
    for (const auto& cal : model.calibrations()) {
        classes.push_back(ordered_json{
            {"index", cal.class_index},
            {"mav", cal.mav},
            {"weibull",
             ordered_json{{"shape", cal.weibull.shape}, {"scale", cal.weibull.scale}, {"location", cal.weibull.location}}},
            {"n_calibration", cal.n_calibration},
            {"n_tail", cal.n_tail},
            {"tail_clamped", cal.tail_clamped},
        });
    }
    doc["classes"] = std::move(classes);
    out << doc.dump(2) << '\n';
}

std::string save_model(const OpenMaxModel& model) {
    std::ostringstream out;
    save_model(out, model);
    return out.str();
}

namespace {

[[noreturn]] void schema(const std::string& what) { throw ModelFormatError("model schema error: " + what); }

const json& field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) schema(where + " is missing '" + key + "'");
    return *it;
}

void allow_only(const json& obj, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional, const std::string& where) {
    std::set<std::string> known;
    for (const char* k : required) {
        known.insert(k);
        if (!obj.contains(k)) schema(where + " is missing '" + k + "'");
    }
    for (const char* k : optional) known.insert(k);
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) schema(where + " has unexpected key '" + key + "'");
    }
}

std::size_t count(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        schema(where + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) schema(where + " must be a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) schema(where + " must be a string");
    return v.get<std::string>();
}

template <typename Enum>
Enum parse_enum(const json& v, const std::string& where, std::initializer_list<std::pair<const char*, Enum>> values) {
    const std::string s = text(v, where);
    for (const auto& [name, value] : values) {
        if (s == name) return value;
    }
    schema(where + " has unsupported value '" + s + "'");
}

OpenMaxConfig parse_config(const json& obj) {
    if (!obj.is_object()) schema("config must be an object");
    allow_only(obj, {"beta", "weight_mode", "mav_source", "tail_size", "rejection_mode"}, {"min_samples"}, "config");
    OpenMaxConfig config;
    config.beta = count(obj["beta"], "config.beta");
    config.weight_mode = parse_enum<WeightMode>(
        obj["weight_mode"], "config.weight_mode",
        {{"paper_literal", WeightMode::paper_literal}, {"classic", WeightMode::classic}});
    config.mav_source = parse_enum<MavSource>(obj["mav_source"], "config.mav_source",
                                              {{"correct_only", MavSource::correct_only}, {"all", MavSource::all}});
    config.tail.tail_size = count(obj["tail_size"], "config.tail_size");
    if (obj.contains("min_samples")) config.tail.min_samples = count(obj["min_samples"], "config.min_samples");
    config.rejection_mode = parse_enum<RejectionMode>(
        obj["rejection_mode"], "config.rejection_mode",
        {{"openmax_probability", RejectionMode::openmax_probability},
         {"simple_recalibrated", RejectionMode::simple_recalibrated}});
    return config;
}

ClassCalibration parse_class(const json& obj, std::size_t position) {
    const std::string where = "classes[" + std::to_string(position) + "]";
    if (!obj.is_object()) schema(where + " must be an object");
    allow_only(obj, {"index", "mav", "weibull", "n_calibration", "n_tail", "tail_clamped"}, {}, where);
    ClassCalibration cal;
    cal.class_index = count(obj["index"], where + ".index");
    const auto& mav = obj["mav"];
    if (!mav.is_array()) schema(where + ".mav must be an array");
    for (const auto& v : mav) cal.mav.push_back(number(v, where + ".mav"));
    const auto& w = obj["weibull"];
    if (!w.is_object()) schema(where + ".weibull must be an object");
    allow_only(w, {"shape", "scale", "location"}, {}, where + ".weibull");
    cal.weibull.shape = number(w["shape"], where + ".weibull.shape");
    cal.weibull.scale = number(w["scale"], where + ".weibull.scale");
    cal.weibull.location = number(w["location"], where + ".weibull.location");
    cal.n_calibration = count(obj["n_calibration"], where + ".n_calibration");
    cal.n_tail = count(obj["n_tail"], where + ".n_tail");
    if (!obj["tail_clamped"].is_boolean()) schema(where + ".tail_clamped must be a boolean");
    cal.tail_clamped = obj["tail_clamped"].get<bool>();
    return cal;
}

}  // namespace

OpenMaxModel load_model(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        schema(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema("top level must be an object");

    const auto& version = field(doc, "format_version", "model");
    if (!version.is_number_integer()) schema("format_version must be an integer");
    if (version.get<std::int64_t>() != kModelFormatVersion) {
        throw ModelFormatError("unsupported format_version " + std::to_string(version.get<std::int64_t>()) +
                               " (supported: " + std::to_string(kModelFormatVersion) + ")");
    }
    allow_only(doc, {"format_version", "unknown_name", "class_names", "config", "classes"}, {}, "model");

    std::vector<std::string> names;
    if (!doc["class_names"].is_array()) schema("class_names must be an array");
    for (const auto& n : doc["class_names"]) names.push_back(text(n, "class_names"));
    const std::string unknown_name = text(doc["unknown_name"], "unknown_name");
    OpenMaxConfig config = parse_config(doc["config"]);

    const auto& classes = doc["classes"];
    if (!classes.is_array()) schema("classes must be an array");
    if (classes.size() != names.size()) {
        schema("expected " + std::to_string(names.size()) + " classes, found " + std::to_string(classes.size()));
    }
    std::vector<ClassCalibration> calibrations;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        calibrations.push_back(parse_class(classes[i], i));
        if (calibrations.back().class_index != i) schema("classes must be ordered by index");
    }

    try {
        return OpenMaxModel(LabelSpace(std::move(names), unknown_name), std::move(calibrations), std::move(config),
                            static_cast<int>(version.get<std::int64_t>()));
    } catch (const InvalidArgument& e) {
        throw ModelFormatError(std::string("model invariant violated: ") + e.what());
    }
}

OpenMaxModel load_model(const std::string& text) {
    std::istringstream in(text);
    return load_model(in);
}

}  // namespace openmax
