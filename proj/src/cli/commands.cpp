#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/files.hpp"
#include "cli/svg.hpp"
#include "openmax/activation.hpp"
#include "openmax/error.hpp"
#include "openmax/metrics.hpp"
#include "openmax/openmax.hpp"
#include "openmax/synth.hpp"

namespace openmax::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 7;
    bool quiet = false;
};

struct SynthArgs {
    fs::path out_dir;
    SynthConfig config;
    TrainHyper hyper;
};

struct FitArgs {
    fs::path calibration;
    fs::path model;
    std::optional<std::size_t> beta;
    std::string weight_mode = "paper";
    std::string mav_source = "correct";
    std::size_t tail_size = 20;
    std::size_t min_samples = 3;
    std::string rejection = "openmax";
    std::string class_names;
    std::string unknown_name = std::string(LabelSpace::kDefaultUnknownName);
    fs::path weibull_csv;
    fs::path weibull_svg;
};

struct EvalArgs {
    fs::path model;
    fs::path input;
    double epsilon = 0.1;
    fs::path out;
    bool charts = false;
};

struct SweepArgs {
    fs::path model;
    fs::path input;
    std::string thresholds = "0.5,0.4,0.3,0.2,0.1";
    fs::path out;
    fs::path chart;
};

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    for (auto token : split(text, ',')) {
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
            throw UsageError("invalid threshold '" + token + "'");
        }
        if (!(v >= 0.0 && v <= 1.0)) throw UsageError("threshold " + token + " outside [0, 1]");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("--thresholds needs at least one value");
    return out;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (unsigned char c : name) out += (std::isalnum(c) || c == '-' || c == '_') ? static_cast<char>(c) : '_';
    return out;
}

OpenMaxModel read_model(const fs::path& path) { return load_model(read_file(path)); }

ActivationSet read_table(const fs::path& path, const std::optional<LabelSpace>& space, ParseOptions options = {}) {
    return parse_activation_table(read_file(path), space, options);
}

// ---------------------------------------------------------------- synth

CommandOutcome cmd_synth(const SynthArgs& args, const Globals& g, std::ostream& out) {
    CommandOutcome outcome;
    const fs::path calibration_path = args.out_dir / "calibration.csv";
    const fs::path eval_path = args.out_dir / "eval.csv";
    const fs::path manifest_path = args.out_dir / "manifest.json";
    StagedFiles probe;
    probe.add(manifest_path, "");
    probe.check_targets();

    const auto bench = make_openset_benchmark(args.config, g.seed, args.hyper);
    std::size_t correct = 0;
    std::size_t known = 0;
    for (const auto& rec : bench.eval.records()) {
        if (rec.label.is_unknown()) continue;
        ++known;
        if (argmax(rec.logits) == rec.label.index()) ++correct;
    }
    const double closed_acc = known ? static_cast<double>(correct) / static_cast<double>(known) : 0.0;

    const auto& c = args.config;
    nlohmann::ordered_json manifest;
    manifest["seed"] = g.seed;
    manifest["config"] = {{"n_known_classes", c.n_known_classes}, {"n_unknown_clusters", c.n_unknown_clusters},
                          {"dim", c.dim},
                          {"class_radius", c.class_radius},
                          {"unknown_radius", c.unknown_radius},
                          {"cluster_sigma", c.cluster_sigma},
                          {"per_class_train", c.per_class_train},
                          {"per_class_test", c.per_class_test},
                          {"per_unknown_test", c.per_unknown_test}};
    manifest["training"] = {{"learning_rate", args.hyper.learning_rate},
                            {"iterations", args.hyper.iterations},
                            {"l2", args.hyper.l2},
                            {"final_loss", bench.loss_trace.back()}};
    manifest["outputs"] = {{"calibration", "calibration.csv"}, {"eval", "eval.csv"}};
    manifest["counts"] = {{"calibration", bench.calibration.size()}, {"eval", bench.eval.size()},
                          {"eval_unknown", bench.eval.size() - known}};
    manifest["closed_set_accuracy"] = closed_acc;

    StagedFiles staged;
    staged.add(calibration_path, write_activation_table(bench.calibration));
    staged.add(eval_path, write_activation_table(bench.eval));
    staged.add(manifest_path, manifest.dump(2) + "\n");
    outcome.artifacts_written = staged.commit();
    if (!g.quiet) {
        out << "wrote " << bench.calibration.size() << " calibration and " << bench.eval.size()
            << " evaluation records to " << args.out_dir.string() << "\n"
            << "closed-set accuracy on held-out known classes: " << closed_acc << "\n";
    }
    return outcome;
}

// ---------------------------------------------------------------- fit

std::string weibull_table(const OpenMaxModel& model) {
    std::ostringstream t;
    t << "class,shape,scale,location,n_calibration,n_tail,tail_clamped\n";
    for (const auto& cal : model.calibrations()) {
        t << model.label_space().class_names()[cal.class_index] << ',' << fmt(cal.weibull.shape) << ','
          << fmt(cal.weibull.scale) << ',' << fmt(cal.weibull.location) << ',' << cal.n_calibration << ','
          << cal.n_tail << ',' << (cal.tail_clamped ? "true" : "false") << '\n';
    }
    return t.str();
}

std::string weibull_chart(const OpenMaxModel& model) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& cal : model.calibrations()) {
        lo = std::min(lo, cal.weibull.location);
        hi = std::max(hi, cal.weibull.location + 4.0 * cal.weibull.scale);
    }
    Chart chart{"Per-class Weibull density of distances to the MAV", "distance", "density", {}, false};
    for (const auto& cal : model.calibrations()) {
        Series s{model.label_space().class_names()[cal.class_index], {}};
        for (int i = 0; i <= 200; ++i) {
            const double a = lo + (hi - lo) * i / 200.0;
            // Shapes below 1 diverge at the location; start just past it.
            const double x = (a == cal.weibull.location && cal.weibull.shape < 1.0) ? std::nextafter(a, INFINITY) : a;
            s.points.emplace_back(a, weibull_pdf(cal.weibull, x));
        }
        chart.series.push_back(std::move(s));
    }
    return render_svg(chart);
}

CommandOutcome cmd_fit(const FitArgs& args, const Globals& g, std::ostream& out) {
    CommandOutcome outcome;
    StagedFiles staged;
    staged.add(args.model, "");
    if (!args.weibull_csv.empty()) staged.add(args.weibull_csv, "");
    if (!args.weibull_svg.empty()) staged.add(args.weibull_svg, "");
    staged.check_targets();

    std::optional<LabelSpace> space;
    if (!args.class_names.empty()) space = LabelSpace(split(args.class_names, ','), args.unknown_name);
    const ActivationSet table = read_table(args.calibration, space);

    OpenMaxConfig config;
    config.beta = args.beta;
    config.weight_mode = args.weight_mode == "classic" ? WeightMode::classic : WeightMode::paper_literal;
    config.mav_source = args.mav_source == "all" ? MavSource::all : MavSource::correct_only;
    config.tail = TailConfig{args.tail_size, args.min_samples};
    config.rejection_mode =
        args.rejection == "simple" ? RejectionMode::simple_recalibrated : RejectionMode::openmax_probability;

    std::optional<OpenMaxModel> model;
    try {
        model = fit_openmax(table, config);
    } catch (const FitError& e) {
        if (!e.class_index()) throw;
        const std::size_t c = *e.class_index();
        throw FitError(e.kind(), "class '" + table.label_space().class_names()[c] + "' (index " + std::to_string(c) +
                                     "): " + e.detail());
    }
    for (const auto& cal : model->calibrations()) {
        if (cal.tail_clamped) {
            outcome.diagnostics.push_back("warning: class '" + model->label_space().class_names()[cal.class_index] +
                                          "' has only " + std::to_string(cal.n_calibration) +
                                          " usable records; tail clamped from " + std::to_string(args.tail_size));
        }
    }

    const std::string table_text = weibull_table(*model);
    StagedFiles files;
    files.add(args.model, save_model(*model));
    if (!args.weibull_csv.empty()) files.add(args.weibull_csv, table_text);
    if (!args.weibull_svg.empty()) files.add(args.weibull_svg, weibull_chart(*model));
    outcome.artifacts_written = files.commit();
    if (!g.quiet) out << table_text;
    return outcome;
}

// ---------------------------------------------------------------- score

CommandOutcome cmd_score(const EvalArgs& args, const Globals&, std::ostream&) {
    CommandOutcome outcome;
    StagedFiles staged;
    staged.add(args.out, "");
    staged.check_targets();

    const OpenMaxModel model = read_model(args.model);
    const ActivationSet input = read_table(args.input, model.label_space(), ParseOptions{true});
    const auto outputs = score_set(model, input);

    std::ostringstream csv;
    csv << "id,predicted,max_probability,p_unknown";
    for (std::size_t c = 0; c < model.num_classes(); ++c) csv << ",r_" << c;
    csv << '\n';
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const auto& o = outputs[i];
        csv << input.records()[i].id << ',' << model.label_space().name_of(decide(model, o, args.epsilon)) << ','
            << fmt(o.max_probability) << ',' << fmt(o.probabilities[0]);
        for (double r : o.recalibrated) csv << ',' << fmt(r);
        csv << '\n';
    }
    StagedFiles files;
    files.add(args.out, csv.str());
    outcome.artifacts_written = files.commit();
    return outcome;
}

// ---------------------------------------------------------------- eval

std::string matrix_csv(const ConfusionMatrix& cm, bool normalized) {
    std::ostringstream csv;
    csv << "truth\\predicted";
    for (const auto& l : cm.labels) csv << ',' << l;
    csv << '\n';
    const auto rows = cm.row_normalized();
    for (std::size_t i = 0; i < cm.size(); ++i) {
        csv << cm.labels[i];
        for (std::size_t j = 0; j < cm.size(); ++j) {
            csv << ',';
            if (normalized) {
                csv << fmt(rows[i][j]);
            } else {
                csv << cm.counts[i][j];
            }
        }
        csv << '\n';
    }
    return csv.str();
}

std::string report_csv(const ClassificationReport& r) {
    std::ostringstream csv;
    csv << "label,precision,recall,f1,support\n";
    std::uint64_t total = 0;
    for (const auto& m : r.per_label) {
        csv << m.label << ',' << fmt(m.prf.precision) << ',' << fmt(m.prf.recall) << ',' << fmt(m.prf.f1) << ','
            << m.support << '\n';
        total += m.support;
    }
    csv << "macro_avg," << fmt(r.macro.precision) << ',' << fmt(r.macro.recall) << ',' << fmt(r.macro.f1) << ','
        << total << '\n';
    csv << "weighted_avg," << fmt(r.weighted.precision) << ',' << fmt(r.weighted.recall) << ','
        << fmt(r.weighted.f1) << ',' << total << '\n';
    csv << "accuracy,,," << fmt(r.accuracy) << ',' << total << '\n';
    return csv.str();
}

std::string roc_csv(const std::string& label, const RocCurve& curve) {
    std::ostringstream csv;
    csv << "label,threshold,fpr,tpr,auc\n";
    for (const auto& p : curve.points) {
        csv << label << ',' << fmt(p.threshold) << ',' << fmt(p.false_positive_rate) << ','
            << fmt(p.true_positive_rate) << ',' << fmt(curve.auc) << '\n';
    }
    return csv.str();
}

std::string two(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

CommandOutcome cmd_eval(const EvalArgs& args, const Globals& g, std::ostream& out) {
    CommandOutcome outcome;
    StagedFiles probe;
    probe.add(args.out / "summary.md", "");
    probe.check_targets();

    const OpenMaxModel model = read_model(args.model);
    const ActivationSet input = read_table(args.input, model.label_space());
    if (input.empty()) throw InvalidArgument("evaluation table has no records");
    const auto outputs = score_set(model, input);
    const std::size_t num_classes = model.num_classes();
    const auto& space = model.label_space();

    std::vector<Label> truths;
    std::vector<Label> predictions;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        truths.push_back(input.records()[i].label);
        predictions.push_back(decide(model, outputs[i], args.epsilon));
    }
    const ConfusionMatrix cm = confusion_matrix(truths, predictions, space);
    const ClassificationReport report = classification_report(cm);

    // Per-label scores in metric order: class k from channel k + 1, unknown from channel 0.
    std::vector<std::vector<double>> scores(num_classes + 1);
    std::ostringstream probs;
    probs << "id,truth," << space.unknown_name();
    for (const auto& n : space.class_names()) probs << ',' << n;
    probs << '\n';
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const auto& p = outputs[i].probabilities;
        for (std::size_t k = 0; k < num_classes; ++k) scores[k].push_back(p[k + 1]);
        scores[num_classes].push_back(p[0]);
        probs << input.records()[i].id << ',' << space.name_of(truths[i]);
        for (double v : p) probs << ',' << fmt(v);
        probs << '\n';
    }

    StagedFiles files;
    files.add(args.out / "confusion_matrix.csv", matrix_csv(cm, false));
    files.add(args.out / "confusion_matrix_normalized.csv", matrix_csv(cm, true));
    files.add(args.out / "classification_report.csv", report_csv(report));
    files.add(args.out / "probabilities.csv", probs.str());

    Chart roc_chart{"ROC curves (one-vs-rest, OpenMax probabilities)", "false positive rate", "true positive rate",
                    {}, true, 0.0, 1.0, 0.0, 1.0};
    std::vector<std::pair<std::string, double>> aucs;
    for (std::size_t l = 0; l <= num_classes; ++l) {
        const Label label = metric_label(l, num_classes);
        const std::string& name = space.name_of(label);
        auto positives = std::make_unique<bool[]>(truths.size());
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < truths.size(); ++i) {
            positives[i] = truths[i] == label;
            n_pos += positives[i] ? 1 : 0;
        }
        if (n_pos == 0 || n_pos == truths.size()) {
            outcome.diagnostics.push_back("warning: no ROC curve for '" + name + "' (needs positives and negatives)");
            continue;
        }
        const RocCurve curve = roc_curve(scores[l], std::span<const bool>(positives.get(), truths.size()));
        aucs.emplace_back(name, curve.auc);
        files.add(args.out / ("roc_" + sanitize(name) + ".csv"), roc_csv(name, curve));
        Series s{name + " (AUC " + two(curve.auc) + ")", {}};
        for (const auto& p : curve.points) s.points.emplace_back(p.false_positive_rate, p.true_positive_rate);
        roc_chart.series.push_back(std::move(s));
    }
    const RocCurve micro = micro_average_roc(scores, truths);
    aucs.emplace_back("micro-average", micro.auc);
    files.add(args.out / "roc_micro.csv", roc_csv("micro", micro));
    {
        Series s{"micro-average (AUC " + two(micro.auc) + ")", {}};
        for (const auto& p : micro.points) s.points.emplace_back(p.false_positive_rate, p.true_positive_rate);
        roc_chart.series.push_back(std::move(s));
    }
    if (args.charts) files.add(args.out / "roc.svg", render_svg(roc_chart));

    std::ostringstream md;
    md << "# Open-set evaluation\n\n";
    md << "- records: " << input.size() << " (" << cm.row_sums().back() << " labeled " << space.unknown_name()
       << ")\n";
    md << "- rejection mode: " << to_string(model.config().rejection_mode) << ", threshold " << fmt(args.epsilon)
       << "\n";
    md << "- accuracy: " << two(report.accuracy) << "\n\n";
    md << "## Classification report\n\n| label | precision | recall | f1 | support |\n|---|---|---|---|---|\n";
    for (const auto& m : report.per_label) {
        md << "| " << m.label << " | " << two(m.prf.precision) << " | " << two(m.prf.recall) << " | "
           << two(m.prf.f1) << " | " << m.support << " |\n";
    }
    md << "| macro avg | " << two(report.macro.precision) << " | " << two(report.macro.recall) << " | "
       << two(report.macro.f1) << " | |\n";
    md << "| weighted avg | " << two(report.weighted.precision) << " | " << two(report.weighted.recall) << " | "
       << two(report.weighted.f1) << " | |\n\n";
    md << "## ROC AUC\n\n| label | AUC |\n|---|---|\n";
    for (const auto& [name, auc] : aucs) md << "| " << name << " | " << two(auc) << " |\n";
    md << "\n## Normalized confusion matrix (rows = truth)\n\n| |";
    for (const auto& l : cm.labels) md << ' ' << l << " |";
    md << "\n|---|";
    for (std::size_t j = 0; j < cm.size(); ++j) md << "---|";
    md << '\n';
    const auto norm = cm.row_normalized();
    for (std::size_t i = 0; i < cm.size(); ++i) {
        md << "| " << cm.labels[i] << " |";
        for (double v : norm[i]) md << ' ' << two(v) << " |";
        md << '\n';
    }
    files.add(args.out / "summary.md", md.str());
    outcome.artifacts_written = files.commit();
    if (!g.quiet) out << "accuracy " << two(report.accuracy) << ", micro AUC " << two(micro.auc) << "\n";
    return outcome;
}

// ---------------------------------------------------------------- sweep

CommandOutcome cmd_sweep(const SweepArgs& args, const Globals& g, std::ostream& out) {
    CommandOutcome outcome;
    const auto thresholds = parse_thresholds(args.thresholds);
    StagedFiles probe;
    probe.add(args.out, "");
    if (!args.chart.empty()) probe.add(args.chart, "");
    probe.check_targets();

    const OpenMaxModel model = read_model(args.model);
    const ActivationSet input = read_table(args.input, model.label_space());
    const auto rows = threshold_sweep(model, input, thresholds);

    std::ostringstream csv;
    csv << "threshold,accuracy,f1,macro_p,macro_r,macro_f1,weighted_p,weighted_r,weighted_f1,reject_rate\n";
    for (const auto& r : rows) {
        csv << fmt(r.threshold) << ',' << fmt(r.accuracy) << ',' << fmt(r.f1) << ',' << fmt(r.macro.precision) << ','
            << fmt(r.macro.recall) << ',' << fmt(r.macro.f1) << ',' << fmt(r.weighted.precision) << ','
            << fmt(r.weighted.recall) << ',' << fmt(r.weighted.f1) << ',' << fmt(r.reject_rate) << '\n';
    }
    StagedFiles files;
    files.add(args.out, csv.str());
    if (!args.chart.empty()) {
        Series s{"accuracy", {}};
        for (const auto& r : rows) s.points.emplace_back(r.threshold, r.accuracy);
        std::sort(s.points.begin(), s.points.end());
        Chart chart{"Threshold vs. accuracy", "threshold", "accuracy", {std::move(s)}, false, 0.0, 0.0, 0.0, 1.0};
        double x_lo = chart.series[0].points.front().first;
        double x_hi = chart.series[0].points.back().first;
        if (x_lo == x_hi) {
            x_lo = 0.0;
            x_hi = 1.0;
        }
        chart.x_lo = x_lo;
        chart.x_hi = x_hi;
        files.add(args.chart, render_svg(chart));
    }
    outcome.artifacts_written = files.commit();
    if (!g.quiet) {
        for (const auto& r : rows) {
            out << "threshold " << two(r.threshold) << "  accuracy " << two(r.accuracy) << "  reject_rate "
                << two(r.reject_rate) << '\n';
        }
    }
    return outcome;
}

CommandOutcome failure(int code, const std::string& message) {
    CommandOutcome outcome;
    outcome.exit_code = code;
    outcome.diagnostics.push_back("error: " + message);
    return outcome;
}

}  // namespace

CommandOutcome run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Open-set calibration of classifier activations with per-class Weibull tail models", "openmax"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals globals;
    app.add_option("--seed", globals.seed, "Seed for synthetic data");
    app.add_flag("--quiet", globals.quiet, "Suppress informational output");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic open-set benchmark");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Existing output directory")->required();
    synth_cmd->add_option("--known-classes", synth.config.n_known_classes)->capture_default_str();
    synth_cmd->add_option("--unknown-clusters", synth.config.n_unknown_clusters)->capture_default_str();
    synth_cmd->add_option("--dim", synth.config.dim)->capture_default_str();
    synth_cmd->add_option("--class-radius", synth.config.class_radius)->capture_default_str();
    synth_cmd->add_option("--unknown-radius", synth.config.unknown_radius)->capture_default_str();
    synth_cmd->add_option("--sigma", synth.config.cluster_sigma)->capture_default_str();
    synth_cmd->add_option("--train-per-class", synth.config.per_class_train)->capture_default_str();
    synth_cmd->add_option("--test-per-class", synth.config.per_class_test)->capture_default_str();
    synth_cmd->add_option("--unknown-per-cluster", synth.config.per_unknown_test)->capture_default_str();
    synth_cmd->add_option("--learning-rate", synth.hyper.learning_rate)->capture_default_str();
    synth_cmd->add_option("--iterations", synth.hyper.iterations)->capture_default_str();
    synth_cmd->add_option("--l2", synth.hyper.l2)->capture_default_str();

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit per-class MAVs and Weibull tail models");
    fit_cmd->add_option("--calibration", fit.calibration, "Calibration activation table")
        ->required()
        ->check(CLI::ExistingFile);
    fit_cmd->add_option("--model", fit.model, "Output model file")->required();
    std::size_t beta = 0;
    auto* beta_opt = fit_cmd->add_option("--beta", beta, "Number of top-ranked classes to modify (default: all)");
    fit_cmd->add_option("--weight-mode", fit.weight_mode)
        ->check(CLI::IsMember({"paper", "classic"}))
        ->capture_default_str();
    fit_cmd->add_option("--mav-source", fit.mav_source)->check(CLI::IsMember({"correct", "all"}))->capture_default_str();
    fit_cmd->add_option("--tail-size", fit.tail_size)->check(CLI::PositiveNumber)->capture_default_str();
    fit_cmd->add_option("--min-samples", fit.min_samples)->check(CLI::Range(2, 1 << 30))->capture_default_str();
    fit_cmd->add_option("--rejection", fit.rejection)
        ->check(CLI::IsMember({"openmax", "simple"}))
        ->capture_default_str();
    fit_cmd->add_option("--class-names", fit.class_names, "Comma-separated class names for z0..z{C-1}");
    fit_cmd->add_option("--unknown-name", fit.unknown_name)->capture_default_str();
    fit_cmd->add_option("--weibull-csv", fit.weibull_csv, "Also write the parameter table here");
    fit_cmd->add_option("--weibull-svg", fit.weibull_svg, "Write per-class density chart");

    EvalArgs score;
    auto* score_cmd = app.add_subcommand("score", "Score records and emit per-record verdicts");
    score_cmd->add_option("--model", score.model)->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--input", score.input)->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--epsilon", score.epsilon)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    score_cmd->add_option("--out", score.out)->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a labeled table and write reports");
    eval_cmd->add_option("--model", eval.model)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--input", eval.input)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--epsilon", eval.epsilon)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    eval_cmd->add_option("--out-dir", eval.out, "Existing report directory")->required();
    eval_cmd->add_flag("--charts", eval.charts, "Also write roc.svg");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate across rejection thresholds");
    sweep_cmd->add_option("--model", sweep.model)->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--input", sweep.input)->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--thresholds", sweep.thresholds)->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out)->required();
    sweep_cmd->add_option("--chart", sweep.chart, "Write threshold-vs-accuracy SVG");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        CommandOutcome outcome;
        if (code != 0) {
            outcome.exit_code = 2;
            outcome.diagnostics.push_back(std::string("error: ") + e.what());
        }
        return outcome;
    }

    CommandOutcome outcome;
    try {
        if (*synth_cmd) outcome = cmd_synth(synth, globals, out);
        if (*fit_cmd) {
            if (beta_opt->count() > 0) fit.beta = beta;
            outcome = cmd_fit(fit, globals, out);
        }
        if (*score_cmd) outcome = cmd_score(score, globals, out);
        if (*eval_cmd) outcome = cmd_eval(eval, globals, out);
        if (*sweep_cmd) outcome = cmd_sweep(sweep, globals, out);
    } catch (const UsageError& e) {
        outcome = failure(2, e.what());
    } catch (const IoError& e) {
        outcome = failure(2, e.what());
    } catch (const ParseError& e) {
        outcome = failure(2, e.what());
    } catch (const Error& e) {
        outcome = failure(1, e.what());
    }
    for (const auto& d : outcome.diagnostics) {
        if (outcome.exit_code != 0 || !globals.quiet) err << d << '\n';
    }
    return outcome;
}

}  // namespace openmax::cli
