// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/commands.hpp"
#include "oracles.hpp"
#include "openmax/metrics.hpp"
#include "openmax/openmax.hpp"
#include "openmax/synth.hpp"
#include "openmax/weibull.hpp"

using namespace openmax;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kAnalyticTol = 1e-12;
constexpr double kQuadratureTol = 1e-6;
constexpr double kShapeRelTol = 0.10;
constexpr double kScaleRelTol = 0.05;
constexpr double kResidualTol = 1e-9;
constexpr double kIdentityTol = 1e-12;
constexpr double kAucTol = 1e-12;
constexpr double kMetricTol = 1e-12;
constexpr double kGradientRelTol = 1e-5;
constexpr double kWeibullBudgetSeconds = 1.0;
constexpr double kEndToEndBudgetSeconds = 10.0;

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e).exit_code;
    if (out) *out = o.str();
    return code;
}

std::span<const bool> as_span(const std::vector<bool>& v, std::unique_ptr<bool[]>& buf) {
    buf = std::make_unique<bool[]>(v.size());
    std::copy(v.begin(), v.end(), buf.get());
    return {buf.get(), v.size()};
}

const OpenSetBenchmark& benchmark() {
    static const OpenSetBenchmark b = make_openset_benchmark(SynthConfig{}, 7);
    return b;
}

const OpenMaxModel& model() {
    static const OpenMaxModel m = fit_openmax(benchmark().calibration, {});
    return m;
}

Check weibull_analytic() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const double at_scale = weibull_cdf({2.0, 3.0, 1.0}, 4.0);
    c.require(std::abs(at_scale - (1.0 - std::exp(-1.0))) < kAnalyticTol, "cdf(mu + gamma) = " + num(at_scale));
    const WeibullParams expo{1.0, 2.5, 0.75};
    for (double t : {0.5, 1.0, 2.0}) {
        const double f = weibull_cdf(expo, expo.location + expo.scale * t);
        c.require(std::abs(f - (1.0 - std::exp(-t))) < kAnalyticTol, "shape-1 reduction at t = " + num(t));
    }
    const WeibullParams p{2.0, 3.0, 1.0};
    const double mass = oracle::simpson([&](double a) { return weibull_pdf(p, a); }, p.location,
                                        p.location + 20 * p.scale, 20000);
    c.require(std::abs(mass - 1.0) < kQuadratureTol, "pdf mass " + num(mass));
    const double elapsed = seconds_since(t0);
    c.require(elapsed < kWeibullBudgetSeconds, "runtime " + num(elapsed) + " s");
    if (c.ok) c.detail = "mass " + num(mass) + ", " + num(elapsed) + " s";
    return c;
}

Check weibull_mle() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto xs = sample_weibull({2.0, 3.0, 0.0}, 2000, 2024);
    const TailFit fit = fit_weibull_tail(xs, TailConfig{2000, 3});
    std::vector<double> shifted;
    for (double x : xs) shifted.push_back(x - fit.params.location);
    const double g = shape_equation_residual(fit.params.shape, shifted);
    const double elapsed = seconds_since(t0);
    c.require(std::abs(fit.params.shape - 2.0) <= kShapeRelTol * 2.0, "shape " + num(fit.params.shape));
    c.require(std::abs(fit.params.scale - 3.0) <= kScaleRelTol * 3.0, "scale " + num(fit.params.scale));
    c.require(std::abs(g) < kResidualTol, "residual " + num(g));
    c.require(elapsed < kWeibullBudgetSeconds, "runtime " + num(elapsed) + " s");
    if (c.ok) {
        c.detail = "shape " + num(fit.params.shape) + ", scale " + num(fit.params.scale) + ", |g| " + num(std::abs(g));
    }
    return c;
}

Check reduction_identity() {
    Check c;
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        Vector a(8);
        for (auto& x : a) x = u(gen);
        long double denom = 1.0L;
        for (double x : a) denom += std::exp(static_cast<long double>(x));
        Vector cdf(8);
        for (auto& x : cdf) x = (u(gen) + 6.0) / 12.0;
        const Vector zero(8, 0.0);
        for (const auto& act : {openmax_activations(a, cdf, 0, WeightMode::paper_literal),
                                openmax_activations(a, zero, 8, WeightMode::classic)}) {
            const Vector p = stable_softmax(act);
            for (std::size_t k = 0; k < 8; ++k) {
                const double want = static_cast<double>(std::exp(static_cast<long double>(a[k])) / denom);
                worst = std::max(worst, std::abs(p[k + 1] - want));
            }
        }
    }
    c.require(worst < kIdentityTol, "max deviation " + num(worst));
    if (c.ok) c.detail = "max deviation " + num(worst);
    return c;
}

Check hand_oracle() {
    Check c;
    const Vector a = openmax_activations(Vector{2, 1}, Vector{0.5, 0.25}, 2, WeightMode::classic);
    c.require(a == Vector{1.125, 1.0, 0.875},
              "activations " + num(a[0]) + ", " + num(a[1]) + ", " + num(a[2]));
    if (c.ok) c.detail = "activations (1.125, 1, 0.875)";
    return c;
}

Check monotone_rejection() {
    Check c;
    const auto& recs = benchmark().eval.records();
    const std::size_t n = std::min<std::size_t>(1000, recs.size());
    const std::vector<double> eps{0.1, 0.2, 0.3, 0.4, 0.5};
    std::size_t violations = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto out = openmax_probabilities(model(), recs[i].logits);
        bool before = false;
        for (double e : eps) {
            const bool rejected = openmax_decision(out, e).is_unknown();
            if (before && !rejected) ++violations;
            before = rejected;
        }
    }
    c.require(n == 1000, "only " + std::to_string(n) + " records");
    c.require(violations == 0, std::to_string(violations) + " subset violations");
    const auto rows = threshold_sweep(model(), benchmark().eval, eps);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        c.require(rows[i].reject_rate >= rows[i - 1].reject_rate, "sweep reject_rate decreases");
    }
    if (c.ok) c.detail = "0 violations on 1000 records; reject_rate " + num(rows.front().reject_rate) + " .. " +
                         num(rows.back().reject_rate);
    return c;
}

Check auc_oracle() {
    Check c;
    std::mt19937_64 gen(202);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 20 + 9 * static_cast<std::size_t>(t);
        const int levels = t % 2 ? 5 : 1000;
        std::uniform_int_distribution<int> level(0, levels - 1);
        std::vector<double> scores;
        std::vector<bool> pos;
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(level(gen) / static_cast<double>(levels));
            pos.push_back(i % 3 == 0 || gen() % 4 == 0);
        }
        pos[1] = false;
        std::unique_ptr<bool[]> buf;
        const double got = roc_curve(scores, as_span(pos, buf)).auc;
        worst = std::max(worst, std::abs(got - oracle::pairwise_auc(scores, pos)));
    }
    c.require(worst < kAucTol, "max deviation " + num(worst));
    std::unique_ptr<bool[]> buf;
    const std::vector<bool> perfect{true, true, false, false};
    const double auc = mann_whitney_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, as_span(perfect, buf));
    c.require(auc == 1.0, "perfect separation gives " + num(auc));
    if (c.ok) c.detail = "max deviation " + num(worst) + " over 20 instances; perfect AUC 1";
    return c;
}

Check metric_identities() {
    Check c;
    std::mt19937_64 gen(303);
    std::uniform_int_distribution<int> lab(-1, 4);
    auto to_label = [](int x) { return x < 0 ? Label::unknown() : Label::known(static_cast<std::size_t>(x)); };
    std::vector<int> ti, pi;
    std::vector<Label> t, p;
    for (int i = 0; i < 1000; ++i) {
        const int a = lab(gen), b = gen() % 3 ? a : lab(gen);
        ti.push_back(a < 0 ? 5 : a);
        pi.push_back(b < 0 ? 5 : b);
        t.push_back(to_label(a));
        p.push_back(to_label(b));
    }
    const auto cm = confusion_matrix(t, p, LabelSpace::with_default_names(5));
    std::vector<std::uint64_t> th(6), ph(6);
    for (int x : ti) ++th[x];
    for (int x : pi) ++ph[x];
    c.require(cm.row_sums() == th, "row sums differ from truth histogram");
    c.require(cm.column_sums() == ph, "column sums differ from prediction histogram");
    const auto r = classification_report(cm);
    double sp = 0, sr = 0, sf = 0, n = 0;
    for (const auto& m : r.per_label) {
        sp += m.support * m.prf.precision;
        sr += m.support * m.prf.recall;
        sf += m.support * m.prf.f1;
        n += m.support;
    }
    c.require(std::abs(r.weighted.precision - sp / n) < kMetricTol, "weighted precision");
    c.require(std::abs(r.weighted.recall - sr / n) < kMetricTol, "weighted recall");
    c.require(std::abs(r.weighted.f1 - sf / n) < kMetricTol, "weighted f1");

    auto L = [&](std::initializer_list<int> xs) {
        std::vector<Label> out;
        for (int x : xs) out.push_back(to_label(x));
        return out;
    };
    const auto hand = classification_report(confusion_matrix(L({0, 0, 1, 1}), L({0, 1, 1, 1}),
                                                             LabelSpace::with_default_names(2)));
    c.require(std::abs(hand.per_label[0].prf.f1 - 2.0 / 3.0) < kMetricTol, "class0 F1 " + num(hand.per_label[0].prf.f1));
    c.require(std::abs(hand.per_label[1].prf.f1 - 0.8) < kMetricTol, "class1 F1 " + num(hand.per_label[1].prf.f1));
    c.require(hand.accuracy == 0.75, "accuracy " + num(hand.accuracy));
    if (c.ok) c.detail = "marginals exact; 4-sample report F1 2/3, 0.8, accuracy 0.75";
    return c;
}

Check end_to_end() {
    Check c;
    const auto manifest = nlohmann::json::parse(slurp(fs::path(OPENMAX_FIXTURE_DIR) / "benchmark_manifest.json"));
    const auto& mc = manifest.at("config");
    SynthConfig config;
    config.n_known_classes = mc.at("n_known_classes");
    config.n_unknown_clusters = mc.at("n_unknown_clusters");
    config.dim = mc.at("dim");
    config.class_radius = mc.at("class_radius");
    config.unknown_radius = mc.at("unknown_radius");
    config.cluster_sigma = mc.at("cluster_sigma");
    config.per_class_train = mc.at("per_class_train");
    config.per_class_test = mc.at("per_class_test");
    config.per_unknown_test = mc.at("per_unknown_test");
    const double epsilon = manifest.at("epsilon");
    const auto& th = manifest.at("thresholds");

    const auto t0 = std::chrono::steady_clock::now();
    const auto bench = make_openset_benchmark(config, manifest.at("seed").get<std::uint64_t>());
    const auto m = fit_openmax(bench.calibration, {});
    std::size_t known = 0, closed_hits = 0, open_hits = 0, unknown = 0, rejected = 0;
    for (const auto& r : bench.eval.records()) {
        const Label decision = predict(m, r.logits, epsilon);
        if (r.label.is_unknown()) {
            ++unknown;
            rejected += decision.is_unknown();
        } else {
            ++known;
            closed_hits += argmax(r.logits) == r.label.index();
            open_hits += decision == r.label;
        }
    }
    const double elapsed = seconds_since(t0);
    const double closed = static_cast<double>(closed_hits) / known;
    const double recall = static_cast<double>(rejected) / unknown;
    const double known_acc = static_cast<double>(open_hits) / known;
    c.require(closed >= th.at("closed_set_accuracy").get<double>(), "closed-set accuracy " + num(closed));
    c.require(recall >= th.at("unknown_recall").get<double>(), "unknown recall " + num(recall));
    c.require(known_acc >= th.at("known_accuracy").get<double>(), "known accuracy " + num(known_acc));
    c.require(elapsed < kEndToEndBudgetSeconds, "runtime " + num(elapsed) + " s");
    if (c.ok) {
        c.detail = "closed-set " + num(closed) + ", unknown recall " + num(recall) + ", known accuracy " +
                   num(known_acc) + ", " + num(elapsed) + " s";
    }
    return c;
}

Check gradient_check() {
    Check c;
    std::mt19937_64 gen(404);
    std::normal_distribution<double> nd(0, 1);
    std::vector<Vector> xs(15, Vector(4));
    std::vector<std::size_t> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (auto& v : xs[i]) v = nd(gen);
        ys.push_back(i % 3);
    }
    auto clf = LinearClassifier::zeros(3, 4);
    for (auto& w : clf.weights) w = 0.5 * nd(gen);
    for (auto& b : clf.bias) b = 0.5 * nd(gen);
    const double l2 = 1e-3;
    const Gradient g = cross_entropy_gradient(clf, xs, ys, l2);
    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        const double fd = oracle::central_difference(
            [&](double v) {
                param = v;
                return cross_entropy_loss(clf, xs, ys, l2);
            },
            saved, 1e-5);
        param = saved;
        worst = std::max(worst, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8));
    };
    for (std::size_t i = 0; i < clf.weights.size(); ++i) probe(clf.weights[i], g.weights[i]);
    for (std::size_t i = 0; i < clf.bias.size(); ++i) probe(clf.bias[i], g.bias[i]);
    c.require(worst < kGradientRelTol, "max relative error " + num(worst));
    if (c.ok) c.detail = "max relative error " + num(worst);
    return c;
}

Check persistence() {
    Check c;
    const std::string saved = save_model(model());
    const OpenMaxModel loaded = load_model(saved);
    c.require(save_model(loaded) == saved, "save-load-save text differs");
    std::mt19937_64 gen(505);
    const auto& recs = benchmark().eval.records();
    std::normal_distribution<double> jitter(0, 1);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        Vector z = recs[i % recs.size()].logits;
        for (auto& v : z) v += jitter(gen);
        if (openmax_probabilities(loaded, z).probabilities != openmax_probabilities(model(), z).probabilities) {
            ++mismatches;
        }
    }
    c.require(mismatches == 0, std::to_string(mismatches) + " of 1000 outputs differ");
    if (c.ok) c.detail = "1000 outputs bitwise equal; canonical text stable";
    return c;
}

struct Workspace {
    fs::path dir;
    std::string fit_stdout;
    bool ok = false;
};

Workspace pipeline(const std::string& name, bool reports) {
    Workspace w;
    w.dir = fs::temp_directory_path() / ("openmax_acceptance_" + name);
    fs::remove_all(w.dir);
    fs::create_directories(w.dir);
    const std::string d = w.dir.string();
    w.ok = cli({"synth", "--out-dir", d}) == 0 &&
           cli({"fit", "--calibration", d + "/calibration.csv", "--model", d + "/model.json"}, &w.fit_stdout) == 0 &&
           cli({"sweep", "--model", d + "/model.json", "--input", d + "/eval.csv", "--out", d + "/sweep.csv",
                "--chart", d + "/sweep.svg"}) == 0;
    if (reports) {
        fs::create_directories(w.dir / "reports");
        w.ok = w.ok && cli({"eval", "--model", d + "/model.json", "--input", d + "/eval.csv", "--out-dir",
                            d + "/reports", "--charts"}) == 0;
    }
    return w;
}

Check cli_determinism() {
    Check c;
    const Workspace a = pipeline("run_a", false), b = pipeline("run_b", false);
    c.require(a.ok && b.ok, "pipeline command failed");
    for (const char* f : {"calibration.csv", "eval.csv", "manifest.json", "model.json", "sweep.csv", "sweep.svg"}) {
        c.require(fs::exists(a.dir / f) && slurp(a.dir / f) == slurp(b.dir / f), std::string(f) + " differs");
    }
    if (c.ok) c.detail = "6 artifacts byte-identical across two runs";
    return c;
}

Check report_surfaces() {
    Check c;
    const Workspace w = pipeline("surfaces", true);
    c.require(w.ok, "pipeline command failed");
    const auto sweep = lines(slurp(w.dir / "sweep.csv"));
    c.require(sweep.size() == 6, "sweep has " + std::to_string(sweep.size()) + " lines");
    c.require(!sweep.empty() &&
                  sweep[0] == "threshold,accuracy,f1,macro_p,macro_r,macro_f1,weighted_p,weighted_r,weighted_f1,reject_rate",
              "sweep header");
    const std::vector<std::string> order{"0.5", "0.4", "0.3", "0.2", "0.1"};
    for (std::size_t i = 0; i < order.size() && i + 1 < sweep.size(); ++i) {
        c.require(sweep[i + 1].rfind(order[i] + ",", 0) == 0, "sweep row order");
    }
    const auto weibull = lines(w.fit_stdout);
    c.require(weibull.size() == 11 && weibull[0] == "class,shape,scale,location,n_calibration,n_tail,tail_clamped",
              "weibull parameter table");
    const fs::path rep = w.dir / "reports";
    for (const char* f : {"confusion_matrix.csv", "confusion_matrix_normalized.csv", "classification_report.csv",
                          "roc_micro.csv", "roc_unknown.csv", "summary.md", "roc.svg"}) {
        c.require(fs::exists(rep / f), std::string(f) + " missing");
    }
    for (int k = 0; k < 10; ++k) {
        c.require(fs::exists(rep / ("roc_cls" + std::to_string(k) + ".csv")), "per-class ROC missing");
    }
    const auto roc = lines(slurp(rep / "roc_micro.csv"));
    c.require(!roc.empty() && roc[0] == "label,threshold,fpr,tpr,auc", "ROC header");
    c.require(roc.size() > 2 && roc.back().find(",1,1,") != std::string::npos, "ROC ends at (1, 1)");
    c.require(slurp(w.dir / "sweep.svg").rfind("<svg", 0) == 0, "threshold chart");
    if (c.ok) c.detail = "sweep table, Weibull table, ROC point sets and charts present";
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"report-surfaces", report_surfaces},
        {"weibull-analytic", weibull_analytic},
        {"weibull-mle-recovery", weibull_mle},
        {"openmax-reduction-identity", reduction_identity},
        {"openmax-hand-oracle", hand_oracle},
        {"monotone-rejection", monotone_rejection},
        {"auc-oracle", auc_oracle},
        {"metric-identities", metric_identities},
        {"end-to-end-open-set", end_to_end},
        {"gradient-check", gradient_check},
        {"persistence", persistence},
        {"cli-determinism", cli_determinism},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Check result;
        try {
            result = run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        failures += !result.ok;
        std::cout << (result.ok ? "PASS " : "FAIL ") << name << ": " << result.detail << '\n';
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
