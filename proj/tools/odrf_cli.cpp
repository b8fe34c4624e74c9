// odrf: oblique decision trees and forests with an evaluation harness.
//
// Subcommands: fit | predict | benchmark | consistency

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "odrf/data.hpp"
#include "odrf/eval.hpp"
#include "odrf/forest.hpp"
#include "odrf/metrics.hpp"
#include "odrf/serialize.hpp"
#include "odrf/synthetic.hpp"
#include "odrf/tree.hpp"

namespace {

using namespace odrf;

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Task parse_task(const std::string &name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw Error(ErrorCode::BadSpec, "unknown task: " + name);
}

std::vector<int> parse_int_list(const std::string &csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

std::vector<std::string> parse_str_list(const std::string &csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Shared model/tuning flags.
struct FitFlags {
    std::string mode = "odrf";
    int t_n = 0;
    double alpha = -1.0;
    int trees = 100;
    std::string q_rule = "practical";
    int q = 2;
    int candidates = 10;
    std::uint64_t seed = 0;
    bool scale_all = false;
    bool bootstrap = false;
    int threads = default_threads();

    MethodConfig to_method() const {
        MethodConfig m;
        m.kind = method_kind_from_name(mode);
        m.B = trees;
        m.t_n = t_n;
        m.fixed_q = q;
        m.forest_q_rule = q_rule == "theory" ? QRule::Kind::theory
                                             : QRule::Kind::practical;
        m.alpha = alpha;
        m.n_candidates = candidates;
        m.n_threads = threads;
        m.bootstrap = bootstrap;
        return m;
    }
};

void add_fit_flags(CLI::App *cmd, FitFlags &f, bool with_mode = true) {
    if (with_mode)
        cmd->add_option("--mode", f.mode,
                        "model: odt|odt-pruned|cart|odrf|odrf-pruned|odrf-q")
            ->capture_default_str();
    cmd->add_option("--t-n", f.t_n, "leaf budget (0 = ceil(n^{4/5}))")
        ->capture_default_str();
    cmd->add_option("--alpha", f.alpha,
                    "pruning penalty (negative = n^{-1/2} scaled default)")
        ->capture_default_str();
    cmd->add_option("--trees", f.trees, "number of trees for forest modes")
        ->capture_default_str();
    cmd->add_option("--q-rule", f.q_rule,
                    "forest subset-size rule: practical|theory")
        ->capture_default_str();
    cmd->add_option("--q", f.q, "fixed subset size for odrf-q")
        ->capture_default_str();
    cmd->add_option("--candidates", f.candidates,
                    "oblique candidates per split")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
    cmd->add_flag("--scale-all", f.scale_all,
                  "fit the scaler on all rows instead of training rows only");
    cmd->add_flag("--bootstrap", f.bootstrap,
                  "bootstrap resample per tree (forest modes)");
    cmd->add_option("--threads", f.threads, "worker threads")
        ->capture_default_str();
}

json params_echo(const FitFlags &f, Task task) {
    return json{{"mode", f.mode},
                {"task", task_name(task)},
                {"t_n", f.t_n},
                {"alpha", f.alpha},
                {"trees", f.trees},
                {"q_rule", f.q_rule},
                {"q", f.q},
                {"candidates", f.candidates},
                {"seed", f.seed},
                {"scale_all", f.scale_all},
                {"bootstrap", f.bootstrap}};
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int run_fit(const std::string &data_path, const std::string &target,
            const std::string &task_name_s, const FitFlags &flags,
            const std::string &out_path) {
    const Task task = parse_task(task_name_s);
    RawDataset raw = load_csv(data_path, target, task);
    ScalingTransform scaler = fit_minmax(raw);
    Dataset d = apply_scaler(scaler, raw);
    std::vector<int> train(d.n);
    std::iota(train.begin(), train.end(), 0);

    MethodConfig m = flags.to_method();
    if (m.kind == MethodConfig::Kind::mean_baseline)
        throw Error(ErrorCode::BadSpec, "fit: mean-baseline has no model file");
    FittedModel model = fit_method(d, train, m, flags.seed);

    ModelDocument doc;
    doc.task = task;
    doc.scaler = scaler;
    doc.feature_names = raw.feature_names;
    doc.target_name = raw.target_name;
    doc.params = params_echo(flags, task);
    if (model.forest) {
        doc.kind = "forest";
        doc.trees = std::move(model.forest->trees);
    } else {
        doc.kind = "tree";
        doc.trees.push_back(std::move(*model.tree));
    }
    save_model(doc, out_path);

    double loss = 0.0;
    int leaf_sum = 0;
    for (const auto &t : doc.trees) leaf_sum += t.leaf_count();
    Forest scoref;
    scoref.task = task;
    scoref.p = d.p;
    scoref.trees = doc.trees; // copy for scoring
    for (int i = 0; i < d.n; ++i) {
        const double e = predict_forest(scoref, d.row(i), d.p) - d.targets[i];
        loss += e * e;
    }
    loss /= d.n;
    std::cout << "trained " << doc.kind << " with " << doc.trees.size()
              << " tree(s), total leaves " << leaf_sum << "\n"
              << "training mse " << fmt_double(loss) << "\n"
              << "model written to " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

int run_predict(const std::string &model_path, const std::string &data_path,
                const std::string &out_path) {
    ModelDocument doc = load_model(model_path);

    std::ifstream in(data_path);
    if (!in) throw Error(ErrorCode::EmptyDataset, "cannot open file: " + data_path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::EmptyDataset, "empty file: " + data_path);
    auto header = detail::split_csv_line(line);
    std::vector<int> col_of;
    for (const auto &name : doc.feature_names) {
        int col = -1;
        for (size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) col = static_cast<int>(j);
        if (col < 0)
            throw Error(ErrorCode::SchemaMismatch,
                        "missing feature column: " + name);
        col_of.push_back(col);
    }

    Forest forest;
    forest.task = doc.task;
    forest.p = static_cast<int>(doc.feature_names.size());
    forest.trees = std::move(doc.trees);

    std::ofstream out(out_path);
    if (!out)
        throw Error(ErrorCode::SchemaMismatch, "cannot write: " + out_path);
    if (doc.task == Task::classification)
        out << "class,vote_fraction\n";
    else
        out << "prediction\n";

    const int p = forest.p;
    std::vector<double> x(p);
    int n_rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        bool ok = cells.size() >= header.size();
        for (int j = 0; ok && j < p; ++j) {
            double v;
            if (!detail::parse_cell(cells[col_of[j]], v)) ok = false;
            else {
                const double range = doc.scaler.ranges[j];
                x[j] = range > 0.0
                           ? std::clamp((v - doc.scaler.mins[j]) / range, 0.0, 1.0)
                           : 0.0;
            }
        }
        if (!ok) continue; // rows with missing cells are dropped
        if (doc.task == Task::classification) {
            out << classify_forest(forest, x.data(), p) << ","
                << fmt_double(vote_fraction(forest, x.data(), p)) << "\n";
        } else {
            out << fmt_double(predict_forest(forest, x.data(), p)) << "\n";
        }
        ++n_rows;
    }
    std::cout << "wrote " << n_rows << " predictions to " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

int run_benchmark(const std::string &data_path, const std::string &target,
                  const std::string &task_name_s, const std::string &methods_csv,
                  int repetitions, const FitFlags &flags,
                  const std::string &out_path) {
    const Task task = parse_task(task_name_s);
    RawDataset raw = load_csv(data_path, target, task);

    std::vector<MethodConfig> methods;
    for (const auto &name : parse_str_list(methods_csv)) {
        MethodConfig m = flags.to_method();
        m.kind = method_kind_from_name(name);
        methods.push_back(m);
    }
    if (methods.empty())
        throw Error(ErrorCode::BadSpec, "benchmark: no methods given");

    BenchmarkResult result =
        benchmark(raw, methods, repetitions, flags.seed, flags.scale_all);

    std::ofstream out(out_path);
    if (!out)
        throw Error(ErrorCode::SchemaMismatch, "cannot write: " + out_path);
    out << "method,partition,metric,value\n";
    for (size_t mi = 0; mi < result.methods.size(); ++mi)
        for (size_t r = 0; r < result.values[mi].size(); ++r)
            out << result.methods[mi] << "," << r << "," << result.metric << ","
                << fmt_double(result.values[mi][r]) << "\n";
    for (size_t mi = 0; mi < result.methods.size(); ++mi) {
        out << result.methods[mi] << ",mean," << result.metric << ","
            << fmt_double(result.means[mi]) << "\n";
        std::cout << result.methods[mi] << " mean " << result.metric << " "
                  << fmt_double(result.means[mi]) << "\n";
    }
    std::cout << "results written to " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// consistency
// ---------------------------------------------------------------------------

int run_consistency(const std::string &target_kind, int p, double freq, int q,
                    int V, double noise, const std::string &n_csv,
                    const std::string &method_name_s, int reps, int n_mc,
                    const FitFlags &flags, const std::string &out_path) {
    SyntheticTarget target =
        target_kind == "extended-additive"
            ? make_extended_additive(p, q, V, noise, flags.seed)
            : make_ridge_sine(p, freq, noise);

    MethodConfig m = flags.to_method();
    m.kind = method_kind_from_name(method_name_s);

    const std::vector<int> n_values = parse_int_list(n_csv);
    if (n_values.empty())
        throw Error(ErrorCode::BadSpec, "consistency: empty n list");
    RiskReport report =
        consistency_curve(target, n_values, m, reps, n_mc, flags.seed);

    std::ofstream out(out_path);
    if (!out)
        throw Error(ErrorCode::SchemaMismatch, "cannot write: " + out_path);
    out << "method,n,metric,value\n";
    for (size_t ni = 0; ni < report.n_values.size(); ++ni) {
        for (size_t r = 0; r < report.risks[ni].size(); ++r)
            out << method_name_s << "," << report.n_values[ni] << ",l2_risk_rep"
                << r << "," << fmt_double(report.risks[ni][r]) << "\n";
        out << method_name_s << "," << report.n_values[ni]
            << ",median_l2_risk," << fmt_double(report.medians[ni]) << "\n";
        std::cout << "n=" << report.n_values[ni] << " median l2 risk "
                  << fmt_double(report.medians[ni]) << "\n";
    }
    std::cout << "results written to " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"oblique decision trees and forests"};
    app.require_subcommand(1);

    // fit
    auto *fit = app.add_subcommand("fit", "fit a model and write a model file");
    std::string fit_data, fit_target, fit_task = "regression",
                fit_out = "model.json";
    FitFlags fit_flags;
    fit->add_option("--data", fit_data, "training CSV")->required();
    fit->add_option("--target", fit_target, "target column name")->required();
    fit->add_option("--task", fit_task, "regression|classification")
        ->capture_default_str();
    fit->add_option("--out", fit_out, "output model file")->capture_default_str();
    add_fit_flags(fit, fit_flags);

    // predict
    auto *predict = app.add_subcommand("predict", "predict with a model file");
    std::string pred_model, pred_data, pred_out = "predictions.csv";
    predict->add_option("--model", pred_model, "model file")->required();
    predict->add_option("--data", pred_data, "input CSV")->required();
    predict->add_option("--out", pred_out, "output CSV")->capture_default_str();

    // benchmark
    auto *bench = app.add_subcommand(
        "benchmark", "repeated random-partition evaluation on a CSV");
    std::string bench_data, bench_target, bench_task = "regression",
                bench_methods = "odrf,cart", bench_out = "benchmark.csv";
    int bench_reps = 100;
    FitFlags bench_flags;
    bench->add_option("--data", bench_data, "input CSV")->required();
    bench->add_option("--target", bench_target, "target column name")->required();
    bench->add_option("--task", bench_task, "regression|classification")
        ->capture_default_str();
    bench->add_option("--methods", bench_methods, "comma-separated method list")
        ->capture_default_str();
    bench->add_option("--repetitions", bench_reps, "number of random partitions")
        ->capture_default_str();
    bench->add_option("--out", bench_out, "output CSV")->capture_default_str();
    add_fit_flags(bench, bench_flags, /*with_mode=*/false);

    // consistency
    auto *cons = app.add_subcommand(
        "consistency", "L2-risk curve on a synthetic target");
    std::string cons_kind = "ridge-sine", cons_n = "250,500,1000",
                cons_method = "odt", cons_out = "consistency.csv";
    int cons_p = 5, cons_q = 2, cons_v = 3, cons_reps = 5, cons_nmc = 20000;
    double cons_freq = 4.0, cons_noise = 0.1;
    FitFlags cons_flags;
    cons->add_option("--target-kind", cons_kind,
                     "ridge-sine|extended-additive")
        ->capture_default_str();
    cons->add_option("--p", cons_p, "dimension")->capture_default_str();
    cons->add_option("--freq", cons_freq, "ridge-sine frequency")
        ->capture_default_str();
    cons->add_option("--target-q", cons_q, "coordinates per additive component")
        ->capture_default_str();
    cons->add_option("--v", cons_v, "number of additive components")
        ->capture_default_str();
    cons->add_option("--noise", cons_noise, "noise sigma")->capture_default_str();
    cons->add_option("--n", cons_n, "comma-separated training sizes")
        ->capture_default_str();
    cons->add_option("--method", cons_method, "method to evaluate")
        ->capture_default_str();
    cons->add_option("--reps", cons_reps, "repetitions per n")
        ->capture_default_str();
    cons->add_option("--n-mc", cons_nmc, "Monte-Carlo points for the risk")
        ->capture_default_str();
    cons->add_option("--out", cons_out, "output CSV")->capture_default_str();
    add_fit_flags(cons, cons_flags);

    try {
        app.parse(argc, argv);
        if (*fit)
            return run_fit(fit_data, fit_target, fit_task, fit_flags, fit_out);
        if (*predict) return run_predict(pred_model, pred_data, pred_out);
        if (*bench)
            return run_benchmark(bench_data, bench_target, bench_task,
                                 bench_methods, bench_reps, bench_flags,
                                 bench_out);
        if (*cons)
            return run_consistency(cons_kind, cons_p, cons_freq, cons_q, cons_v,
                                   cons_noise, cons_n, cons_method, cons_reps,
                                   cons_nmc, cons_flags, cons_out);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const odrf::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_data_error() ? 2 : 3;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
