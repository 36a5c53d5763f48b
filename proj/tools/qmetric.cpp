// qmetric: ensembles of pure states, exact and estimated distances between
// them, SWAP-test sampling, and sample-complexity sweeps. All commands are
// seeded and echo their resolved configuration; rerunning a command with the
// same configuration reproduces its outputs byte for byte.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmetric/complexity/complexity.hpp"
#include "qmetric/io/io.hpp"
#include "qmetric/metrics/metrics.hpp"
#include "qmetric/parallel.hpp"
#include "qmetric/quantum/moment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qmetric;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEstimator = 2;
constexpr int kExitCap = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QMETRIC_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

std::vector<double> parse_weights(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string tok =
            csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                         : comma - start);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// --- gen ---------------------------------------------------------------------

struct GenOptions {
    std::string type;
    int n = 10;
    int d = 2;
    double s = 0.08;
    double theta = 0.0;
    std::string weights;
    std::string table;
    std::uint64_t seed = 0;
    std::string out = "ensemble.json";
    std::string out2;
};

json gen_config_json(const GenOptions& o) {
    json cfg;
    cfg["command"] = "gen";
    cfg["type"] = o.type;
    cfg["n"] = o.n;
    cfg["d"] = o.d;
    cfg["s"] = o.s;
    cfg["theta"] = o.theta;
    cfg["weights"] = o.weights;
    cfg["table"] = o.table;
    cfg["seed"] = o.seed;
    cfg["out"] = o.out;
    cfg["out2"] = o.out2;
    return cfg;
}

int run_gen(const GenOptions& o) {
    Rng rng(o.seed);
    json summary;
    summary["config"] = gen_config_json(o);

    if (o.type == "fidelity-table") {
        if (o.table.empty() || o.out2.empty())
            throw CLI::ValidationError("gen fidelity-table needs --table and --out2");
        const FidelityTable t = io::read_table_csv(o.table);
        const auto [rows, cols] = from_fidelity_table(t);
        io::write_ensemble(o.out, rows);
        io::write_ensemble(o.out2, cols);
        summary["n"] = rows.size();
        summary["d"] = rows.dim();
        summary["kind"] = rows.kind();
        std::cout << summary.dump(2) << "\n";
        return kExitOk;
    }

    std::optional<Ensemble> e;
    if (o.type == "cluster") e = cluster_ensemble(o.n, o.s, rng);
    else if (o.type == "circular") e = circular_ensemble(o.n, rng);
    else if (o.type == "hardpair") e = hard_pair(o.n, o.theta);
    else if (o.type == "haar") e = haar_ensemble(o.n, o.d, rng);
    else if (o.type == "basis") e = basis_ensemble(parse_weights(o.weights), o.d);
    else throw CLI::ValidationError("unknown generator: " + o.type);

    io::write_ensemble(o.out, *e);
    summary["n"] = e->size();
    summary["d"] = e->dim();
    summary["kind"] = e->kind();
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

// --- dist --------------------------------------------------------------------

struct DistOptions {
    std::string e1, e2;
    std::string metric = "mmd-1";
    bool cross_check = false;
    std::string out_plan;  // wasserstein only: sparse (i,j,mass) triples
    std::uint64_t seed = 0;  // unused, echoed for uniformity
};

int run_dist(const DistOptions& o) {
    const Ensemble e1 = io::read_ensemble(o.e1);
    const Ensemble e2 = io::read_ensemble(o.e2);
    const auto metric = MetricId::parse(o.metric);
    if (!metric) throw CLI::ValidationError("unknown metric: " + o.metric);

    json out;
    json cfg;
    cfg["command"] = "dist";
    cfg["e1"] = o.e1;
    cfg["e2"] = o.e2;
    cfg["metric"] = o.metric;
    cfg["cross_check"] = o.cross_check;
    cfg["out_plan"] = o.out_plan;
    cfg["seed"] = o.seed;
    out["config"] = cfg;

    DistanceReport report;
    if (metric->family == MetricId::Family::wasserstein) {
        const OtSolution sol = wasserstein_solution(e1, e2);
        if (!o.out_plan.empty()) io::write_plan_csv(o.out_plan, sol.coupling);
        report.raw = sol.coupling.objective;
        report.value = std::max(report.raw, 0.0);
        report.metric_id = "wasserstein";
        report.route = "transport";
    } else {
        report = mmd_k_pairwise(e1, e2, metric->k);
        if (o.cross_check) {
            const DistanceReport moment = mmd_k_moment(e1, e2, metric->k);
            out["cross_check"] = json::parse(io::distance_report_to_json(moment));
            out["route_discrepancy"] = std::abs(report.raw - moment.raw);
        }
    }
    out["report"] = json::parse(io::distance_report_to_json(report));
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// --- estimate ------------------------------------------------------------------

struct EstimateOptions {
    std::string e1, e2;
    std::string metric = "mmd-1";
    std::string estimator = "ustat";  // ustat | labelfree | nonuniform | classical
    std::int64_t m = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    double noise_eps_ball = -1.0;
    std::string out_batch = "batch.csv";
    std::string out_plan;
    std::string replay;
};

json estimate_config_json(const EstimateOptions& o) {
    json cfg;
    cfg["command"] = "estimate";
    cfg["e1"] = o.e1;
    cfg["e2"] = o.e2;
    cfg["metric"] = o.metric;
    cfg["estimator"] = o.estimator;
    cfg["m"] = o.m;
    cfg["seed"] = o.seed;
    cfg["workers"] = o.workers;
    cfg["noise_eps_ball"] = o.noise_eps_ball;
    cfg["out_batch"] = o.out_batch;
    cfg["out_plan"] = o.out_plan;
    cfg["replay"] = o.replay;
    return cfg;
}

int run_estimate(const EstimateOptions& o) {
    const Ensemble e1 = io::read_ensemble(o.e1);
    const Ensemble e2 = io::read_ensemble(o.e2);
    const auto metric = MetricId::parse(o.metric);
    if (!metric) throw CLI::ValidationError("unknown metric: " + o.metric);

    std::optional<NoiseConfig> noise;
    if (o.noise_eps_ball >= 0.0) noise = NoiseConfig{o.noise_eps_ball};

    LabelCounts c11, c12, c22;
    const bool needs_self_kinds =
        metric->family != MetricId::Family::wasserstein;

    if (!o.replay.empty()) {
        // replay an existing batch CSV instead of sampling
        const SampleBatch all = io::read_batch_csv(
            o.replay, std::max(e1.size(), e2.size()), std::max(e1.size(), e2.size()));
        SampleBatch b11, b12, b22;
        auto shape = [&](SampleBatch& b, PairKind kind, int n1, int n2) {
            b.kind = kind;
            b.n1 = n1;
            b.n2 = n2;
        };
        shape(b11, PairKind::k11, e1.size(), e1.size());
        shape(b12, PairKind::k12, e1.size(), e2.size());
        shape(b22, PairKind::k22, e2.size(), e2.size());
        for (const SampleRecord& rec : all.records) {
            SampleBatch& b = rec.kind == PairKind::k11   ? b11
                             : rec.kind == PairKind::k12 ? b12
                                                         : b22;
            if (rec.i >= b.n1 || rec.j >= b.n2)
                throw std::runtime_error("replay: record outside the label space");
            b.records.push_back(rec);
            ++b.budget;
        }
        c11 = b11.to_counts();
        c12 = b12.to_counts();
        c22 = b22.to_counts();
    } else {
        SampleBatch b11, b12, b22;
        if (metric->family == MetricId::Family::wasserstein) {
            b12 = draw_batch_pooled(e1, e2, PairKind::k12, o.m,
                                    mix_seed(o.seed, 1), o.workers, noise);
        } else {
            const auto split = budget_split(o.m);
            b11 = draw_batch_pooled(e1, e1, PairKind::k11, split[0],
                                    mix_seed(o.seed, 0), o.workers, noise);
            b12 = draw_batch_pooled(e1, e2, PairKind::k12, split[1],
                                    mix_seed(o.seed, 1), o.workers, noise);
            b22 = draw_batch_pooled(e2, e2, PairKind::k22, split[2],
                                    mix_seed(o.seed, 2), o.workers, noise);
        }
        // persist for replay: kinds concatenated in 11, 12, 22 order
        SampleBatch all;
        all.records.reserve(b11.records.size() + b12.records.size() +
                            b22.records.size());
        for (const auto* b : {&b11, &b12, &b22})
            all.records.insert(all.records.end(), b->records.begin(),
                               b->records.end());
        io::write_batch_csv(o.out_batch, all);
        c11 = b11.to_counts();
        c12 = b12.to_counts();
        c22 = b22.to_counts();
        if (!needs_self_kinds) {
            c11 = LabelCounts{};
            c22 = LabelCounts{};
        }
    }

    EstimateReport report;
    const std::string est = o.estimator;
    if (metric->family == MetricId::Family::wasserstein) {
        report = est == "nonuniform" ? nonuniform_wasserstein_estimate(c12)
                                     : wasserstein_estimate(c12);
    } else if (metric->family == MetricId::Family::classical_mmd) {
        throw CLI::ValidationError(
            "classical metrics estimate from oracle draws; use --metric mmd-k "
            "with --estimator classical");
    } else if (est == "labelfree") {
        report = mmd1_labelfree(c11, c12, c22);
    } else if (est == "nonuniform") {
        report = nonuniform_mmd_k_estimate(c11, c12, c22, metric->k);
    } else if (est == "classical") {
        Rng rng(o.seed);
        const auto split = budget_split(o.m);
        const auto d11 = classical_oracle_batch(e1, e1, PairKind::k11, split[0], rng);
        const auto d12 = classical_oracle_batch(e1, e2, PairKind::k12, split[1], rng);
        const auto d22 = classical_oracle_batch(e2, e2, PairKind::k22, split[2], rng);
        report = classical_mmd_k_estimate(d11, d12, d22, metric->k);
    } else if (est == "ustat") {
        report = mmd_k_estimate(c11, c12, c22, metric->k);
    } else {
        throw CLI::ValidationError("unknown estimator: " + est);
    }

    if (!o.out_plan.empty() && report.coupling)
        io::write_plan_csv(o.out_plan, *report.coupling);

    json out;
    out["config"] = estimate_config_json(o);
    out["report"] = json::parse(io::estimate_report_to_json(report));
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// --- sweep ---------------------------------------------------------------------

struct SweepOptions {
    std::string config_file;
    std::string metric = "mmd-1";
    std::string e1 = "cluster";
    std::string e2 = "circular";
    double s = 0.08;
    int d = 2;
    double theta = 0.0;
    std::vector<int> n_list;
    double eps = 0.1;
    double delta = 1.0 / 3.0;
    int repetitions = 30;
    int trials = 20;
    int j_max = 8;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out = "sweep-out";
};

// TOML-style key = value lines; '#' starts a comment. Flags override file values.
void load_sweep_config(const std::string& path, SweepOptions& o) {
    const std::string text = io::read_text_file(path);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        if (key == "metric") o.metric = value;
        else if (key == "e1") o.e1 = value;
        else if (key == "e2") o.e2 = value;
        else if (key == "s") o.s = std::stod(value);
        else if (key == "d") o.d = std::stoi(value);
        else if (key == "theta") o.theta = std::stod(value);
        else if (key == "n") {
            o.n_list.clear();
            for (double v : parse_weights(value)) o.n_list.push_back(int(v));
        } else if (key == "eps") o.eps = std::stod(value);
        else if (key == "delta") o.delta = std::stod(value);
        else if (key == "repetitions") o.repetitions = std::stoi(value);
        else if (key == "trials") o.trials = std::stoi(value);
        else if (key == "jmax") o.j_max = std::stoi(value);
        else if (key == "seed") o.seed = std::strtoull(value.c_str(), nullptr, 10);
        else if (key == "workers") o.workers = std::stoi(value);
        else if (key == "out") o.out = value;
        else throw CLI::ValidationError("unknown sweep config key: " + key);
    }
}

EnsembleGenerator make_generator(const std::string& name, const SweepOptions& o) {
    if (name == "cluster") {
        const double s = o.s;
        return [s](int n, Rng& rng) { return cluster_ensemble(n, s, rng); };
    }
    if (name == "circular")
        return [](int n, Rng& rng) { return circular_ensemble(n, rng); };
    if (name == "haar") {
        const int d = o.d;
        return [d](int n, Rng& rng) { return haar_ensemble(n, d, rng); };
    }
    if (name == "hardpair") {
        const double theta = o.theta;
        return [theta](int n, Rng&) { return hard_pair(n, theta); };
    }
    throw CLI::ValidationError("unknown ensemble generator: " + name);
}

json sweep_config_json(const SweepOptions& o) {
    json cfg;
    cfg["command"] = "sweep";
    cfg["metric"] = o.metric;
    cfg["e1"] = o.e1;
    cfg["e2"] = o.e2;
    cfg["s"] = o.s;
    cfg["d"] = o.d;
    cfg["theta"] = o.theta;
    cfg["n"] = o.n_list;
    cfg["eps"] = o.eps;
    cfg["delta"] = o.delta;
    cfg["repetitions"] = o.repetitions;
    cfg["trials"] = o.trials;
    cfg["jmax"] = o.j_max;
    cfg["seed"] = o.seed;
    cfg["workers"] = o.workers;
    cfg["out"] = o.out;
    return cfg;
}

int run_sweep(const SweepOptions& o) {
    if (o.n_list.size() < 3)
        throw CLI::ValidationError("sweep needs at least 3 values of N");
    const auto metric = MetricId::parse(o.metric);
    if (!metric) throw CLI::ValidationError("unknown metric: " + o.metric);

    fs::create_directories(o.out);
    const EnsembleGenerator gen1 = make_generator(o.e1, o);
    const EnsembleGenerator gen2 = make_generator(o.e2, o);

    ComplexityConfig cfg;
    cfg.eps = o.eps;
    cfg.delta = o.delta;
    cfg.repetitions = o.repetitions;
    cfg.trials = o.trials;
    cfg.j_max = o.j_max;
    cfg.seed = o.seed;
    cfg.workers = o.workers;

    // Work items are (N, trial) pairs; finished trials are persisted and
    // skipped on rerun, which makes interrupted sweeps resumable.
    struct Item {
        int n;
        int trial;
    };
    std::vector<Item> items;
    for (int n : o.n_list)
        for (int t = 0; t < o.trials; ++t) items.push_back({n, t});

    std::vector<TrialOutcome> outcomes(items.size());
    const int workers =
        o.workers > 0 ? o.workers : int(std::thread::hardware_concurrency());
    parallel_for(std::int64_t(items.size()), workers, [&](std::int64_t w) {
        const Item item = items[std::size_t(w)];
        const fs::path trial_path =
            fs::path(o.out) / ("trial_" + o.metric + "_N" + std::to_string(item.n) +
                               "_t" + std::to_string(item.trial) + ".json");
        if (fs::exists(trial_path)) {
            const json j = json::parse(io::read_text_file(trial_path.string()));
            outcomes[std::size_t(w)] = {j.at("M").get<std::int64_t>(),
                                        j.at("d_true").get<double>(),
                                        j.at("ok").get<bool>()};
            return;
        }
        const ComplexityConfig point_cfg = config_for_point(cfg, item.n);
        const TrialOutcome outcome =
            run_trial(*metric, gen1, gen2, item.n, point_cfg, item.trial);
        json j;
        j["metric"] = o.metric;
        j["N"] = item.n;
        j["trial"] = item.trial;
        j["M"] = outcome.min_samples;
        j["d_true"] = outcome.d_true;
        j["ok"] = outcome.ok;
        io::write_text_file(trial_path.string(), j.dump(2) + "\n");
        outcomes[std::size_t(w)] = outcome;
        std::cerr << "sweep " << o.metric << " N=" << item.n
                  << " trial=" << item.trial << " M=" << outcome.min_samples
                  << (outcome.ok ? "" : " (bracketing failed)") << "\n";
    });

    // assemble the curve in N order
    ComplexityCurve curve;
    curve.metric_id = metric->name();
    std::size_t w = 0;
    for (int n : o.n_list) {
        ComplexityPoint point;
        point.n = n;
        MinSamplesResult& res = point.result;
        double sum = 0.0, sum2 = 0.0;
        int ok = 0;
        for (int t = 0; t < o.trials; ++t, ++w) {
            res.trials.push_back(outcomes[w]);
            if (!outcomes[w].ok) {
                ++res.failed;
                continue;
            }
            sum += double(outcomes[w].min_samples);
            sum2 += double(outcomes[w].min_samples) * double(outcomes[w].min_samples);
            ++ok;
        }
        if (ok == 0) throw std::runtime_error("sweep: every trial failed at N");
        res.mean = sum / ok;
        const double var = sum2 / ok - res.mean * res.mean;
        res.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
        curve.points.push_back(std::move(point));
    }
    std::vector<std::pair<double, double>> pts;
    for (const ComplexityPoint& p : curve.points)
        pts.emplace_back(double(p.n), p.result.mean);
    curve.fit = fit_loglog(pts);

    const fs::path curve_path = fs::path(o.out) / "curve.csv";
    io::write_curve_csv(curve_path.string(), curve, metric->k);

    json summary;
    summary["config"] = sweep_config_json(o);
    summary["metric"] = curve.metric_id;
    summary["slope"] = curve.fit.slope;
    summary["intercept"] = curve.fit.intercept;
    summary["r2"] = curve.fit.r2;
    json points = json::array();
    for (const ComplexityPoint& p : curve.points) {
        json jp;
        jp["N"] = p.n;
        jp["mean"] = p.result.mean;
        jp["std"] = p.result.stddev;
        jp["failed"] = p.result.failed;
        points.push_back(std::move(jp));
    }
    summary["points"] = std::move(points);
    const std::string summary_text = summary.dump(2) + "\n";
    io::write_text_file((fs::path(o.out) / "summary.json").string(), summary_text);
    std::cout << summary_text;
    return kExitOk;
}

// --- bounds --------------------------------------------------------------------

int run_bounds(const std::vector<int>& ns, int k, double eps, double delta) {
    json out;
    json cfg;
    cfg["command"] = "bounds";
    cfg["n"] = ns;
    cfg["k"] = k;
    cfg["eps"] = eps;
    cfg["delta"] = delta;
    out["config"] = cfg;
    json rows = json::array();
    for (int n : ns) {
        const double n2 = double(n) * double(n);
        json row;
        row["N"] = n;
        row["wasserstein"] = hoeffding_bound_wasserstein(n, eps, delta);
        row["mmd_fixed_branch"] = mmd_k_bound_fixed_branch(n, k, eps, delta);
        row["mmd_general_branch"] = mmd_k_bound_general_branch(n, k, eps, delta);
        row["mmd_k_eq_n"] = hoeffding_bound_mmd_k(n, n, eps, delta);
        row["occupancy_coverage"] =
            min_samples_for_occupancy(1.0, std::int64_t(n) * n, delta, 1.0 / n2);
        rows.push_back(std::move(row));
    }
    out["rows"] = std::move(rows);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distances between ensembles of pure quantum states"};
    app.require_subcommand(1);

    GenOptions gen;
    gen.seed = default_seed();
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate an ensemble file");
    cmd_gen->add_option("--type", gen.type,
                        "cluster|circular|hardpair|basis|haar|fidelity-table")
        ->required();
    cmd_gen->add_option("--n", gen.n, "number of states");
    cmd_gen->add_option("--d", gen.d, "dimension (basis/haar)");
    cmd_gen->add_option("--s", gen.s, "cluster scale factor");
    cmd_gen->add_option("--theta", gen.theta, "hardpair phase offset");
    cmd_gen->add_option("--weights", gen.weights, "basis weights, comma separated");
    cmd_gen->add_option("--table", gen.table, "fidelity table CSV to realize");
    cmd_gen->add_option("--seed", gen.seed, "rng seed");
    cmd_gen->add_option("--out", gen.out, "output ensemble JSON");
    cmd_gen->add_option("--out2", gen.out2, "second output (fidelity-table)");

    DistOptions dist;
    CLI::App* cmd_dist = app.add_subcommand("dist", "exact distance between ensembles");
    cmd_dist->add_option("--e1", dist.e1, "first ensemble JSON")->required();
    cmd_dist->add_option("--e2", dist.e2, "second ensemble JSON")->required();
    cmd_dist->add_option("--metric", dist.metric, "mmd-k or wasserstein");
    cmd_dist->add_flag("--cross-check", dist.cross_check,
                       "also run the moment-operator route");
    cmd_dist->add_option("--out-plan", dist.out_plan,
                         "write the transport plan as sparse i,j,mass CSV");

    EstimateOptions est;
    est.seed = default_seed();
    CLI::App* cmd_est =
        app.add_subcommand("estimate", "estimate a distance from SWAP-test samples");
    cmd_est->add_option("--e1", est.e1)->required();
    cmd_est->add_option("--e2", est.e2)->required();
    cmd_est->add_option("--metric", est.metric, "mmd-k or wasserstein");
    cmd_est->add_option("--estimator", est.estimator,
                        "ustat|labelfree|nonuniform|classical");
    cmd_est->add_option("--m", est.m, "sample budget");
    cmd_est->add_option("--seed", est.seed, "rng seed");
    cmd_est->add_option("--workers", est.workers, "sampling worker pool size");
    cmd_est->add_option("--noise-eps-ball", est.noise_eps_ball,
                        "replace states by eps-ball draws of this radius");
    cmd_est->add_option("--out-batch", est.out_batch, "batch CSV path");
    cmd_est->add_option("--out-plan", est.out_plan,
                        "write the estimated transport plan (wasserstein)");
    cmd_est->add_option("--replay", est.replay, "recompute from a batch CSV");

    SweepOptions sweep_opts;
    sweep_opts.seed = default_seed();
    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "sample-complexity sweep over N");
    cmd_sweep->add_option("--config", sweep_opts.config_file, "key = value file");
    cmd_sweep->add_option("--metric", sweep_opts.metric);
    cmd_sweep->add_option("--e1", sweep_opts.e1);
    cmd_sweep->add_option("--e2", sweep_opts.e2);
    cmd_sweep->add_option("--n", sweep_opts.n_list, "ensemble sizes");
    cmd_sweep->add_option("--eps", sweep_opts.eps);
    cmd_sweep->add_option("--delta", sweep_opts.delta);
    cmd_sweep->add_option("--repetitions", sweep_opts.repetitions, "probes per level");
    cmd_sweep->add_option("--trials", sweep_opts.trials);
    cmd_sweep->add_option("--seed", sweep_opts.seed);
    cmd_sweep->add_option("--workers", sweep_opts.workers);
    cmd_sweep->add_option("--out", sweep_opts.out, "output directory");

    std::vector<int> bounds_n{100};
    int bounds_k = 2;
    double bounds_eps = 0.1, bounds_delta = 1.0 / 3.0;
    CLI::App* cmd_bounds = app.add_subcommand("bounds", "analytic budget table");
    cmd_bounds->add_option("--n", bounds_n, "ensemble sizes");
    cmd_bounds->add_option("--k", bounds_k);
    cmd_bounds->add_option("--eps", bounds_eps);
    cmd_bounds->add_option("--delta", bounds_delta);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_dist->parsed()) return run_dist(dist);
        if (cmd_est->parsed()) return run_estimate(est);
        if (cmd_sweep->parsed()) {
            // file first, then flags re-applied on top
            if (!sweep_opts.config_file.empty()) {
                SweepOptions from_file = sweep_opts;
                load_sweep_config(sweep_opts.config_file, from_file);
                // flags that were explicitly given override the file
                for (const CLI::Option* opt : cmd_sweep->get_options()) {
                    if (opt->count() == 0) continue;
                    const std::string name = opt->get_name();
                    if (name == "--metric") from_file.metric = sweep_opts.metric;
                    else if (name == "--e1") from_file.e1 = sweep_opts.e1;
                    else if (name == "--e2") from_file.e2 = sweep_opts.e2;
                    else if (name == "--n") from_file.n_list = sweep_opts.n_list;
                    else if (name == "--eps") from_file.eps = sweep_opts.eps;
                    else if (name == "--delta") from_file.delta = sweep_opts.delta;
                    else if (name == "--repetitions")
                        from_file.repetitions = sweep_opts.repetitions;
                    else if (name == "--trials") from_file.trials = sweep_opts.trials;
                    else if (name == "--seed") from_file.seed = sweep_opts.seed;
                    else if (name == "--workers") from_file.workers = sweep_opts.workers;
                    else if (name == "--out") from_file.out = sweep_opts.out;
                }
                return run_sweep(from_file);
            }
            return run_sweep(sweep_opts);
        }
        if (cmd_bounds->parsed())
            return run_bounds(bounds_n, bounds_k, bounds_eps, bounds_delta);
    } catch (const EstimatorError& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kExitEstimator;
    } catch (const CapExceeded& e) {
        std::cerr << "numerical cap: " << e.what() << "\n";
        return kExitCap;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
