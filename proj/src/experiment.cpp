#include "polylab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polylab/conjugate.hpp"
#include "polylab/count.hpp"
#include "polylab/environment.hpp"
#include "polylab/free_energy.hpp"
#include "polylab/rng.hpp"
#include "polylab/smoothed.hpp"
#include "polylab/transfer.hpp"

namespace polylab {

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

CheckResult make_check(std::string name, bool pass, double lhs, double rhs, double slack) {
    return CheckResult{std::move(name), pass, lhs, rhs, slack};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid experiment config: " + join(violations, "; ")),
      violations_(std::move(violations)) {}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    if (model) j["model"] = model_to_json(*model);
    j["d"] = d;
    if (!n_list.empty()) j["n_list"] = n_list;
    if (!beta_grid.empty()) j["beta_grid"] = beta_grid;
    if (!rho_grid.empty()) j["rho_grid"] = rho_grid;
    if (rho) j["rho"] = *rho;
    if (!lambda_grid.empty()) j["lambda_grid"] = lambda_grid;
    if (!xi_list.empty()) j["xi_list"] = xi_list;
    if (!u_grid.empty()) j["u_grid"] = u_grid;
    j["delta"] = delta;
    if (M > 0) j["M"] = M;
    if (seed) j["seed"] = *seed;
    j["output_dir"] = output_dir;
    return j;
}

namespace {

// A grid is either an explicit array or {"min": a, "max": b, "step": s}.
std::vector<double> parse_grid(const nlohmann::json& j) {
    std::vector<double> out;
    if (j.is_array()) {
        out = j.get<std::vector<double>>();
        return out;
    }
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const double step = j.at("step").get<double>();
    if (!(step > 0.0) || hi < lo) {
        throw std::invalid_argument("grid: requires step > 0 and max >= min");
    }
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.kind = j.value("kind", "");
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    c.d = j.value("d", 1);
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("n")) c.n_list = {j.at("n").get<int>()};
    if (j.contains("beta_grid")) c.beta_grid = parse_grid(j.at("beta_grid"));
    if (j.contains("rho_grid")) c.rho_grid = parse_grid(j.at("rho_grid"));
    if (j.contains("rho")) c.rho = j.at("rho").get<double>();
    if (j.contains("lambda_grid")) c.lambda_grid = parse_grid(j.at("lambda_grid"));
    if (j.contains("xi_list")) c.xi_list = parse_grid(j.at("xi_list"));
    if (j.contains("u_grid")) c.u_grid = parse_grid(j.at("u_grid"));
    c.delta = j.value("delta", 0.1);
    c.M = j.value("M", 0);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = j.value("output_dir", "");
    return c;
}

void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    const bool known_kind = kind == "free-energy" || kind == "rate-function" ||
                            kind == "corollary" || kind == "smoothed" || kind == "verify";
    if (!known_kind) bad.push_back("kind: must be one of free-energy, rate-function, corollary, smoothed, verify");
    if (output_dir.empty()) bad.push_back("output_dir: required");
    if (!seed) bad.push_back("seed: required");
    if (kind != "verify" && known_kind) {
        if (!model) bad.push_back("model: required");
        if (d < 1) bad.push_back("d: must be >= 1");
        if (M < 2) bad.push_back("M: must be >= 2");
        if (n_list.empty()) bad.push_back("n_list: must be nonempty");
        for (int n : n_list) {
            if (n < 1) {
                bad.push_back("n_list: entries must be >= 1");
                break;
            }
        }
        if (!std::is_sorted(n_list.begin(), n_list.end())) {
            bad.push_back("n_list: must be ascending");
        }
    }
    if (kind == "free-energy" || kind == "rate-function" || kind == "corollary") {
        if (beta_grid.empty()) bad.push_back("beta_grid: must be nonempty");
        if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) {
            bad.push_back("beta_grid: must be sorted ascending");
        }
    }
    if (kind == "corollary") {
        if (!rho) bad.push_back("rho: required for corollary runs");
        if (model && !model->integer_valued()) {
            bad.push_back("model: corollary runs need an integer-valued model");
        }
    }
    if (kind == "smoothed") {
        if (lambda_grid.empty()) bad.push_back("lambda_grid: must be nonempty");
        if (xi_list.empty()) bad.push_back("xi_list: must be nonempty");
        if (!(delta > 0.0)) bad.push_back("delta: must be > 0");
    }
    if (!bad.empty()) throw ConfigError(std::move(bad));
}

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& dir, const std::string& name, const std::string& content,
                RunSummary& summary) {
    fs::path p = dir / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
    summary.files_written.push_back(p.string());
}

void write_json(const fs::path& dir, const std::string& name, const nlohmann::json& j,
                RunSummary& summary) {
    write_file(dir, name, j.dump(2) + "\n", summary);
}

nlohmann::json checks_json(const std::vector<CheckResult>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs},
                       {"slack", c.slack}});
    }
    return arr;
}

void append_curve_checks(const FreeEnergyCurve& curve, std::vector<CheckResult>& checks) {
    char name[128];
    for (std::size_t bi = 0; bi < curve.beta_grid.size(); ++bi) {
        if (curve.beta_grid[bi] == 0.0) {
            const MeanSe& est = curve.top(bi);
            checks.push_back(make_check("free energy estimate at beta=0 is exactly zero",
                                        est.mean == 0.0 && est.se == 0.0, est.mean, 0.0,
                                        -std::fabs(est.mean)));
            continue;
        }
        const auto& est = curve.top(bi);
        const double lambda = curve.lambda_values[bi];
        const double slack = lambda + 3.0 * est.se - est.mean;
        std::snprintf(name, sizeof(name), "jensen bound at beta=%g", curve.beta_grid[bi]);
        checks.push_back(make_check(name, slack >= 0.0, est.mean, lambda, slack));
    }
    // Convexity of the estimated curve in beta, within the pooled noise.
    bool convex = true;
    double worst = 0.0;
    for (std::size_t bi = 0; bi + 2 < curve.beta_grid.size(); ++bi) {
        const double b0 = curve.beta_grid[bi], b1 = curve.beta_grid[bi + 1],
                     b2 = curve.beta_grid[bi + 2];
        const auto &e0 = curve.top(bi), &e1 = curve.top(bi + 1), &e2 = curve.top(bi + 2);
        const double t = (b1 - b0) / (b2 - b0);
        const double chord = (1.0 - t) * e0.mean + t * e2.mean;
        const double pooled =
            std::sqrt(e0.se * e0.se + e1.se * e1.se + e2.se * e2.se);
        const double violation = e1.mean - chord - 3.0 * pooled;
        worst = std::max(worst, violation);
        if (violation > 0.0) convex = false;
    }
    if (curve.beta_grid.size() >= 3) {
        checks.push_back(
            make_check("free energy curve convex in beta (3 se)", convex, worst, 0.0, -worst));
    }
}

struct CurveAndRate {
    FreeEnergyCurve curve;
    RateFunctionGrid rate;
};

CurveAndRate compute_curve(const ExperimentConfig& cfg, bool with_rate,
                           std::vector<CheckResult>& checks) {
    FreeEnergyCurve curve =
        estimate_free_energy(*cfg.model, cfg.d, cfg.beta_grid, cfg.n_list, cfg.M, *cfg.seed);
    append_curve_checks(curve, checks);
    RateFunctionGrid rate;
    if (with_rate) {
        rate = rate_from_curve(curve, cfg.rho_grid);
        double min_i = *std::min_element(rate.value.begin(), rate.value.end());
        double max_se = 0.0;
        for (double s : rate.se) max_se = std::max(max_se, s);
        checks.push_back(make_check("rate function nonnegative up to noise",
                                    min_i >= -3.0 * max_se - 1e-12, min_i, 0.0, min_i));
        auto at_mean = rate.value_at(cfg.model->mean());
        checks.push_back(make_check("rate function vanishes at the mean (3 se)",
                                    at_mean.value <= 3.0 * at_mean.se + 1e-9, at_mean.value,
                                    0.0, -at_mean.value));
    }
    return {std::move(curve), std::move(rate)};
}

RunSummary run_corollary(const ExperimentConfig& cfg, RunSummary summary) {
    CurveAndRate cr = compute_curve(cfg, true, summary.checks);
    const FreeEnergyCurve& curve = cr.curve;
    const RateFunctionGrid& rate = cr.rate;
    CorollaryReport rep =
        corollary_check(*cfg.model, cfg.d, *cfg.rho, cfg.n_list, cfg.M, *cfg.seed, rate);
    summary.checks.push_back(make_check(
        "corollary growth-rate difference nonincreasing in n", rep.trend_nonincreasing(),
        rep.rows.back().abs_diff, rep.rows.front().abs_diff,
        rep.rows.front().abs_diff - rep.rows.back().abs_diff));

    std::string csv = "n,samples,zero_count,mean_log_growth,se,target,abs_diff\n";
    char buf[256];
    for (const auto& row : rep.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", row.n,
                      row.samples, row.zero_count, row.mean, row.se, rep.target, row.abs_diff);
        csv += buf;
    }

    nlohmann::json report;
    report["rho"] = rep.rho;
    report["rate_value"] = rep.rate_value;
    report["rate_se"] = rep.rate_se;
    report["target"] = rep.target;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : rep.rows) {
        rows.push_back({{"n", row.n},
                        {"samples", row.samples},
                        {"zero_count", row.zero_count},
                        {"mean", row.mean},
                        {"se", row.se},
                        {"abs_diff", row.abs_diff}});
    }
    report["rows"] = rows;

    const fs::path dir(cfg.output_dir);
    write_file(dir, "free_energy.csv", curve_csv(
        curve), summary);
    write_file(dir, "rate_function.csv", rate_csv(rate), summary);
    write_file(dir, "corollary.csv", csv, summary);
    write_json(dir, "corollary_report.json", report, summary);
    return summary;
}

RunSummary run_smoothed(const ExperimentConfig& cfg, RunSummary summary) {
    char name[160];
    char buf[256];
    std::string rate_csv_text = "xi,lambda,n,estimate,se\n";
    std::vector<double> lambdas = cfg.lambda_grid;
    std::sort(lambdas.begin(), lambdas.end());

    for (double xi : cfg.xi_list) {
        std::vector<RateLambdaSequence> per_lambda;
        for (double lambda : lambdas) {
            RateLambdaSequence seq =
                rate_lambda_estimate(*cfg.model, cfg.d, xi, lambda, cfg.n_list, cfg.M, *cfg.seed);
            for (const auto& e : seq.entries) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.17g,%.17g\n", xi, lambda, e.n,
                              e.estimate, e.se);
                rate_csv_text += buf;
            }
            std::snprintf(name, sizeof(name),
                          "subadditive trend (xi=%g, lambda=%g): terms above the limit", xi,
                          lambda);
            summary.checks.push_back(make_check(name, seq.trend_ok(), seq.limit_estimate(),
                                                seq.entries.front().estimate, 0.0));
            per_lambda.push_back(std::move(seq));
        }
        // I^(lambda) nondecreasing in lambda, with shared seeds.
        bool mono = true;
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < per_lambda.size(); ++i) {
            const double a = per_lambda[i].limit_estimate();
            const double b = per_lambda[i + 1].limit_estimate();
            const double pooled = std::sqrt(per_lambda[i].limit_se() * per_lambda[i].limit_se() +
                                            per_lambda[i + 1].limit_se() *
                                                per_lambda[i + 1].limit_se());
            const double violation = a - b - 3.0 * pooled;
            worst = std::max(worst, violation);
            if (violation > 0.0) mono = false;
        }
        if (per_lambda.size() >= 2) {
            std::snprintf(name, sizeof(name), "rate estimates nondecreasing in lambda (xi=%g)",
                          xi);
            summary.checks.push_back(make_check(name, mono, worst, 0.0, -worst));
        }
    }

    // Concentration tails at the largest horizon.
    std::string conc_csv = "u,empirical,bound_derived,bound_displayed,binomial_se\n";
    if (!cfg.u_grid.empty()) {
        const int n = cfg.n_list.back();
        const double a = cfg.xi_list.front() * n;
        const double lambda = lambdas.front();
        ConcentrationReport conc = concentration_experiment(*cfg.model, cfg.d, n, a, lambda,
                                                            std::max(cfg.M, 100), *cfg.seed,
                                                            cfg.u_grid);
        for (const auto& e : conc.entries) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", e.u, e.empirical,
                          e.bound_derived, e.bound_displayed, e.binomial_se);
            conc_csv += buf;
        }
        summary.checks.push_back(make_check("concentration tails below derived bound (3 se)",
                                            conc.pass(), 0.0, 0.0, 0.0));
    }

    // Sampled exact checks: segment gluing and the two-sided mass control.
    rng::SequentialRng gen(*cfg.seed);
    double worst_super = 0.0, worst_sandwich = 0.0;
    for (int c = 0; c < 10; ++c) {
        const int n = gen.next_int(2, 6);
        const int m = gen.next_int(2, 6);
        const double a = gen.next_in(-1.0, m + 1.0);
        const double b = gen.next_in(-1.0, n + 1.0);
        const double lambda = lambdas[static_cast<std::size_t>(c) % lambdas.size()];
        LatticeEnvironment env(*cfg.model, cfg.d, n + m, rng::derive_seed(*cfg.seed, 1000 + c));
        if (cfg.model->integer_valued()) {
            auto rep = superadditivity_check_pathwise(env, n, m, a, b, lambda);
            worst_super = std::min(worst_super,
                                   std::min(rep.lhs - rep.middle, rep.middle - rep.rhs));
            auto table = count_table(env, n + m);
            auto sw = sandwich_bounds(table, gen.next_in(-0.2, 1.2), cfg.delta, lambda);
            worst_sandwich =
                std::min(worst_sandwich, std::min(sw.slack_upper, sw.slack_lower));
        } else {
            QuantizedView q(env, 0.01);
            auto rep = superadditivity_check_pathwise(q, n, m, a / 0.01, b / 0.01, lambda * 0.01);
            worst_super = std::min(worst_super,
                                   std::min(rep.lhs - rep.middle, rep.middle - rep.rhs));
            auto table = count_table(q, n + m);
            auto sw = sandwich_bounds(table, gen.next_in(-0.2, 1.2), cfg.delta, lambda, 0.01);
            worst_sandwich =
                std::min(worst_sandwich, std::min(sw.slack_upper, sw.slack_lower));
        }
    }
    summary.checks.push_back(make_check("pathwise superadditivity chain (sampled)",
                                        worst_super >= -1e-9, worst_super, 0.0, worst_super));
    summary.checks.push_back(make_check("sandwich bounds (sampled)", worst_sandwich >= -1e-9,
                                        worst_sandwich, 0.0, worst_sandwich));

    const fs::path dir(cfg.output_dir);
    write_file(dir, "rate_lambda.csv", rate_csv_text, summary);
    if (!cfg.u_grid.empty()) write_file(dir, "concentration.csv", conc_csv, summary);
    return summary;
}

}  // namespace

RunSummary run(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    RunSummary summary;
    summary.kind = cfg.kind;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    if (cfg.kind == "verify") {
        auto checks = verify_suite(*cfg.seed);
        summary.checks = checks;
        nlohmann::json ledger = checks_json(checks);
        write_json(dir, "verify_ledger.json", ledger, summary);
    } else if (cfg.kind == "free-energy" || cfg.kind == "rate-function") {
        CurveAndRate cr = compute_curve(cfg, cfg.kind == "rate-function", summary.checks);
        write_file(dir, "free_energy.csv", curve_csv(cr.curve), summary);
        if (cfg.kind == "rate-function") {
            write_file(dir, "rate_function.csv", rate_csv(cr.rate), summary);
        }
    } else if (cfg.kind == "corollary") {
        summary = run_corollary(cfg, std::move(summary));
    } else if (cfg.kind == "smoothed") {
        summary = run_smoothed(cfg, std::move(summary));
    }

    summary.all_pass = true;
    for (const auto& c : summary.checks) summary.all_pass = summary.all_pass && c.pass;

    nlohmann::json sj;
    sj["kind"] = cfg.kind;
    sj["all_pass"] = summary.all_pass;
    sj["checks"] = checks_json(summary.checks);
    write_json(dir, "summary.json", sj, summary);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::json manifest;
    manifest["config"] = cfg.to_json();
    manifest["version"] = kArtifactVersion;
    manifest["wall_seconds"] = wall;
    write_json(dir, "manifest.json", manifest, summary);
    return summary;
}

namespace {

// Worst (most negative) slack tracker for batched inequality checks.
struct WorstSlack {
    double value = std::numeric_limits<double>::infinity();
    void add(double s) { value = std::min(value, s); }
};

}  // namespace

std::vector<CheckResult> verify_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const auto bern = DistributionModel::bernoulli(0.5);

    // Eq.(1): the exponential moment of nu_n against the transfer recursion.
    {
        WorstSlack residual;
        for (int rep = 0; rep < 3; ++rep) {
            LatticeEnvironment env(bern, 1, 20, rng::derive_seed(seed, rep));
            auto table = count_table(env, 20);
            for (double beta : {-2.0, -0.5, 1.0, 3.0}) {
                auto r = verify_partition_identity(table, env, beta);
                residual.add(1e-9 - std::fabs(r.residual));
            }
        }
        out.push_back(make_check("Eq.(1) partition identity", residual.value >= 0.0,
                                 1e-9 - residual.value, 1e-9, residual.value));
    }

    // Exponential tightness: the two-sided moment bound.
    {
        WorstSlack slack;
        for (int rep = 0; rep < 3; ++rep) {
            LatticeEnvironment env(bern, 1, 16, rng::derive_seed(seed, 10 + rep));
            auto table = count_table(env, 16);
            for (double beta : {0.5, 1.0, 2.0}) {
                slack.add(verify_tightness_bound(table, env, beta).slack + 1e-10);
            }
        }
        out.push_back(make_check("Eq.(1) exponential tightness", slack.value >= 0.0,
                                 -slack.value, 0.0, slack.value));
    }

    // Step 1, pathwise: the full gluing chain on sampled environments.
    {
        rng::SequentialRng gen(seed ^ 0x5741ull);
        WorstSlack slack;
        for (int c = 0; c < 20; ++c) {
            const int d = (c % 4 == 3) ? 2 : 1;
            const int n = gen.next_int(1, d == 1 ? 8 : 5);
            const int m = gen.next_int(1, d == 1 ? 8 : 5);
            const double a = gen.next_in(-1.0, m + 1.0);
            const double b = gen.next_in(-1.0, n + 1.0);
            const double lambda = std::vector<double>{0.5, 1.0, 5.0}[c % 3];
            LatticeEnvironment env(bern, d, n + m, rng::derive_seed(seed, 100 + c));
            auto rep = superadditivity_check_pathwise(env, n, m, a, b, lambda);
            slack.add(rep.lhs - rep.middle + 1e-9);
            slack.add(rep.middle - rep.rhs + 1e-9);
        }
        out.push_back(make_check("Step 1 pathwise superadditivity", slack.value >= 0.0,
                                 -slack.value, 0.0, slack.value));
    }

    // Eq.(4): the averaged inequality.
    {
        auto rep = superadditivity_check_mean(bern, 1, 6, 6, 2.2, 1.4, 1.0, 60, seed ^ 0xEAull);
        out.push_back(make_check("Eq.(4) mean superadditivity", rep.pass(),
                                 rep.joint.mean, rep.head.mean + rep.tail.mean,
                                 rep.slack() + 3.0 * rep.pooled_se));
    }

    // Step 2: every term of the subadditive sequence sits above the final one.
    {
        const int ns[] = {4, 8, 16};
        auto seq = rate_lambda_estimate(bern, 1, 0.7, 1.0, ns, 60, seed ^ 0xF2ull);
        out.push_back(make_check("Step 2 subadditive rate trend", seq.trend_ok(),
                                 seq.entries.front().estimate, seq.limit_estimate(), 0.0));
    }

    // Step 3: dispersion of V against the derived concentration curve.
    {
        const double us[] = {1.0, 2.0, 4.0, 8.0};
        auto rep = concentration_experiment(bern, 1, 12, 0.6 * 12, 1.0, 150, seed ^ 0xC3ull, us);
        WorstSlack slack;
        for (const auto& e : rep.entries) {
            slack.add(e.bound_derived + 3.0 * e.binomial_se - e.empirical);
        }
        out.push_back(make_check("Step 3 concentration bound", slack.value >= 0.0, -slack.value,
                                 0.0, slack.value));
    }

    // Step 4: both sides of the two-sided mass control, exactly.
    {
        rng::SequentialRng gen(seed ^ 0x54ull);
        WorstSlack slack;
        for (int c = 0; c < 20; ++c) {
            const int n = gen.next_int(4, 20);
            const double xi = gen.next_in(-0.2, 1.2);
            const double delta = std::vector<double>{0.05, 0.1, 0.2}[c % 3];
            const double lambda = std::vector<double>{1.0, 5.0, 20.0}[(c / 3) % 3];
            LatticeEnvironment env(bern, 1, n, rng::derive_seed(seed, 300 + c));
            auto rep = sandwich_bounds(count_table(env, n), xi, delta, lambda);
            slack.add(rep.slack_upper + 1e-9);
            slack.add(rep.slack_lower + 1e-9);
        }
        out.push_back(make_check("Step 4 sandwich bounds", slack.value >= 0.0, -slack.value,
                                 0.0, slack.value));
    }

    // V is nonpositive and lambda-Lipschitz in its center.
    {
        rng::SequentialRng gen(seed ^ 0x11ull);
        LatticeEnvironment env(bern, 1, 16, rng::derive_seed(seed, 400));
        auto table = count_table(env, 16);
        WorstSlack slack;
        for (int c = 0; c < 200; ++c) {
            const double lambda = std::vector<double>{0.5, 1.0, 2.0}[c % 3];
            const double a = gen.next_in(-5.0, 21.0);
            const double a2 = gen.next_in(-5.0, 21.0);
            const double va = smoothed_value(table, lambda, a).value;
            const double vb = smoothed_value(table, lambda, a2).value;
            slack.add(lambda * std::fabs(a - a2) + 1e-10 - std::fabs(va - vb));
            slack.add(-va);
            slack.add(-vb);
        }
        out.push_back(make_check("Lipschitz and sign of V", slack.value >= 0.0, -slack.value,
                                 0.0, slack.value));
    }

    // sigma_n is a probability measure on parity-feasible endpoints.
    {
        WorstSlack slack;
        for (int rep = 0; rep < 3; ++rep) {
            LatticeEnvironment env(bern, rep == 2 ? 2 : 1, 10, rng::derive_seed(seed, 500 + rep));
            auto sigma = sigma_measure(env, 10, 4.2, 1.0);
            double total = 0.0;
            for (double p : sigma.prob) total += p;
            slack.add(1e-10 - std::fabs(total - 1.0));
        }
        out.push_back(make_check("sigma measure normalization", slack.value >= 0.0,
                                 1e-10 - slack.value, 1e-10, slack.value));
    }

    // Path-count conservation and the threshold / measure identity.
    {
        bool ok = true;
        LatticeEnvironment env(bern, 1, 20, rng::derive_seed(seed, 600));
        auto table = count_table(env, 20);
        auto measure = empirical_measure(table);
        ok = ok && measure.masses_sum_to_one(table);
        for (double rho : {0.3, 0.55, 0.75, 1.0}) {
            u128 direct = count_threshold(table, rho, 0.5);
            // Other route: (2d)^n nu_n([rho, inf)) from the measure atoms.
            u128 from_measure = 0;
            const double t = 20.0 * rho;
            for (const auto& atom : measure.atoms) {
                const bool in = rho >= 0.5 ? static_cast<double>(atom.h) >= t
                                           : static_cast<double>(atom.h) <= t;
                if (in) from_measure += atom.count;
            }
            ok = ok && direct == from_measure;
        }
        out.push_back(make_check("count conservation and threshold identity", ok, ok ? 1 : 0,
                                 1, 0.0));
    }

    // Z_n(beta) <= e^{beta H_max}: the maximal path weight dominates.
    {
        WorstSlack slack;
        for (int rep = 0; rep < 5; ++rep) {
            LatticeEnvironment env(bern, 1, 18, rng::derive_seed(seed, 700 + rep));
            const double hmax = max_path_weight(env, 18);
            for (double beta : {0.5, 1.0, 2.0}) {
                slack.add(hmax - partition_log(env, 18, beta).log_z / beta);
            }
        }
        out.push_back(make_check("max path weight dominates partition", slack.value >= -1e-12,
                                 -slack.value, 0.0, slack.value));
    }

    // Fenchel-Young on grids, plus the zero conditions at the mean.
    {
        WorstSlack slack;
        std::vector<DistributionModel> models = {
            bern, DistributionModel::gaussian(0.0, 1.0),
            DistributionModel::finite_discrete({-1.0, 1.0}, {0.5, 0.5})};
        for (const auto& model : models) {
            slack.add(1e-12 - std::fabs(log_mgf(model, 0.0)));
            auto at_mean = log_mgf_conjugate(model, model.mean());
            slack.add(1e-8 - std::fabs(at_mean.value()));
            for (double beta = -4.0; beta <= 4.0; beta += 0.5) {
                for (double rho = -1.0; rho <= 1.0; rho += 0.1) {
                    auto fy = log_mgf_conjugate(model, rho);
                    if (!fy.is_finite()) continue;
                    slack.add(log_mgf(model, beta) + fy.value() + 1e-10 - rho * beta);
                }
            }
        }
        out.push_back(make_check("Fenchel-Young and conjugate identities", slack.value >= 0.0,
                                 -slack.value, 0.0, slack.value));
    }

    // Endpoint law of the polymer measure sums to 1.
    {
        WorstSlack slack;
        LatticeEnvironment env(bern, 1, 16, rng::derive_seed(seed, 800));
        for (double beta : {0.0, 1.3}) {
            auto ep = endpoint_distribution(env, 16, beta);
            double total = 0.0;
            for (double p : ep.prob) total += p;
            slack.add(1e-10 - std::fabs(total - 1.0));
        }
        out.push_back(make_check("endpoint law normalization", slack.value >= 0.0,
                                 1e-10 - slack.value, 1e-10, slack.value));
    }

    return out;
}

}  // namespace polylab
