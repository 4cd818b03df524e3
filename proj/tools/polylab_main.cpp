// polylab: experiment runner for the directed-polymer laboratory.
//
// Subcommands either load a full JSON experiment config (`run`) or build one
// from flags (free-energy, rate, corollary, smoothed, verify). Exit status:
// 0 all checks passed, 1 some check failed, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polylab/distribution.hpp"
#include "polylab/experiment.hpp"

namespace {

using polylab::DistributionModel;
using polylab::ExperimentConfig;

// "bernoulli:0.5" | "gaussian:MEAN:VAR" | "discrete:v1,v2,...:p1,p2,..."
DistributionModel parse_model(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    auto parse_list = [](const std::string& csv) {
        std::vector<double> out;
        std::stringstream s(csv);
        std::string tok;
        while (std::getline(s, tok, ',')) out.push_back(std::stod(tok));
        return out;
    };
    if (parts.empty()) throw CLI::ValidationError("--model", "empty model spec");
    if (parts[0] == "bernoulli" && parts.size() == 2) {
        return DistributionModel::bernoulli(std::stod(parts[1]));
    }
    if (parts[0] == "gaussian" && parts.size() == 3) {
        return DistributionModel::gaussian(std::stod(parts[1]), std::stod(parts[2]));
    }
    if (parts[0] == "discrete" && parts.size() == 3) {
        return DistributionModel::finite_discrete(parse_list(parts[1]), parse_list(parts[2]));
    }
    throw CLI::ValidationError(
        "--model", "expected bernoulli:P, gaussian:MEAN:VAR or discrete:v1,..:p1,..");
}

int execute(const ExperimentConfig& cfg) {
    try {
        polylab::RunSummary summary = polylab::run(cfg);
        for (const auto& c : summary.checks) {
            std::printf("%s %s (lhs=%.6g rhs=%.6g slack=%.6g)\n", c.pass ? "PASS" : "FAIL",
                        c.name.c_str(), c.lhs, c.rhs, c.slack);
        }
        for (const auto& f : summary.files_written) std::printf("wrote %s\n", f.c_str());
        if (!summary.all_pass) {
            std::printf("RESULT: some checks failed\n");
            return 1;
        }
        std::printf("RESULT: all checks passed\n");
        return 0;
    } catch (const polylab::ConfigError& e) {
        std::fprintf(stderr, "config error:\n");
        for (const auto& v : e.violations()) std::fprintf(stderr, "  - %s\n", v.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

struct CommonFlags {
    std::string model_spec = "bernoulli:0.5";
    int d = 1;
    std::vector<int> n_list{32};
    std::vector<double> betas;
    double beta_min = -2.0, beta_max = 2.0, beta_step = 0.25;
    bool explicit_betas = false;
    int M = 100;
    std::uint64_t seed = polylab::kDefaultVerifySeed;
    std::string out = "polylab_out";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_betas) {
    cmd->add_option("--model", f.model_spec,
                    "weight law: bernoulli:P | gaussian:MEAN:VAR | discrete:v,..:p,..");
    cmd->add_option("--d", f.d, "lattice dimension");
    cmd->add_option("--n", f.n_list, "horizons (ascending)")->delimiter(',');
    cmd->add_option("--M", f.M, "Monte Carlo replicas");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output directory");
    if (with_betas) {
        auto* opt = cmd->add_option("--beta", f.betas, "explicit beta grid")->delimiter(',');
        cmd->add_option("--beta-min", f.beta_min, "beta grid start")->excludes(opt);
        cmd->add_option("--beta-max", f.beta_max, "beta grid end")->excludes(opt);
        cmd->add_option("--beta-step", f.beta_step, "beta grid step")->excludes(opt);
    }
}

std::vector<double> resolve_betas(const CommonFlags& f) {
    if (!f.betas.empty()) return f.betas;
    std::vector<double> out;
    for (double b = f.beta_min; b <= f.beta_max + 1e-12; b += f.beta_step) out.push_back(b);
    return out;
}

ExperimentConfig base_config(const CommonFlags& f, const std::string& kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.model = parse_model(f.model_spec);
    cfg.d = f.d;
    cfg.n_list = f.n_list;
    cfg.M = f.M;
    cfg.seed = f.seed;
    cfg.output_dir = f.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polylab: directed-polymer partition functions, rate functions and "
                 "path-count experiments"};
    app.require_subcommand(1);

    // run <config.json>
    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run an experiment described by a JSON config");
    run_cmd->add_option("config", config_path, "path to config JSON (- for stdin)")->required();

    // verify [--seed N] [--out DIR]
    std::uint64_t verify_seed = polylab::kDefaultVerifySeed;
    std::string verify_out = "verify_out";
    auto* verify_cmd = app.add_subcommand("verify", "run the exact-identity suite");
    verify_cmd->add_option("--seed", verify_seed, "suite seed");
    verify_cmd->add_option("--out", verify_out, "output directory");

    CommonFlags fe_flags;
    auto* fe_cmd = app.add_subcommand("free-energy", "Monte Carlo free-energy curve");
    add_common(fe_cmd, fe_flags, true);

    CommonFlags rate_flags;
    auto* rate_cmd = app.add_subcommand("rate", "free-energy curve and its Legendre conjugate");
    add_common(rate_cmd, rate_flags, true);

    CommonFlags cor_flags;
    double cor_rho = 0.75;
    auto* cor_cmd = app.add_subcommand("corollary", "threshold-count growth against the rate function");
    add_common(cor_cmd, cor_flags, true);
    cor_cmd->add_option("--rho", cor_rho, "threshold level");

    CommonFlags sm_flags;
    std::vector<double> sm_lambdas{0.5, 1.0, 2.0, 4.0};
    std::vector<double> sm_xis{0.6, 0.75};
    std::vector<double> sm_us;
    double sm_delta = 0.1;
    auto* sm_cmd = app.add_subcommand("smoothed", "smoothed-functional experiments");
    add_common(sm_cmd, sm_flags, false);
    sm_cmd->add_option("--lambda", sm_lambdas, "smoothing strengths")->delimiter(',');
    sm_cmd->add_option("--xi", sm_xis, "levels")->delimiter(',');
    sm_cmd->add_option("--u", sm_us, "concentration deviations")->delimiter(',');
    sm_cmd->add_option("--delta", sm_delta, "sandwich half-width");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            nlohmann::json j;
            if (config_path == "-") {
                std::cin >> j;
            } else {
                std::ifstream is(config_path);
                if (!is) {
                    std::fprintf(stderr, "cannot open config %s\n", config_path.c_str());
                    return 2;
                }
                is >> j;
            }
            return execute(ExperimentConfig::from_json(j));
        }
        if (verify_cmd->parsed()) {
            ExperimentConfig cfg;
            cfg.kind = "verify";
            cfg.seed = verify_seed;
            cfg.output_dir = verify_out;
            return execute(cfg);
        }
        if (fe_cmd->parsed()) {
            auto cfg = base_config(fe_flags, "free-energy");
            cfg.beta_grid = resolve_betas(fe_flags);
            return execute(cfg);
        }
        if (rate_cmd->parsed()) {
            auto cfg = base_config(rate_flags, "rate-function");
            cfg.beta_grid = resolve_betas(rate_flags);
            return execute(cfg);
        }
        if (cor_cmd->parsed()) {
            auto cfg = base_config(cor_flags, "corollary");
            cfg.beta_grid = resolve_betas(cor_flags);
            cfg.rho = cor_rho;
            return execute(cfg);
        }
        if (sm_cmd->parsed()) {
            auto cfg = base_config(sm_flags, "smoothed");
            cfg.lambda_grid = sm_lambdas;
            cfg.xi_list = sm_xis;
            cfg.u_grid = sm_us;
            cfg.delta = sm_delta;
            return execute(cfg);
        }
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config parse error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
