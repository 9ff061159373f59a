#include "harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

namespace h = omv::harness;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

void add_common(CLI::App* cmd, h::Config& c) {
    cmd->add_option("--n", c.n, "matrix side / corpus size / variables");
    cmd->add_option("--m", c.m, "corpus string length");
    cmd->add_option("--k", c.k, "alphabet size");
    cmd->add_option("--q", c.q, "number of queries");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--density", c.density, "matrix / graph density")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--engine", c.engine, "engine name");
    cmd->add_option("--delta", c.delta, "budget exponent constant");
    cmd->add_option("--epsilon", c.epsilon, "listing group exponent");
    cmd->add_option("--c", c.c, "sparsity bound constant");
    cmd->add_option("--word-size", c.word_size, "cell-probe word size in bits");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--mix", c.mix, "query mix: uniform|repeated|basis|dense|varied|mixed");
}

void emit(const h::Config& c, const std::string& file, const std::string& body) {
    if (c.out.empty()) {
        std::cout << body;
        return;
    }
    fs::create_directories(c.out);
    const auto path = fs::path(c.out) / file;
    std::ofstream out(path, std::ios::binary);
    if (!(out << body)) throw omv::InputError("cannot write " + path.string());
    std::cerr << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online Boolean matrix-vector multiplication toolkit"};
    app.require_subcommand(1);

    h::Config gen_cfg, verify_cfg, bench_cfg, sweep_cfg;

    auto* gen = app.add_subcommand("gen", "write deterministic fixture files");
    add_common(gen, gen_cfg);
    gen->add_option("--kind", gen_cfg.kind, "all|matrix|vectors|pairs|graph|corpus|patterns|cnf|assignments");
    gen->add_option("--clauses", gen_cfg.clauses, "2-CNF clause count");

    auto* verify = app.add_subcommand("verify", "run an engine against its oracle");
    add_common(verify, verify_cfg);
    verify->add_option("--from", verify_cfg.from, "read fixtures written by gen from this directory");
    verify->add_option("--clauses", verify_cfg.clauses, "2-CNF clause count");

    auto* bench = app.add_subcommand("bench", "time naive, word-parallel and omv engines");
    add_common(bench, bench_cfg);
    bench->add_option("--reps", bench_cfg.reps, "repetitions per engine (median reported)");
    bench->add_option("--from", bench_cfg.from, "read matrix.txt and vectors.txt from this directory");

    auto* sweep = app.add_subcommand("cellprobe-sweep", "probe counts of the cell-probe structure");
    add_common(sweep, sweep_cfg);
    sweep->add_option("--n-min", sweep_cfg.n_min, "smallest n in the sweep");
    sweep->add_option("--matrices", sweep_cfg.matrices, "random matrices per (n, w)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            for (const auto& p : h::run_gen(gen_cfg)) std::cout << p << '\n';
            return kOk;
        }
        if (*verify) {
            const auto report = h::run_verify(verify_cfg);
            emit(verify_cfg, "verify_" + report.engine + ".json", report.to_json().dump(2) + "\n");
            if (!report.ok()) {
                std::cerr << "verify: " << report.mismatches << " mismatches, " << report.audit_failures.size()
                          << " audit failures\n";
                return kFailed;
            }
            return kOk;
        }
        if (*bench) {
            const auto report = h::run_bench(bench_cfg);
            emit(bench_cfg, "bench.csv", report.csv());
            emit(bench_cfg, "bench_batches.csv", report.batch_csv());
            return report.mismatches() ? kFailed : kOk;
        }
        if (*sweep) {
            const auto report = h::run_cellprobe_sweep(sweep_cfg);
            emit(sweep_cfg, "cellprobe_sweep.csv", report.csv());
            return report.failures() ? kFailed : kOk;
        }
    } catch (const omv::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kFailed;
    } catch (const h::UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {  // ConfigError, ScaleError
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const omv::InputError& e) {
        std::cerr << "input: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}
