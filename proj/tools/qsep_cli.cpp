#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qsep/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitFuzzFailure = 4;

struct GenStateArgs {
    std::string family;
    std::string params;
    std::uint64_t seed = 0;
    std::string output;
};

struct AnalyzeArgs {
    std::string state_path;
    std::string criteria = "all";
    std::string ops = "auto";
    std::string output;
    double tol = qsep::kDefaultTolerance;
    int restarts = 16;
    std::uint64_t seed = 0;
};

struct SweepArgs {
    std::string family;
    std::string grid;
    std::string method;
    std::string output;
    std::uint64_t seed = 0;
    double tol = qsep::kDefaultTolerance;
    int restarts = 32;
};

struct SoundnessArgs {
    std::string spec;
    std::string shape = "2x2";
    int samples = 1000;
    std::uint64_t seed = 0;
    int ops_per_state = 20;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) out.push_back(piece);
    return out;
}

int run_gen_state(const GenStateArgs& args) {
    qsep::StateFile state = qsep::gen_state(args.family, qsep::parse_params(args.params), args.seed);
    qsep::save_state(args.output, state);
    return kExitOk;
}

int run_analyze(const AnalyzeArgs& args) {
    qsep::StateFile state = qsep::load_state(args.state_path);
    qsep::OpsSource source = qsep::OpsSource::Auto;
    std::optional<qsep::LocalOperatorSet> file_ops;
    if (args.ops != "auto") {
        source = qsep::OpsSource::File;
        file_ops = qsep::load_ops(args.ops);
    }
    qsep::BatteryReport report = qsep::analyze(state, split_list(args.criteria), source, file_ops,
                                               args.tol, args.restarts, args.seed);
    std::string text = qsep::report_to_json(report);
    if (args.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(args.output, std::ios::binary);
        if (!f) throw qsep::usage_error("cannot open for writing: " + args.output);
        f << text;
    }
    return kExitOk;
}

int run_sweep(const SweepArgs& args) {
    auto pieces = split_list(args.grid);
    std::vector<std::string> parts;
    {
        std::stringstream ss(args.grid);
        std::string piece;
        while (std::getline(ss, piece, ':')) parts.push_back(piece);
    }
    if (parts.size() != 3) throw qsep::usage_error("grid must look like start:stop:step");
    qsep::SweepRequest request;
    request.family = args.family;
    try {
        request.start = std::stod(parts[0]);
        request.stop = std::stod(parts[1]);
        request.step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw qsep::usage_error("grid must look like start:stop:step");
    }
    request.method = args.method;
    request.seed = args.seed;
    request.tol = args.tol;
    request.restarts = args.restarts;

    std::vector<qsep::SweepRow> rows = qsep::sweep(request);
    std::ofstream f(args.output, std::ios::binary);
    if (!f) throw qsep::usage_error("cannot open for writing: " + args.output);
    f << qsep::sweep_to_csv(rows);
    return kExitOk;
}

int run_soundness(const SoundnessArgs& args) {
    qsep::CriterionSpec spec = qsep::load_spec(args.spec);
    qsep::SubsystemShape shape = qsep::parse_shape(args.shape);
    qsep::SoundnessOutcome outcome =
        qsep::soundness_fuzz(spec, shape, args.samples, args.seed, args.ops_per_state);
    if (!outcome.ran) {
        std::cerr << "refusing to fuzz an unsound spec; exponent ledger:\n"
                  << outcome.spec_report.str();
        return kExitInvariant;
    }
    std::cout << "spec: sound\nsamples: " << outcome.samples
              << "\nmax margin: " << qsep::format_double(outcome.max_margin) << "\nresult: "
              << (outcome.passed ? "ok" : "SOUNDNESS VIOLATED") << "\n";
    return outcome.passed ? kExitOk : kExitFuzzFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Separability analysis toolkit: entanglement criteria, witness search, sweeps"};
    app.require_subcommand(1);

    GenStateArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-state", "Generate a density-matrix JSON file");
    gen->add_option("--family", gen_args.family, "State family")->required();
    gen->add_option("--params", gen_args.params, "Comma-separated k=v parameters");
    gen->add_option("--seed", gen_args.seed, "Random seed");
    gen->add_option("-o,--output", gen_args.output, "Output path")->required();

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Run a battery of criteria on a state file");
    analyze->add_option("--state", analyze_args.state_path, "State JSON file")->required();
    analyze->add_option("--criteria", analyze_args.criteria, "Comma list of criteria, or 'all'");
    analyze->add_option("--ops", analyze_args.ops, "'auto' or an operator JSON file");
    analyze->add_option("-o,--output", analyze_args.output, "Report path (stdout if omitted)");
    analyze->add_option("--tol", analyze_args.tol, "Detection tolerance");
    analyze->add_option("--restarts", analyze_args.restarts, "Optimizer restarts for auto ops");
    analyze->add_option("--seed", analyze_args.seed, "Seed for auto-op optimization");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Sweep a state family over a parameter grid");
    sweep->add_option("--family", sweep_args.family, "rho-alpha | rho-abc | werner | white-noise")
        ->required();
    sweep->add_option("--grid", sweep_args.grid, "start:stop:step (inclusive)")->required();
    sweep->add_option("--method", sweep_args.method, "optimize-E, a witness, or a criterion name")
        ->required();
    sweep->add_option("-o,--output", sweep_args.output, "CSV output path")->required();
    sweep->add_option("--seed", sweep_args.seed, "Random seed");
    sweep->add_option("--tol", sweep_args.tol, "Detection tolerance");
    sweep->add_option("--restarts", sweep_args.restarts, "Optimizer restarts");

    SoundnessArgs soundness_args;
    CLI::App* soundness =
        app.add_subcommand("soundness", "Fuzz a criterion spec against random separable states");
    soundness->add_option("--spec", soundness_args.spec, "Builtin spec name or a spec JSON file")
        ->required();
    soundness->add_option("--shape", soundness_args.shape, "Party shape, e.g. 2x2x2");
    soundness->add_option("--samples", soundness_args.samples, "Number of separable states");
    soundness->add_option("--seed", soundness_args.seed, "Random seed");
    soundness->add_option("--ops-per-state", soundness_args.ops_per_state,
                          "Random operator sets per state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return run_gen_state(gen_args);
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (soundness->parsed()) return run_soundness(soundness_args);
    } catch (const qsep::usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const qsep::invariant_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
