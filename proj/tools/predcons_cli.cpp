// predcons: experiment driver for accelerated consensus.
//
//   predcons mse --topology rgg --n 200 --trials 30 --out results
//   predcons gain --topology chain --n 25 --n 50 --n 100 --n 200
//   predcons verify --topology grid --n 64 --n 256 --theta ls
//   predcons doi --n 200 --doi-k 400 --doi-l 10
//   predcons dump-graph --topology rgg --n 50 --out dumps
//
// Every verb prints its JSON summary on stdout and writes it to
// <out>/summary_<verb>.json. A TOML/INI file given with --config may set any
// flag; flags on the command line win.

#include "report_json.hpp"

#include "predcons/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace predcons;

namespace {

struct Options {
    std::string verb;
    std::string topology = "rgg";
    std::vector<std::size_t> sizes;
    std::size_t trials = 30;
    std::string init = "slope";
    double eps_db = -100.0;
    std::string theta = "asym:0.5";
    std::string lambda2 = "doi";
    std::optional<std::size_t> doi_k;
    std::optional<std::size_t> doi_l;
    std::optional<Seed> doi_seed;
    Seed seed = 1;
    std::string out = "out";
    bool dump_graph = false;
};

ExperimentConfig to_config(const Options& o)
{
    ExperimentConfig cfg;
    cfg.topology = parse_topology(o.topology);
    if (!o.sizes.empty()) cfg.sizes = o.sizes;
    cfg.trials = o.trials;
    cfg.init = parse_init(o.init);
    cfg.epsilon_db = o.eps_db;
    cfg.theta = parse_theta(o.theta);
    cfg.lambda2 = parse_lambda2(o.lambda2);
    if (o.doi_k) cfg.lambda2.iterations = *o.doi_k;
    if (o.doi_l) cfg.lambda2.period = *o.doi_l;
    if (o.doi_k && o.doi_l && *o.doi_l > *o.doi_k) throw Error(ErrorCode::config, "DOI needs K >= L");
    cfg.lambda2.seed = o.doi_seed;
    cfg.seed = o.seed;
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os) throw Error(ErrorCode::config, "cannot write " + p.string());
    os.precision(17);
    return os;
}

/// Edge list, W, spectrum of W and of Phi3 at alpha* for trial 0 of each size.
report::Json dump_graphs(const ExperimentConfig& cfg, const fs::path& dir)
{
    fs::create_directories(dir);
    const PredictorParams theta = cfg.theta.params();
    report::Json files = report::Json::array();
    for (std::size_t n : cfg.sizes) {
        const TrialSetup setup = make_trial(cfg, n, 0);
        const std::string stem = to_string(cfg.topology) + "_" + std::to_string(n);
        const auto op = AcceleratedOperator::with_optimal_alpha(setup.w, theta);

        auto edges = open_out(dir / (stem + "_graph.txt"));
        write_edge_list(edges, setup.w.graph());
        auto w = open_out(dir / (stem + "_W.csv"));
        write_matrix_csv(w, setup.w);
        auto ws = open_out(dir / (stem + "_spectrum.csv"));
        write_spectrum_csv(ws, setup.spectrum);
        auto ps = open_out(dir / (stem + "_phi_spectrum.csv"));
        write_spectrum_csv(ps, op.spectrum());

        files.push_back({{"n", n},
                         {"lazy", setup.lazy},
                         {"diameter", diameter(setup.w.graph())},
                         {"lambda2", setup.spectrum.lambda2()},
                         {"alpha", op.alpha()},
                         {"rho_w", rho_deviation(setup.spectrum)},
                         {"rho_phi", op.deviation_radius()},
                         {"stem", stem}});
    }
    return files;
}

report::Json run_verb(const Options& o, const ExperimentConfig& cfg, const fs::path& out)
{
    report::Json j;
    if (o.verb == "mse") {
        const MseResult r = run_mse_experiment(cfg);
        write_mse_traces(cfg, r, out / "traces");
        j = report::mse_json(cfg, r);
    } else if (o.verb == "gain") {
        j = report::gain_json(cfg, run_gain_sweep(cfg));
    } else if (o.verb == "verify") {
        j = report::verify_json(cfg, verify_theory(cfg));
    } else if (o.verb == "doi") {
        j = report::doi_json(cfg, run_doi_experiment(cfg));
    } else {
        j = report::envelope("dump-graph", cfg);
    }
    if (o.verb == "dump-graph" || o.dump_graph) j["graphs"] = dump_graphs(cfg, out / "graphs");
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Memory-accelerated consensus experiments"};
    Options o;
    app.set_config("--config", "", "TOML/INI file mirroring the flags");
    app.add_option("verb", o.verb, "mse | gain | verify | doi | dump-graph")
        ->required()
        ->check(CLI::IsMember({"mse", "gain", "verify", "doi", "dump-graph"}));
    app.add_option("--topology", o.topology, "chain | grid | rgg")->capture_default_str();
    app.add_option("--n", o.sizes, "network size, repeatable (default 200)");
    app.add_option("--trials", o.trials, "trials per size")->capture_default_str();
    app.add_option("--init", o.init, "slope | spike")->capture_default_str();
    app.add_option("--eps-db", o.eps_db, "target MSE in dB")->capture_default_str();
    app.add_option("--theta", o.theta, "ls | asym:<eps>")->capture_default_str();
    app.add_option("--lambda2", o.lambda2, "oracle | doi | doi:<K>,<L>")->capture_default_str();
    app.add_option("--doi-k", o.doi_k, "DOI iterations K (overrides --lambda2)");
    app.add_option("--doi-l", o.doi_l, "DOI normalisation period L (overrides --lambda2)");
    app.add_option("--doi-seed", o.doi_seed, "DOI initial-vector seed");
    app.add_option("--seed", o.seed, "base seed")->capture_default_str();
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_flag("--dump-graph", o.dump_graph, "also dump graph, W and spectra");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = to_config(o);
        const fs::path out(o.out);
        fs::create_directories(out);
        const report::Json j = run_verb(o, cfg, out);
        const std::string text = j.dump(2) + "\n";
        auto os = open_out(out / ("summary_" + o.verb + ".json"));
        os << text;
        std::cout << text;
    } catch (const Error& e) {
        std::cerr << "predcons: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "predcons: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
