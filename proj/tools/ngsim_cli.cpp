// Command line entry point for the convention-emergence laboratory.
//
// Subcommands: simulate, bias-assay, probe-individual, tipping-scan,
// scaling-scan, meta-probe. Each reads one declarative config file and
// writes its outputs (JSONL, CSV, text summary, effective-config echo)
// into the output directory. Exit codes: 0 success, 2 usage error,
// 3 configuration error, 4 transport error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ngsim/adapter.hpp"
#include "ngsim/appconfig.hpp"
#include "ngsim/chat.hpp"
#include "ngsim/csv.hpp"
#include "ngsim/engine.hpp"
#include "ngsim/experiments.hpp"
#include "ngsim/probe.hpp"
#include "ngsim/serialize.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ngsim;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int jobs = 1;
};

AppConfig load_config(const CommonArgs& args) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + args.config_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    AppConfig app = load_app_config(buf.str());
    if (args.seed) app.population.seed = *args.seed;
    if (!args.out_dir.empty()) app.output_dir = args.out_dir;
    return app;
}

fs::path prepare_output(const AppConfig& app) {
    const fs::path dir(app.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("output: cannot create directory '" + app.output_dir + "'");
    write_file((dir / "effective_config.toml").string(), effective_config_text(app));
    return dir;
}

std::string header_line(const AppConfig& app) {
    return "config_hash: " + hash_hex(effective_hash(app)) +
           "\nseed: " + std::to_string(app.population.seed) + "\n";
}

int cmd_simulate(const CommonArgs& args) {
    const AppConfig app = load_config(args);
    const auto dir = prepare_output(app);
    Trajectory traj = run_simulation(app.population);
    traj.config_hash = effective_hash(app);
    write_file((dir / "trajectory.jsonl").string(), trajectory_to_jsonl(traj));

    std::ostringstream summary;
    summary << header_line(app);
    summary << "steps: " << traj.steps.size() << "\n";
    if (traj.consensus_step) {
        summary << "consensus_step: " << *traj.consensus_step << "\n";
        summary << "winner: " << traj.labels[static_cast<std::size_t>(*traj.winner)] << "\n";
    } else {
        summary << "consensus_step: none\n";
    }
    write_file((dir / "summary.txt").string(), summary.str());
    return 0;
}

int cmd_bias_assay(const CommonArgs& args) {
    const AppConfig app = load_config(args);
    const auto dir = prepare_output(app);
    const WinnerHistogram hist = bias_assay(app.population, app.experiment.runs, args.jobs);
    write_file((dir / "winners.csv").string(), winners_csv(hist));

    std::ostringstream summary;
    summary << header_line(app);
    summary << "runs: " << hist.runs << "\nconverged: " << hist.converged << "\n";
    for (const auto& [label, count] : hist.counts)
        summary << "winner[" << label << "]: " << count << "\n";
    if (hist.p_uniform)
        summary << "p_uniform: " << *hist.p_uniform << "\n";
    else
        summary << "p_uniform: undefined\n";
    write_file((dir / "summary.txt").string(), summary.str());
    return 0;
}

int cmd_probe_individual(const CommonArgs& args) {
    const AppConfig app = load_config(args);
    const auto dir = prepare_output(app);
    const auto& pop = app.population;
    const PolicyParams& policy = pop.policy_mix.front().params;
    const auto result =
        individual_bias_probe(policy, pop.pool_size(), app.experiment.samples, pop.seed);
    write_file((dir / "frequencies.csv").string(), frequencies_csv(result, pop.labels));

    std::ostringstream summary;
    summary << header_line(app);
    summary << "samples: " << app.experiment.samples << "\n";
    summary << "p_uniform: " << result.p_uniform << "\n";
    write_file((dir / "summary.txt").string(), summary.str());
    return 0;
}

int cmd_tipping_scan(const CommonArgs& args) {
    const AppConfig app = load_config(args);
    const auto dir = prepare_output(app);
    PopulationConfig base = app.population;
    NameId target = 1;
    if (!base.committed.empty()) {
        target = base.committed.begin()->second;
        base.committed.clear();
    }
    const TippingCurve curve =
        tipping_scan(base, target, app.experiment.p_grid, app.experiment.runs_per_point, args.jobs);
    write_file((dir / "tipping.csv").string(), tipping_csv(curve));

    std::ostringstream summary;
    summary << header_line(app);
    summary << "p_c_hat: " << curve.p_c_hat << "\n";
    summary << "ci: [" << curve.ci.lo << ", " << curve.ci.hi << "]\n";
    write_file((dir / "summary.txt").string(), summary.str());
    return 0;
}

int cmd_scaling_scan(const CommonArgs& args) {
    const AppConfig app = load_config(args);
    const auto dir = prepare_output(app);
    const ScalingResult result = convergence_scan(app.experiment.n_list, app.experiment.runs,
                                                  app.population.seed, args.jobs);
    write_file((dir / "scaling.csv").string(), scaling_csv(result));

    std::ostringstream summary;
    summary << header_line(app);
    summary << "slope: " << result.slope << "\n";
    summary << "slope_se: " << result.slope_se << "\n";
    summary << "non_converged: " << result.non_converged << "\n";
    write_file((dir / "summary.txt").string(), summary.str());
    return 0;
}

int cmd_meta_probe(const CommonArgs& args) {
    const AppConfig app = load_config(args);
    const auto dir = prepare_output(app);
    const auto& pop = app.population;

    PromptTemplate tmpl;
    tmpl.s_success = pop.s_success;
    tmpl.s_failure = pop.s_failure;
    tmpl.shuffle_seed = pop.seed;
    AgentState fresh;
    const NamePool pool(pop.labels);
    const std::string game_prompt = render_prompt(fresh, pool, tmpl);

    std::string jsonl;
    std::ostringstream summary;
    summary << header_line(app);

    bool any_complete = false;
    auto run_one = [&](ChatEndpoint& endpoint, const std::string& model_id,
                       const std::vector<std::string>& questions) {
        const auto transcript = meta_probe(endpoint, game_prompt, questions,
                                           app.probe.repetitions, model_id,
                                           app.probe.temperature);
        for (const auto& r : transcript.responses) any_complete |= r.complete;
        jsonl += transcript_to_jsonl(transcript);
        int single = 0, population = 0, unclear = 0;
        for (const auto& r : transcript.responses) {
            if (r.stance == Stance::Single) ++single;
            else if (r.stance == Stance::Population) ++population;
            else ++unclear;
        }
        summary << model_id << ": single=" << single << " population=" << population
                << " unclear=" << unclear << (transcript.incomplete ? " (incomplete)" : "")
                << "\n";
    };

    if (app.probe.mode == "mock-canned") {
        for (const auto& canned : canned_population_replies()) {
            MockEndpoint endpoint([reply = canned.reply](const ChatRequest&) { return reply; });
            run_one(endpoint, canned.model_id, {population_question()});
        }
    } else {
        auto questions = recognition_questions();
        questions.push_back(population_question());
        if (app.probe.mode == "mock-echo") {
            MockEndpoint endpoint(
                [reply = app.probe.echo_reply](const ChatRequest&) { return reply; });
            run_one(endpoint, app.probe.model, questions);
        } else {
            ClientConfig client;
            client.base_url = app.probe.url;
            client.model = app.probe.model;
            client.temperature = app.probe.temperature;
            client.max_attempts = app.probe.max_attempts;
            client.backoff_ms = app.probe.backoff_ms;
            client.max_in_flight = app.probe.max_in_flight;
            HttpChatEndpoint endpoint(client);
            run_one(endpoint, app.probe.model, questions);
        }
    }

    write_file((dir / "transcript.jsonl").string(), jsonl);
    write_file((dir / "summary.txt").string(), summary.str());
    if (!any_complete)
        throw TransportError("transport: no probe response completed; see transcript.jsonl");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Naming-game convention emergence laboratory"};
    cli.require_subcommand(1);

    CommonArgs args;
    std::uint64_t seed_flag = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "Experiment config file")->required();
        auto* seed_opt = sub->add_option("--seed", seed_flag, "Override the master seed");
        sub->add_option("--out", args.out_dir, "Override the output directory");
        sub->add_option("--jobs", args.jobs, "Parallel runs")->check(CLI::PositiveNumber);
        sub->callback([&args, &seed_flag, seed_opt] {
            if (seed_opt->count()) args.seed = seed_flag;
        });
        return sub;
    };

    auto* simulate = add_common(cli.add_subcommand("simulate", "Run one seeded simulation"));
    auto* bias = add_common(cli.add_subcommand("bias-assay", "Winner histogram over many runs"));
    auto* probe_ind = add_common(
        cli.add_subcommand("probe-individual", "First-choice uniformity of a fresh agent"));
    auto* tipping = add_common(
        cli.add_subcommand("tipping-scan", "Committed-minority takeover curve"));
    auto* scaling = add_common(
        cli.add_subcommand("scaling-scan", "Consensus-time scaling of the minimal naming game"));
    auto* meta = add_common(cli.add_subcommand("meta-probe", "Meta-prompting stance probe"));

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return cli.exit(e);  // --help
        cli.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (bias->parsed()) return cmd_bias_assay(args);
        if (probe_ind->parsed()) return cmd_probe_individual(args);
        if (tipping->parsed()) return cmd_tipping_scan(args);
        if (scaling->parsed()) return cmd_scaling_scan(args);
        if (meta->parsed()) return cmd_meta_probe(args);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const TemplateError& e) {
        std::cerr << "template error: " << e.what() << "\n";
        return 3;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 4;
    } catch (const ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
