// Command-line front end: single runs, experiment presets, oracle checks and
// ad-hoc tree inspection.

#include "hvlgp/engine.hpp"
#include "hvlgp/harness.hpp"
#include "hvlgp/initializers.hpp"
#include "hvlgp/oracles.hpp"
#include "hvlgp/problems.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace hvlgp;

namespace {

struct RunOptions {
    std::string config_file;
    std::string problem = "majority";
    std::string acceptance = "nonstrict";
    std::string ops = "single";
    std::string init = "unity";
    std::uint32_t n = 10;
    std::uint64_t seed = 1;
    std::uint64_t budget = 0;
    bool stuck_detection = false;
    bool trace = false;
};

int cmd_run(const RunOptions& o)
{
    ExperimentConfig ec;
    ec.base.problem = {parse_problem_kind(o.problem), o.n};
    ec.base.acceptance = parse_acceptance(o.acceptance);
    ec.base.ops = parse_op_count(o.ops);
    ec.base.initializer = o.init;
    ec.base.budget = o.budget;
    ec.base.stuck_detection = o.stuck_detection;
    ec.master_seed = o.seed;
    ec.n_values = {o.n};
    if (!o.config_file.empty()) {
        std::ifstream is(o.config_file);
        if (!is) {
            throw std::runtime_error("cannot open " + o.config_file);
        }
        apply_config_stream(ec, is);
    }
    RunConfig rc = ec.base;
    rc.problem.n = ec.n_values.front();
    rc.seed = ec.master_seed;
    rc.trace = o.trace ? TraceLevel::Full : TraceLevel::None;

    const auto r = run(rc);
    if (o.trace) {
        std::cout << "# evaluation\tops\tfitness_before\tfitness_after\taccepted\n";
        for (const auto& e : r.trace) {
            std::cout << to_string(e) << '\n';
        }
    }
    std::cout << "status=" << to_string(r.status) << '\n'
              << "evaluations=" << r.evaluations << '\n'
              << "accepted=" << r.accepted << '\n'
              << "initial_fitness=" << r.initial_fitness << '\n'
              << "final_fitness=" << r.final_fitness << '\n'
              << "initial_nodes=" << r.initial_nodes << '\n'
              << "t_max_nodes=" << r.t_max_nodes << '\n'
              << "final_nodes=" << r.final_nodes << '\n'
              << "proposed_ops=sub:" << r.proposed_ops[0] << ",ins:" << r.proposed_ops[1]
              << ",del:" << r.proposed_ops[2] << '\n'
              << "final_tree=" << r.final_tree << '\n';
    return 0;
}

struct ExperimentOptions {
    std::string target;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    std::uint32_t trials = 0;
};

int cmd_experiment(const ExperimentOptions& o)
{
    ExperimentConfig config;
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), o.target) != names.end()) {
        config = preset(o.target);
    } else {
        std::ifstream is(o.target);
        if (!is) {
            throw ConfigError("'" + o.target + "' is neither a preset nor a readable config file");
        }
        config = parse_experiment_config(is);
    }
    if (o.seed_set) {
        config.master_seed = o.seed;
    }
    if (o.threads != 0) {
        config.parallelism = o.threads;
    }
    if (o.trials != 0) {
        config.trials_per_n = o.trials;
    }

    fs::path out = o.out_dir;
    if (out.empty()) {
        const char* env = std::getenv("HVLGP_OUTPUT_DIR");
        out = env != nullptr ? fs::path(env) : fs::current_path();
    }
    fs::create_directories(out);

    const auto result = run_experiment(config);
    const auto csv_path = out / (config.name + ".csv");
    const auto summary_path = out / (config.name + "_summary.csv");
    const auto plot_path = out / (config.name + ".dat");
    {
        std::ofstream os(csv_path);
        write_csv(os, result.rows);
        if (!os) {
            throw std::runtime_error("write to " + csv_path.string() + " failed");
        }
    }
    {
        std::ofstream os(summary_path);
        write_summary(os, result.summary);
    }
    emit_plot_data(result.summary, plot_path);

    write_summary(std::cout, result.summary);
    try {
        const auto fit = fit_scaling_exponent(result.summary);
        std::cout << "scaling_exponent=" << fit.exponent << " intercept=" << fit.intercept
                  << " residual=" << fit.residual_norm << " points=" << fit.points << '\n';
    } catch (const std::invalid_argument& e) {
        std::cout << "scaling_exponent=n/a (" << e.what() << ")\n";
    }
    std::cout << "csv=" << csv_path.string() << '\n';
    return 0;
}

struct OracleOptions {
    std::string check;
    std::string instance;
    std::uint32_t n = 1;
};

void report(std::ostream& os, std::string_view check, std::string_view instance, bool pass, std::string_view details)
{
    os << check << '\t' << instance << '\t' << (pass ? "pass" : "fail") << '\t' << details << '\n';
}

int cmd_oracle(const OracleOptions& o)
{
    bool all_pass = true;
    auto emit = [&](std::string_view check, std::string_view instance, bool pass, std::string_view details) {
        report(std::cout, check, instance, pass, details);
        all_pass = all_pass && pass;
    };
    const bool all = o.check == "all";
    const bool have_instance = !o.instance.empty();
    bool known = all;

    if (all || o.check == "operator-mass") {
        known = true;
        const std::string text = have_instance ? o.instance : "(J ~x1 x1)";
        const std::uint32_t n = have_instance ? o.n : 1;
        const auto d = enumerate_single_mutations(parse_tree(text, n), ProblemKind::Order, n);
        const auto mass = d.improving_mass();
        const bool pass = d.total() == 1 && (have_instance || mass == Rational(11, 36));
        emit("operator-mass", text, pass,
             "order_improving_mass=" + mass.str() + " total=" + d.total().str());
    }
    if (all || o.check == "lemma1") {
        known = true;
        if (have_instance) {
            const auto r = check_lemma1(parse_tree(o.instance, o.n), o.n);
            emit("lemma1", o.instance, r.pass, r.describe());
        } else {
            const auto r = sweep_lemma1(200, 6, 0x1e77a1);
            emit("lemma1", "random:200,n<=6", r.pass(),
                 "instances=" + std::to_string(r.instances) + " failures=" + std::to_string(r.failures) + " "
                     + r.first_failure);
        }
    }
    if (all || o.check == "sdp") {
        known = true;
        if (have_instance) {
            const auto tree = parse_tree(o.instance, o.n);
            emit("sdp", o.instance, check_sdp(tree, o.n), "problem=majority");
        } else {
            const auto r = sweep_sdp(6, 3);
            emit("sdp", "exhaustive:T<=6,n<=3", r.pass(),
                 "instances=" + std::to_string(r.instances) + " failures=" + std::to_string(r.failures) + " "
                     + r.first_failure);
        }
    }
    if (all || o.check == "stuck") {
        known = true;
        if (have_instance) {
            const auto c = crosscheck_stuck(parse_tree(o.instance, o.n), o.n);
            emit("stuck", o.instance, c.agree(),
                 std::string("predicted=") + (c.predicted ? "1" : "0") + " enumerated=" + (c.enumerated ? "1" : "0"));
        } else {
            const auto r = sweep_stuck(8, 3);
            emit("stuck", "exhaustive:T<=8,n<=3", r.pass(),
                 "instances=" + std::to_string(r.instances) + " failures=" + std::to_string(r.failures) + " "
                     + r.first_failure);
        }
    }
    if (!known) {
        throw ConfigError("unknown oracle check '" + o.check + "' (operator-mass, lemma1, sdp, stuck, all)");
    }
    return all_pass ? 0 : 1;
}

struct TreeOptions {
    std::string action;
    std::string text;
    std::uint32_t n = 1;
    std::uint64_t seed = 1;
    std::uint32_t steps = 1;
};

int cmd_tree(const TreeOptions& o)
{
    auto tree = parse_tree(o.text, o.n);
    if (o.action == "parse") {
        std::cout << "canonical=" << tree.serialize() << '\n'
                  << "leaves=" << tree.leaf_count() << '\n'
                  << "nodes=" << tree.node_count() << '\n';
        std::cout << "inorder=";
        for (const auto t : tree.inorder_leaves()) {
            std::cout << to_string(t) << ' ';
        }
        std::cout << '\n';
    } else if (o.action == "mutate") {
        Rng rng(o.seed);
        for (std::uint32_t i = 0; i < o.steps; ++i) {
            const auto r = hvl_prime_step(tree, rng, o.n);
            std::cout << to_string(r) << '\t' << tree.serialize() << '\n';
        }
    } else if (o.action == "eval") {
        const auto leaves = tree.inorder_leaves();
        const auto ord = order_fitness(leaves, o.n);
        const auto maj = majority_fitness(leaves, o.n);
        std::cout << "order_fitness=" << ord.fitness << "\norder_path=";
        for (std::size_t i = 0; i < ord.path.size(); ++i) {
            std::cout << (i == 0 ? "" : " ") << to_string(ord.path[i]);
        }
        std::cout << "\nmajority_fitness=" << maj.fitness << "\nmajority_statements=";
        for (std::size_t i = 0; i < maj.statements.size(); ++i) {
            std::cout << (i == 0 ? "" : " ") << to_string(maj.statements[i]);
        }
        std::cout << "\ndeficits=";
        for (std::uint32_t i = 1; i <= o.n; ++i) {
            std::cout << maj.profile.deficit(i) << (i < o.n ? "," : "");
        }
        std::cout << "\nmax_deficit=" << maj.profile.max_deficit()
                  << "\nstuck_gpstar_single=" << (is_stuck_gpstar_single_majority(maj.profile) ? 1 : 0) << '\n';
    } else {
        throw ConfigError("unknown tree action '" + o.action + "' (parse, mutate, eval)");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hvlgp: (1+1) GP hill climbers with HVL-Mutate' on ORDER and MAJORITY"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Execute one run and print its result");
    run_cmd->add_option("--config", run_opts.config_file, "key = value config file (applied after flags)");
    run_cmd->add_option("--problem", run_opts.problem, "order | majority")->capture_default_str();
    run_cmd->add_option("--acceptance", run_opts.acceptance, "nonstrict | strict")->capture_default_str();
    run_cmd->add_option("--ops", run_opts.ops, "single | multi")->capture_default_str();
    run_cmd->add_option("--init", run_opts.init, "unity | adversarial-neg1 | t-lopt | text:<tree>")
        ->capture_default_str();
    run_cmd->add_option("-n,--n", run_opts.n, "number of variables")->capture_default_str();
    run_cmd->add_option("--seed", run_opts.seed, "64-bit seed")->capture_default_str();
    run_cmd->add_option("--budget", run_opts.budget, "max evaluations, 0 = unlimited")->capture_default_str();
    run_cmd->add_flag("--stuck-detection", run_opts.stuck_detection, "exact stuck detection (strict single MAJORITY)");
    run_cmd->add_flag("--trace", run_opts.trace, "print one line per proposal");

    ExperimentOptions exp_opts;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a preset or config-file experiment");
    exp_cmd->add_option("target", exp_opts.target, "preset (fig2, fig3, order-scaling, tlopt-multi) or config file")
        ->required();
    exp_cmd->add_option("--out", exp_opts.out_dir, "output directory (default $HVLGP_OUTPUT_DIR or cwd)");
    exp_cmd->add_option("--seed", exp_opts.seed, "override master seed")
        ->each([&](const std::string&) { exp_opts.seed_set = true; });
    exp_cmd->add_option("--threads", exp_opts.threads, "worker threads");
    exp_cmd->add_option("--trials", exp_opts.trials, "override trials per n");

    OracleOptions oracle_opts;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exact oracle checks; exit code 1 on any failure");
    oracle_cmd->add_option("check", oracle_opts.check, "operator-mass | lemma1 | sdp | stuck | all")->required();
    oracle_cmd->add_option("instance", oracle_opts.instance, "tree text; omit to run the default sweep");
    oracle_cmd->add_option("-n,--n", oracle_opts.n, "number of variables for the instance");

    TreeOptions tree_opts;
    auto* tree_cmd = app.add_subcommand("tree", "Inspect a tree");
    tree_cmd->add_option("action", tree_opts.action, "parse | mutate | eval")->required();
    tree_cmd->add_option("text", tree_opts.text, "serialized tree")->required();
    tree_cmd->add_option("-n,--n", tree_opts.n, "number of variables")->capture_default_str();
    tree_cmd->add_option("--seed", tree_opts.seed, "seed for mutate")->capture_default_str();
    tree_cmd->add_option("--steps", tree_opts.steps, "mutation steps")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            return cmd_run(run_opts);
        }
        if (*exp_cmd) {
            return cmd_experiment(exp_opts);
        }
        if (*oracle_cmd) {
            return cmd_oracle(oracle_opts);
        }
        if (*tree_cmd) {
            return cmd_tree(tree_opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
