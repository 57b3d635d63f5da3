// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hvlgp/engine.hpp"
#include "hvlgp/harness.hpp"
#include "hvlgp/initializers.hpp"
#include "hvlgp/oracles.hpp"
#include "hvlgp/problems.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace hvlgp;

namespace {

struct Outcome {
    bool pass = false;
    std::string details;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body)
{
    const auto start = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = seconds < limit_seconds;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s AC%-2d %s: %s [%.3fs, limit %gs%s]\n", pass ? "PASS" : "FAIL", id, title, out.details.c_str(),
                seconds, limit_seconds, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
}

Terminal x(std::uint32_t i) { return {i, Sign::Positive}; }
Terminal nx(std::uint32_t i) { return {i, Sign::Negated}; }

std::string join(const std::vector<Terminal>& v)
{
    std::string s;
    for (auto t : v) {
        s += (s.empty() ? "" : " ") + to_string(t);
    }
    return s;
}

Outcome worked_examples()
{
    const std::vector<Terminal> order_leaves{x(1), nx(4), x(2), nx(1), x(3), nx(6)};
    const std::vector<Terminal> majority_leaves{x(1), nx(4), x(2), nx(1), nx(3), nx(6), x(1), x(4)};
    const auto start = Clock::now();
    const auto o = order_fitness(order_leaves, 6);
    const auto m = majority_fitness(majority_leaves, 6);
    const double us = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
    const std::vector<Terminal> path{x(1), nx(4), x(2), x(3), nx(6)};
    const std::vector<Terminal> statements{x(1), x(2), x(4)};
    const bool pass = o.fitness == 3 && o.path == path && m.fitness == 3 && m.statements == statements && us < 1000;
    std::ostringstream d;
    d << "order f=" << o.fitness << " P=(" << join(o.path) << "), majority f=" << m.fitness << " S={"
      << join(m.statements) << "}, eval " << us << "us";
    return {pass, d.str()};
}

Outcome operator_distribution()
{
    const auto tree = parse_tree("(J ~x1 x1)", 1);
    const auto mass = enumerate_single_mutations(tree, ProblemKind::Order, 1).improving_mass();
    const std::uint64_t draws = 1000000;
    Rng rng(0xac2);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        auto c = tree;
        hvl_prime_step(c, rng, 1);
        hits += evaluate({ProblemKind::Order, 1}, c) > 0 ? 1 : 0;
    }
    const double p = 11.0 / 36.0;
    const double mean = p * static_cast<double>(draws);
    const double sigma = std::sqrt(static_cast<double>(draws) * p * (1 - p));
    const double z = (static_cast<double>(hits) - mean) / sigma;
    std::ostringstream d;
    d << "exact mass " << mass << ", engine " << hits << "/" << draws << " (z=" << z << ")";
    return {mass == Rational(11, 36) && std::abs(z) <= 3.0, d.str()};
}

Outcome sweep_outcome(const SweepReport& r)
{
    std::ostringstream d;
    d << r.instances << " instances, " << r.failures << " failures";
    if (!r.first_failure.empty()) {
        d << ", first: " << r.first_failure;
    }
    return {r.pass(), d.str()};
}

Outcome local_optimum()
{
    bool single_ok = true;
    std::ostringstream d;
    for (std::uint32_t n = 2; n <= 12; ++n) {
        RunConfig c;
        c.problem = {ProblemKind::Majority, n};
        c.acceptance = AcceptancePolicy::Strict;
        c.initializer = "t-lopt";
        c.stuck_detection = true;
        c.seed = n;
        const auto a = run(c);
        c.seed = n + 1000;
        const auto b = run(c);
        const bool ok = a.status == RunStatus::Stuck && a.final_fitness == static_cast<int>(n - 1) &&
                        b.status == RunStatus::Stuck && b.final_fitness == a.final_fitness;
        if (!ok) {
            single_ok = false;
            d << "n=" << n << " single-step run not stuck at n-1; ";
        }
    }
    const auto multi = run_experiment(preset("tlopt-multi"));
    const auto& s = multi.summary.front();
    const auto exhausted = static_cast<std::size_t>(std::lround(s.budget_fraction * static_cast<double>(s.trials)));
    d << "single-step stuck at n-1 for n=2..12: " << (single_ok ? "yes" : "no") << "; multi-step budget exhausted "
      << exhausted << "/" << s.trials;
    return {single_ok && s.trials == 100 && exhausted >= 99, d.str()};
}

Outcome stagnation()
{
    auto c = preset("fig3");
    c.n_values = {10, 20, 50};
    const auto s = run_experiment(c).summary;
    bool pass = s.size() == 3;
    std::ostringstream d;
    for (const auto& row : s) {
        pass = pass && row.trials == 100 && row.stuck_fraction >= 0.05;
        d << "n=" << row.n << " stuck=" << row.stuck_fraction << " ";
    }
    return {pass, d.str()};
}

Outcome majority_scaling()
{
    const auto s = run_experiment(preset("fig2")).summary;
    bool all_optimal = s.size() == 5;
    bool monotone = true;
    std::ostringstream d;
    for (std::size_t i = 0; i < s.size(); ++i) {
        all_optimal = all_optimal && s[i].trials == 50 && s[i].optimal == s[i].trials;
        if (i > 0 && s[i].mean_evaluations <= s[i - 1].mean_evaluations) {
            monotone = false;
        }
        d << "n=" << s[i].n << " mean=" << s[i].mean_evaluations << " ";
    }
    const auto fit = fit_scaling_exponent(s);
    d << "exponent=" << fit.exponent;
    return {all_optimal && monotone && fit.exponent > 0.9 && fit.exponent < 2.0, d.str()};
}

Outcome order_bound()
{
    const auto result = run_experiment(preset("order-scaling"));
    bool all_optimal = true;
    bool bounded = true;
    for (const auto& r : result.rows) {
        all_optimal = all_optimal && r.result.status == RunStatus::Optimal;
        bounded = bounded && r.result.t_max_nodes <= r.result.initial_nodes + 2 * r.n;
    }
    const auto fit = fit_scaling_exponent(result.summary);
    std::ostringstream d;
    d << result.rows.size() << " runs, all optimal: " << (all_optimal ? "yes" : "no")
      << ", size bound held: " << (bounded ? "yes" : "no") << ", exponent=" << fit.exponent;
    return {result.rows.size() == 200 && all_optimal && bounded && fit.exponent <= 2.3, d.str()};
}

Outcome determinism()
{
    const auto a = to_csv(run_experiment(preset("fig3")).rows);
    const auto b = to_csv(run_experiment(preset("fig3")).rows);
    std::ostringstream d;
    d << a.size() << " bytes, identical: " << (a == b ? "yes" : "no");
    return {a == b && !a.empty(), d.str()};
}

} // namespace

int main()
{
    criterion(1, "worked examples", 0.001, worked_examples);
    criterion(2, "operator distribution", 10.0, operator_distribution);
    criterion(3, "insertion bound", 30.0, [] { return sweep_outcome(sweep_lemma1(200, 6, 0x1e77a1)); });
    criterion(4, "substitution decomposability", 60.0, [] { return sweep_outcome(sweep_sdp(6, 3)); });
    criterion(5, "local optimum", 300.0, local_optimum);
    criterion(6, "strict single-step stagnation", 300.0, stagnation);
    criterion(7, "non-strict MAJORITY scaling", 600.0, majority_scaling);
    criterion(8, "strict ORDER scaling", 600.0, order_bound);
    criterion(9, "stuck characterization", 120.0, [] { return sweep_outcome(sweep_stuck(8, 3)); });
    criterion(10, "determinism", 600.0, determinism);
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
