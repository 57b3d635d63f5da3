#include "hvlgp/harness.hpp"

#include "hvlgp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace hvlgp {

namespace {

RunConfig trial_config(const ExperimentConfig& config, std::uint32_t n, std::uint64_t seed)
{
    RunConfig rc = config.base;
    rc.problem.n = n;
    rc.seed = seed;
    rc.trace = TraceLevel::None;
    return rc;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value)
{
    T out{};
    auto digits = value;
    int base = 10;
    if (digits.starts_with("0x") || digits.starts_with("0X")) {
        digits.remove_prefix(2);
        base = 16;
    }
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out, base);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(value) + "'");
}

} // namespace

void validate(const ExperimentConfig& config)
{
    if (config.n_values.empty()) {
        throw ConfigError("n_values must not be empty");
    }
    if (!std::is_sorted(config.n_values.begin(), config.n_values.end(), std::less_equal<>{})) {
        throw ConfigError("n_values must be strictly increasing");
    }
    if (config.trials_per_n < 1) {
        throw ConfigError("trials_per_n must be at least 1");
    }
    for (const auto n : config.n_values) {
        validate(trial_config(config, n, 0));
    }
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint32_t n, std::uint32_t trial)
{
    return mix64(mix64(mix64(master_seed) ^ n) ^ (static_cast<std::uint64_t>(trial) << 32 | n));
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    validate(config);
    std::vector<TrialRow> rows;
    rows.reserve(config.n_values.size() * config.trials_per_n);
    for (const auto n : config.n_values) {
        for (std::uint32_t t = 0; t < config.trials_per_n; ++t) {
            rows.push_back({n, t, trial_seed(config.master_seed, n, t), {}});
        }
    }

    unsigned workers = config.parallelism != 0 ? config.parallelism : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(rows.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= rows.size()) {
                return;
            }
            try {
                rows[i].result = run(trial_config(config, rows[i].n, rows[i].seed));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = rows.size();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return {rows, summarize(rows)};
}

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows)
{
    if (rows.empty()) {
        throw std::invalid_argument("cannot summarize an empty result set");
    }
    std::map<std::uint32_t, std::vector<const TrialRow*>> by_n;
    for (const auto& r : rows) {
        by_n[r.n].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& [n, group] : by_n) {
        SummaryRow s{.n = n, .trials = group.size()};
        std::vector<double> evals;
        std::size_t stuck = 0;
        std::size_t budget = 0;
        double tmax = 0.0;
        for (const auto* r : group) {
            tmax += static_cast<double>(r->result.t_max_nodes);
            switch (r->result.status) {
            case RunStatus::Optimal: evals.push_back(static_cast<double>(r->result.evaluations)); break;
            case RunStatus::Stuck: ++stuck; break;
            case RunStatus::BudgetExhausted: ++budget; break;
            }
        }
        s.optimal = evals.size();
        if (!evals.empty()) {
            double sum = 0.0;
            for (auto e : evals) {
                sum += e;
            }
            s.mean_evaluations = sum / static_cast<double>(evals.size());
            if (evals.size() > 1) {
                double sq = 0.0;
                for (auto e : evals) {
                    sq += (e - s.mean_evaluations) * (e - s.mean_evaluations);
                }
                s.std_evaluations = std::sqrt(sq / static_cast<double>(evals.size() - 1));
            }
        }
        const auto trials = static_cast<double>(group.size());
        s.stuck_fraction = static_cast<double>(stuck) / trials;
        s.budget_fraction = static_cast<double>(budget) / trials;
        s.mean_t_max = tmax / trials;
        out.push_back(s);
    }
    return out;
}

ScalingFit fit_scaling_exponent(const std::vector<SummaryRow>& summary)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : summary) {
        if (s.trials > 0 && s.optimal == s.trials && s.mean_evaluations > 0.0) {
            xs.push_back(std::log(static_cast<double>(s.n)));
            ys.push_back(std::log(s.mean_evaluations));
        }
    }
    if (xs.size() < 3) {
        throw std::invalid_argument("scaling fit needs at least three fully optimal n values, got "
                                    + std::to_string(xs.size()));
    }
    const auto m = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("scaling fit needs distinct n values");
    }
    ScalingFit fit{.exponent = sxy / sxx, .points = xs.size()};
    fit.intercept = my - fit.exponent * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        rss += r * r;
    }
    fit.residual_norm = std::sqrt(rss);
    return fit;
}

void write_csv(std::ostream& os, const std::vector<TrialRow>& rows)
{
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << r.n << ',' << r.trial << ',' << r.seed << ',' << to_string(r.result.status) << ','
           << r.result.evaluations << ',' << r.result.accepted << ',' << r.result.t_max_nodes << ','
           << r.result.final_fitness << '\n';
    }
}

std::string to_csv(const std::vector<TrialRow>& rows)
{
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& summary)
{
    os << "n,trials,optimal,mean_evaluations,std_evaluations,stuck_fraction,budget_fraction,mean_t_max\n";
    for (const auto& s : summary) {
        os << s.n << ',' << s.trials << ',' << s.optimal << ',' << s.mean_evaluations << ',' << s.std_evaluations
           << ',' << s.stuck_fraction << ',' << s.budget_fraction << ',' << s.mean_t_max << '\n';
    }
}

void emit_plot_data(const std::vector<SummaryRow>& summary, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << "# n mean_evaluations std_evaluations stuck_fraction\n";
    for (const auto& s : summary) {
        os << s.n << ' ' << s.mean_evaluations << ' ' << s.std_evaluations << ' ' << s.stuck_fraction << '\n';
    }
    if (!os) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

std::vector<std::string> preset_names()
{
    return {"fig2", "fig3", "order-scaling", "tlopt-multi"};
}

ExperimentConfig preset(std::string_view name)
{
    ExperimentConfig c;
    c.name = std::string(name);
    c.master_seed = 0x5eedULL;
    if (name == "fig2") {
        c.base.problem.kind = ProblemKind::Majority;
        c.base.acceptance = AcceptancePolicy::NonStrict;
        c.base.ops = OpCountPolicy::Single;
        c.base.initializer = "adversarial-neg1";
        c.n_values = {8, 16, 32, 64, 128};
        c.trials_per_n = 50;
    } else if (name == "fig3") {
        c.base.problem.kind = ProblemKind::Majority;
        c.base.acceptance = AcceptancePolicy::Strict;
        c.base.ops = OpCountPolicy::Single;
        c.base.initializer = "unity";
        c.base.stuck_detection = true;
        c.n_values = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
        c.trials_per_n = 100;
    } else if (name == "order-scaling") {
        c.base.problem.kind = ProblemKind::Order;
        c.base.acceptance = AcceptancePolicy::Strict;
        c.base.ops = OpCountPolicy::Single;
        c.base.initializer = "unity";
        c.n_values = {16, 32, 64, 128};
        c.trials_per_n = 50;
    } else if (name == "tlopt-multi") {
        c.base.problem.kind = ProblemKind::Majority;
        c.base.acceptance = AcceptancePolicy::Strict;
        c.base.ops = OpCountPolicy::Multi;
        c.base.initializer = "t-lopt";
        c.base.budget = 1'000'000;
        c.n_values = {20};
        c.trials_per_n = 100;
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

void apply_config_key(ExperimentConfig& c, std::string_view key, std::string_view value)
{
    if (key == "name") {
        c.name = std::string(value);
    } else if (key == "problem") {
        try {
            c.base.problem.kind = parse_problem_kind(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "acceptance") {
        c.base.acceptance = parse_acceptance(value);
    } else if (key == "ops") {
        c.base.ops = parse_op_count(value);
    } else if (key == "initializer") {
        c.base.initializer = std::string(value);
    } else if (key == "budget") {
        c.base.budget = parse_number<std::uint64_t>(key, value);
    } else if (key == "stuck_detection") {
        c.base.stuck_detection = parse_bool(key, value);
    } else if (key == "incremental_majority") {
        c.base.incremental_majority = parse_bool(key, value);
    } else if (key == "n_values" || key == "n") {
        c.n_values.clear();
        std::size_t start = 0;
        while (start <= value.size()) {
            const auto comma = value.find(',', start);
            const auto item = trim(value.substr(start, comma == std::string_view::npos ? comma : comma - start));
            c.n_values.push_back(parse_number<std::uint32_t>(key, item));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
    } else if (key == "trials") {
        c.trials_per_n = parse_number<std::uint32_t>(key, value);
    } else if (key == "seed") {
        c.master_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
        c.parallelism = parse_number<unsigned>(key, value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_experiment_config(std::istream& is)
{
    ExperimentConfig c;
    apply_config_stream(c, is);
    return c;
}

void apply_config_stream(ExperimentConfig& c, std::istream& is)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        apply_config_key(c, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    }
}

} // namespace hvlgp
