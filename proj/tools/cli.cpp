#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "selfish/analytic.hpp"
#include "selfish/chain_sim.hpp"
#include "selfish/evaluate.hpp"
#include "selfish/markov.hpp"
#include "selfish/parallel.hpp"
#include "selfish/threshold.hpp"
#include "selfish/transient.hpp"

namespace selfish::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
    double alpha1 = 0.22;
    double alpha2 = 0.22;
    std::optional<double> gamma, gamma1, gamma2, theta, theta1, theta2;
    int n = 4;
    std::uint64_t blocks = 1'000'000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    int epochs = 100;
    std::string growth = "constant";
    std::string evaluator = "markov";
    std::string out;
    std::string format = "csv";
    bool allowMinority = false;

    // per command
    bool checkClosedForm = false;
    std::string exportChain;
    int replications = 1;
    std::string target = "symmetric";
    double lo = 0.01;
    double hi = 0.45;
    double tolerance = 1e-5;
    std::string figure;
};

TieBreakParams tie_of(const Options& o) {
    TieBreakParams t;
    t.gamma1 = o.gamma1.value_or(o.gamma.value_or(0.5));
    t.gamma2 = o.gamma2.value_or(o.gamma.value_or(0.5));
    t.theta1 = o.theta1.value_or(o.theta.value_or(1.0 / 3.0));
    t.theta2 = o.theta2.value_or(o.theta.value_or(1.0 / 3.0));
    return t;
}

Scenario scenario_of(const Options& o) {
    ProtocolParams p;
    p.nCap = o.n;
    return validate_scenario(make_scenario(o.alpha1, o.alpha2, tie_of(o), p), !o.allowMinority);
}

Evaluator evaluator_of(const Options& o) {
    return parse_evaluator(o.evaluator, o.n, o.blocks, o.seed);
}

GrowthSchedule growth_of(const std::string& text) {
    if (text.empty() || text == "constant") return GrowthSchedule::constant();
    std::string rate = text;
    if (text.rfind("geometric:", 0) == 0) rate = text.substr(10);
    double g = 0.0;
    const auto* end = rate.data() + rate.size();
    if (auto [p, ec] = std::from_chars(rate.data(), end, g); ec == std::errc{} && p == end) {
        return GrowthSchedule::geometric(g);
    }
    return GrowthSchedule::from_file(text);
}

// ---- tabular output ----

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string csv_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

ordered_json json_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return std::isfinite(*d) ? ordered_json(*d) : ordered_json(nullptr);
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    return std::get<std::string>(c);
}

void write_table(std::ostream& out, const Table& t, const std::string& format, const ordered_json& meta) {
    if (format == "json") {
        ordered_json doc = meta;
        doc["rows"] = ordered_json::array();
        for (const auto& row : t.rows) {
            ordered_json obj = ordered_json::object();
            for (std::size_t i = 0; i < t.columns.size() && i < row.size(); ++i) {
                obj[t.columns[i]] = json_cell(row[i]);
            }
            doc["rows"].push_back(std::move(obj));
        }
        out << doc.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

ordered_json parameters_json(const Options& o, const std::string& command) {
    const auto t = tie_of(o);
    ordered_json p;
    p["command"] = command;
    p["alpha1"] = o.alpha1;
    p["alpha2"] = o.alpha2;
    p["alphaH"] = 1.0 - o.alpha1 - o.alpha2;
    p["gamma1"] = t.gamma1;
    p["gamma2"] = t.gamma2;
    p["theta1"] = t.theta1;
    p["theta2"] = t.theta2;
    p["n"] = o.n;
    p["evaluator"] = o.evaluator;
    p["blocks"] = o.blocks;
    p["seed"] = o.seed;
    p["jobs"] = o.jobs;
    p["epochs"] = o.epochs;
    p["growth"] = o.growth;
    p["honestMajority"] = !o.allowMinority;
    return p;
}

ordered_json manifest(const Options& o, const std::string& command, const std::vector<std::string>& files) {
    ordered_json m;
    m["tool"] = "selfish";
    m["version"] = SELFISH_VERSION;
    m["command"] = command;
    m["parameters"] = parameters_json(o, command);
    m["files"] = files;
    return m;
}

fs::path resolve_out(const std::string& path) {
    fs::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("SELFISH_OUT_DIR"); dir && *dir) p = fs::path(dir) / p;
    }
    return p;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidParameter, "cannot write " + path.string());
    f << content;
}

// Writes to --out (plus a manifest) or to the stream.
void emit(std::ostream& out, const Options& o, const std::string& command, const Table& t,
          ordered_json meta = ordered_json::object()) {
    if (o.format != "csv" && o.format != "json") {
        throw Error(ErrorCode::InvalidParameter, "--format must be csv or json");
    }
    if (meta.is_null()) meta = ordered_json::object();
    meta["parameters"] = parameters_json(o, command);
    std::ostringstream body;
    write_table(body, t, o.format, meta);
    if (o.out.empty()) {
        out << body.str();
        return;
    }
    const fs::path path = resolve_out(o.out);
    write_file(path, body.str());
    fs::path man = path;
    man += ".manifest.json";
    write_file(man, manifest(o, command, {path.filename().string()}).dump(2) + "\n");
}

// ---- commands ----

int cmd_analyze(const Options& o, std::ostream& out) {
    const Scenario s = scenario_of(o);
    const Evaluator ev = evaluator_of(o);
    const Evaluation e = evaluate(s, ev);

    Table t;
    t.columns = {"evaluator", "r1", "r2", "rh", "rA", "rB", "rH", "yield", "states"};
    t.add({describe(ev), e.rates.r1, e.rates.r2, e.rates.rh, e.revenue.rA, e.revenue.rB,
           e.revenue.rH, e.yield, static_cast<std::int64_t>(e.states)});

    std::optional<double> residual;
    if (o.checkClosedForm) {
        if (o.n != 2 && o.n != 4) throw Error(ErrorCode::InvalidParameter, "closed forms exist for n = 2 and n = 4 only");
        const Evaluator closed = o.n == 2 ? Evaluator{AnalyticN2{}} : Evaluator{AnalyticN4{}};
        const Evaluation a = evaluate(s, closed);
        const Evaluation m = evaluate(s, MarkovEval{o.n});
        residual = std::max({std::abs(a.revenue.rA - m.revenue.rA), std::abs(a.revenue.rB - m.revenue.rB),
                             std::abs(a.revenue.rH - m.revenue.rH)});
        t.columns.push_back("closed_form_residual");
        t.rows[0].push_back(*residual);
    }
    if (!o.exportChain.empty()) {
        Scenario chain_s = s;
        chain_s.protocol.nCap = cap_of(ev);
        std::ostringstream edges;
        write_edge_list(edges, build_chain(chain_s));
        write_file(resolve_out(o.exportChain), edges.str());
    }
    emit(out, o, "analyze", t);
    if (residual && !(*residual < 1e-9)) return kNumeric;
    return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    if (o.replications < 1) throw Error(ErrorCode::InvalidParameter, "--reps must be >= 1");
    const Scenario s = scenario_of(o);
    const auto parts = parallel_map(static_cast<std::size_t>(o.replications), o.jobs, [&](std::size_t i) {
        SimConfig c{s, o.blocks, o.seed, i};
        return run(c);
    });
    SimResult total;
    for (const auto& p : parts) total += p;
    const auto rel = total.relative();

    Table t;
    t.columns = {"total_blocks", "main_chain", "rounds", "yield", "round_main_blocks", "round_mined_blocks"};
    std::vector<Cell> row{static_cast<std::int64_t>(total.totalBlocks), static_cast<std::int64_t>(total.mainChainLength),
                          static_cast<std::int64_t>(total.rounds), total.main_chain_yield(),
                          total.mean_round_main_blocks(), total.mean_round_mined_blocks()};
    for (MinerId m : kAllMiners) {
        const auto i = index_of(m);
        std::string who(to_string(m));
        for (auto& c : who) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        for (const char* col : {"_mined", "_credited", "_orphaned", "_relative", "_stderr"}) t.columns.push_back(who + col);
        row.insert(row.end(), {static_cast<std::int64_t>(total.mined[i]), static_cast<std::int64_t>(total.credited[i]),
                               static_cast<std::int64_t>(total.orphaned[i]), rel.of(m), total.relative_stderr(m)});
    }
    t.add(std::move(row));
    emit(out, o, "simulate", t);
    return kOk;
}

ThresholdTarget target_of(const std::string& s) {
    if (s == "alice") return ThresholdTarget::Alice;
    if (s == "bob") return ThresholdTarget::Bob;
    if (s == "symmetric") return ThresholdTarget::Symmetric;
    throw Error(ErrorCode::InvalidParameter, "--target must be alice, bob or symmetric");
}

int cmd_threshold(const Options& o, std::ostream& out, std::ostream& err) {
    ThresholdQuery q;
    q.target = target_of(o.target);
    Options base = o;
    if (q.target == ThresholdTarget::Alice) base.alpha1 = 0.0;
    if (q.target == ThresholdTarget::Bob) base.alpha2 = 0.0;
    if (q.target == ThresholdTarget::Symmetric) base.alpha1 = base.alpha2 = 0.0;
    base.allowMinority = true;
    q.base = scenario_of(base);
    q.evaluator = evaluator_of(o);
    q.lo = o.lo;
    q.hi = o.hi;
    q.tolerance = o.tolerance;
    q.honestMajority = !o.allowMinority;
    const auto r = profitable_threshold(q);
    if (r.majorityWarning) err << "warning: honest majority fails somewhere on the search interval\n";

    Table t;
    t.columns = {"target", "evaluator", "threshold", "evaluations"};
    t.add({o.target, describe(q.evaluator), r.threshold, static_cast<std::int64_t>(r.evaluations)});
    emit(out, o, "threshold", t);
    return kOk;
}

int cmd_transient(const Options& o, std::ostream& out) {
    const Scenario s = scenario_of(o);
    const Evaluator ev = evaluator_of(o);
    const GrowthSchedule g = growth_of(o.growth);
    const SteadyRates rates = steady_round_rates(s, ev);
    const EpochTrace trace = simulate_epochs(rates, s.protocol, g, o.epochs);

    Table t;
    t.columns = {"epoch", "n", "m", "math", "t", "T", "S", "absolute_alice", "absolute_bob"};
    for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
        const auto& r = trace.epochs[i];
        t.add({static_cast<std::int64_t>(r.epoch), r.n, r.m, r.mathTime, r.t, r.T, r.S,
               absolute_revenue(trace, rates.shares.rA, i + 1), absolute_revenue(trace, rates.shares.rB, i + 1)});
    }
    ordered_json meta;
    meta["relativeAlice"] = rates.shares.rA;
    try {
        const auto d = profitable_delay(s, ev, g);
        meta["profitableEpochs"] = d.epochs;
        meta["profitableDays"] = d.days;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NeverProfitable) throw;
        meta["profitableEpochs"] = nullptr;
    }
    emit(out, o, "transient", t, meta);
    return kOk;
}

// ---- figures ----

std::vector<double> grid(double from, double to, double step) {
    std::vector<double> g;
    const auto n = static_cast<int>(std::floor((to - from) / step + 1e-9));
    for (int i = 0; i <= n; ++i) g.push_back(std::round((from + i * step) * 1e9) / 1e9);
    return g;
}

Table fig6(const Options& o, const TieBreakParams& tie) {
    Table t;
    t.columns = {"alpha1", "bob_threshold_n2", "bob_threshold_n3", "bob_threshold_n4"};
    const auto g = grid(0.0, 0.30, 0.01);
    std::vector<ThresholdCurve> curves;
    for (int n = 2; n <= 4; ++n) curves.push_back(threshold_curve(g, make_scenario(0, 0, tie), MarkovEval{n}, o.jobs));
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<Cell> row{g[i]};
        for (const auto& c : curves) {
            const auto& p = c.points[i];
            row.push_back(p.threshold ? *p.threshold : std::nan(""));
        }
        t.add(std::move(row));
    }
    return t;
}

Table surface(const Options& o, const TieBreakParams& tie, const std::vector<int>& caps) {
    Table t;
    t.columns = {"n", "alpha1", "alpha2", "rA", "rB", "rH"};
    struct Point {
        int n;
        double a1, a2;
    };
    std::vector<Point> pts;
    for (int n : caps) {
        for (double a1 : grid(0.0, 0.45, 0.01)) {
            for (double a2 : grid(0.0, 0.45, 0.01)) {
                const double h = 1.0 - a1 - a2;
                if (h > std::max(a1, a2) + 1e-12) pts.push_back({n, a1, a2});
            }
        }
    }
    const auto rows = parallel_map(pts.size(), o.jobs, [&](std::size_t i) {
        const auto& p = pts[i];
        const Evaluator ev = p.n == 2 ? Evaluator{AnalyticN2{}} : Evaluator{MarkovEval{p.n}};
        const auto e = evaluate(make_scenario(p.a1, p.a2, tie), ev);
        return std::vector<Cell>{static_cast<std::int64_t>(p.n), p.a1, p.a2, e.revenue.rA, e.revenue.rB, e.revenue.rH};
    });
    for (const auto& r : rows) t.add(r);
    return t;
}

Table fig9(const Options& o, const TieBreakParams& tie) {
    Table t;
    t.columns = {"n", "single_attacker_threshold", "two_attacker_threshold"};
    const auto single = convergence_study(ConvergenceMode::SingleAttacker, make_scenario(0, 0, tie), 2, 8, o.jobs);
    const auto both = convergence_study(ConvergenceMode::Symmetric, make_scenario(0, 0, tie), 2, 8, o.jobs);
    for (std::size_t i = 0; i < single.rows.size(); ++i) {
        t.add({static_cast<std::int64_t>(single.rows[i].n), single.rows[i].threshold.value_or(std::nan("")),
               both.rows[i].threshold.value_or(std::nan(""))});
    }
    return t;
}

Table fig11(const TieBreakParams& tie) {
    Table t;
    t.columns = {"alpha1", "epoch", "relative_revenue", "absolute_revenue"};
    for (double a : {0.22, 0.33}) {
        const Scenario s = make_scenario(a, a, tie);
        const SteadyRates rates = steady_round_rates(s, AnalyticN4{});
        const EpochTrace trace = simulate_epochs(rates, s.protocol, GrowthSchedule::constant(), 200);
        for (std::size_t k = 1; k <= trace.epochs.size(); ++k) {
            t.add({a, static_cast<std::int64_t>(k), rates.shares.rA, absolute_revenue(trace, rates.shares.rA, k)});
        }
    }
    return t;
}

Table fig12(const TieBreakParams& tie) {
    Table t;
    t.columns = {"alpha1", "k", "cumulative_absolute_revenue", "profitable"};
    for (double a : {0.22, 0.25, 0.30, 0.33}) {
        const Scenario s = make_scenario(a, a, tie);
        const SteadyRates rates = steady_round_rates(s, AnalyticN4{});
        const EpochTrace trace = simulate_epochs(rates, s.protocol, GrowthSchedule::constant(), 60);
        for (std::size_t k = 1; k <= trace.epochs.size(); ++k) {
            const double r = absolute_revenue(trace, rates.shares.rA, k);
            t.add({a, static_cast<std::int64_t>(k), r, static_cast<std::int64_t>(r > a)});
        }
    }
    return t;
}

int cmd_reproduce(const Options& o, std::ostream& out, std::ostream& err) {
    const TieBreakParams tie = tie_of(o);
    Table t;
    if (o.figure == "fig6") {
        t = fig6(o, tie);
    } else if (o.figure == "fig7") {
        t = surface(o, tie, {2});
    } else if (o.figure == "fig8") {
        t = surface(o, tie, {3, 4});
    } else if (o.figure == "fig9") {
        t = fig9(o, tie);
    } else if (o.figure == "fig11") {
        t = fig11(tie);
    } else if (o.figure == "fig12") {
        t = fig12(tie);
    } else {
        err << "unknown figure '" << o.figure << "' (expected fig6, fig7, fig8, fig9, fig11 or fig12)\n";
        return kUsage;
    }
    if (o.format != "csv" && o.format != "json") {
        throw Error(ErrorCode::InvalidParameter, "--format must be csv or json");
    }

    fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    if (o.out.empty()) {
        if (const char* env = std::getenv("SELFISH_OUT_DIR"); env && *env) dir = env;
    } else {
        dir = resolve_out(o.out);
    }
    const std::string name = o.figure + (o.format == "json" ? ".json" : ".csv");
    std::ostringstream body;
    ordered_json meta;
    meta["figure"] = o.figure;
    write_table(body, t, o.format, meta);
    fs::create_directories(dir);
    write_file(dir / name, body.str());
    write_file(dir / (o.figure + ".manifest.json"),
               manifest(o, "reproduce " + o.figure, {name}).dump(2) + "\n");
    out << (dir / name).string() << '\n';
    return kOk;
}

void add_scenario_options(CLI::App* app, Options& o) {
    app->add_option("--alpha1", o.alpha1, "Alice's hashrate fraction")->capture_default_str();
    app->add_option("--alpha2", o.alpha2, "Bob's hashrate fraction")->capture_default_str();
    app->add_option("--gamma", o.gamma, "gamma1 = gamma2");
    app->add_option("--gamma1", o.gamma1);
    app->add_option("--gamma2", o.gamma2);
    app->add_option("--theta", o.theta, "theta1 = theta2");
    app->add_option("--theta1", o.theta1);
    app->add_option("--theta2", o.theta2);
    app->add_option("--n", o.n, "private-chain cap")->capture_default_str();
    app->add_option("--blocks", o.blocks, "blocks per simulation")->capture_default_str();
    app->add_option("--seed", o.seed)->capture_default_str();
    app->add_option("--jobs", o.jobs, "worker threads")->capture_default_str();
    app->add_option("--epochs", o.epochs)->capture_default_str();
    app->add_option("--growth", o.growth, "constant | geometric:RATE | RATE | FILE")->capture_default_str();
    app->add_option("--evaluator", o.evaluator, "analytic-n2 | analytic-n4 | analytic | markov | monte-carlo")
        ->capture_default_str();
    app->add_option("--out", o.out, "output path (directory for reproduce)");
    app->add_option("--format", o.format, "csv | json")->capture_default_str();
    app->add_flag("--allow-minority", o.allowMinority, "skip the honest-majority check");
}

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidPartition:
        case ErrorCode::HonestMinority:
        case ErrorCode::InvalidParameter:
        case ErrorCode::UndefinedBeta: return kValidation;
        default: return kNumeric;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Two-attacker selfish mining analysis", "selfish"};
    app.set_version_flag("--version", SELFISH_VERSION);
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "steady-state revenue of one scenario");
    add_scenario_options(analyze, o);
    analyze->add_flag("--check-closed-form", o.checkClosedForm, "compare closed form and generated chain");
    analyze->add_option("--export-chain", o.exportChain, "write the transition edge list here");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo block simulation");
    add_scenario_options(simulate, o);
    simulate->add_option("--reps", o.replications, "independent replications")->capture_default_str();

    auto* threshold = app.add_subcommand("threshold", "profitability threshold search");
    add_scenario_options(threshold, o);
    threshold->add_option("--target", o.target, "alice | bob | symmetric")->capture_default_str();
    threshold->add_option("--lo", o.lo)->capture_default_str();
    threshold->add_option("--hi", o.hi)->capture_default_str();
    threshold->add_option("--tol", o.tolerance)->capture_default_str();

    auto* transient = app.add_subcommand("transient", "revenue across difficulty adjustments");
    add_scenario_options(transient, o);

    auto* reproduce = app.add_subcommand("reproduce", "datasets behind the figures");
    add_scenario_options(reproduce, o);
    reproduce->add_option("figure", o.figure, "fig6 | fig7 | fig8 | fig9 | fig11 | fig12")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << SELFISH_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*analyze) return cmd_analyze(o, out);
        if (*simulate) return cmd_simulate(o, out);
        if (*threshold) return cmd_threshold(o, out, err);
        if (*transient) return cmd_transient(o, out);
        if (*reproduce) return cmd_reproduce(o, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}

}  // namespace selfish::cli
