// SPDX-License-Identifier: Apache-2.0
//
// rfcurate: RF fingerprinting dataset curation toolkit
// Copyright (C) 2026 The rfcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command line front end.
//
// Exit status: 0 success, 2 usage error, 3 missing input, 4 stage failure.
// Every subcommand accepts --config FILE with key=value lines naming its long
// flags; flags given on the command line win over the file, the file wins
// over defaults.

#include "rfcurate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace rfcurate;

namespace
{

constexpr int kExitUsage = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitStageFailure = 4;

struct MissingInput : Error
{
    using Error::Error;
};

void require_file(const fs::path &p)
{
    if (!fs::exists(p))
        throw MissingInput("input not found: " + p.string());
}

void require_store(const fs::path &p)
{
    require_file(p);
    require_file(store::manifest_path(p));
}

void write_text(const std::string &path, const std::string &text)
{
    if (path.empty() || path == "-")
    {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    store::detail::write_file_atomic(p, text);
}

std::vector<int> parse_days(const std::string &s)
{
    std::vector<int> out;
    for (const auto &tok : store::detail::split(s, ','))
        if (!tok.empty())
            out.push_back(std::stoi(tok));
    return out;
}

// ---- option groups ---------------------------------------------------------

struct GenerateOpts
{
    int days = 2;
    int ntx = 4;
    int nrx = 3;
    int pkts = 50;
    double snr = 20.0;
    std::uint64_t seed = 1;
    int payload = 20;
    double duration = 0.0;
    double pathloss = 0.0;

    void add(CLI::App *app)
    {
        app->add_option("--days", days, "Number of capture days")->check(CLI::Range(1, 255));
        app->add_option("--ntx", ntx, "Number of transmitters")->check(CLI::Range(1, 65535));
        app->add_option("--nrx", nrx, "Number of receivers")->check(CLI::Range(1, 65535));
        app->add_option("--pkts", pkts, "Packets per capture")->check(CLI::PositiveNumber);
        app->add_option("--snr", snr, "Receiver SNR in dB");
        app->add_option("--seed", seed, "Global seed");
        app->add_option("--payload", payload, "OFDM payload symbols per packet")->check(CLI::PositiveNumber);
        app->add_option("--duration", duration, "Capture duration in seconds at 25 Msps (0 sizes to fit)")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--pathloss", pathloss, "Log-distance path loss exponent (0 disables geometry)")
            ->check(CLI::NonNegativeNumber);
    }

    wavegen::ScenarioConfig config() const
    {
        wavegen::ScenarioConfig c;
        c.n_days = days;
        c.n_tx = ntx;
        c.n_rx = nrx;
        c.packets_per_capture = pkts;
        c.snr_db = snr;
        c.seed = seed;
        c.payload_symbols = payload;
        c.capture_samples = static_cast<std::size_t>(std::llround(duration * kCaptureRateHz));
        c.pathloss_exponent = pathloss;
        return c;
    }
};

struct DetectOpts
{
    burst::DetectionParams p;

    void add(CLI::App *app, bool full = true)
    {
        if (full)
        {
            app->add_option("--nw", p.n_w, "Energy window length in samples")->check(CLI::PositiveNumber);
            app->add_option("--lw", p.l_w, "Mean magnitude threshold per window")->check(CLI::PositiveNumber);
            app->add_option("--npkt", p.n_pkt, "Minimum packet burst length (exclusive)")->check(CLI::PositiveNumber);
            app->add_option("--nack", p.n_ack, "Maximum ACK burst length (exclusive)")->check(CLI::PositiveNumber);
        }
        app->add_option("--min-packets", p.min_packets, "Packets per (day, tx) needed to keep a transmitter")
            ->check(CLI::PositiveNumber);
    }
};

// ---- stages ----------------------------------------------------------------

void run_generate(const GenerateOpts &g, const fs::path &out)
{
    const auto sc = wavegen::make_scenario(g.config());
    pipeline::write_scenario(sc, out);
    std::cout << "generate: " << sc.captures.size() << " captures written to " << out.string() << '\n';
}

void report_detect(const pipeline::DetectOutcome &o)
{
    std::cout << "detect: " << o.stats.captures << " captures, " << o.stats.bursts << " bursts, " << o.stats.packets
              << " packets, " << o.store.size() << " signals kept, " << o.stats.dropped_sparse
              << " dropped with sparse transmitters\n";
}

void report_equalize(const pipeline::EqualizeStats &s)
{
    for (const auto &line : s.per_capture)
        std::cout << "equalize: " << line << '\n';
    std::cout << "equalize: " << s.attempted << " attempted, " << s.equalized << " equalized, " << s.discarded
              << " discarded, " << s.dropped_sparse << " dropped with sparse transmitters\n";
}

/// Equalized output stores keep the capture directory reachable.
void rebase_capture_dir(store::SignalStore &st, const fs::path &from_store, const fs::path &to_store)
{
    auto it = st.attributes.find("capture_dir");
    if (it == st.attributes.end())
        return;
    fs::path cdir = it->second;
    if (cdir.is_relative())
        cdir = fs::absolute(from_store).parent_path() / cdir;
    it->second = fs::relative(fs::weakly_canonical(cdir), fs::weakly_canonical(fs::absolute(to_store).parent_path()))
                     .generic_string();
}

void ensure_parent(const fs::path &p)
{
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
}

struct UsageError : Error
{
    using Error::Error;
};

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Splices the subcommand's --config file into the argument list. Keys the
/// user also gave as flags are skipped, so flags win over the file.
std::vector<std::string> expand_config(CLI::App &app, std::vector<std::string> args)
{
    if (args.empty())
        return args;
    CLI::App *sub = nullptr;
    for (auto *s : app.get_subcommands({}))
        if (s->get_name() == args[0])
            sub = s;
    if (!sub)
        return args;
    std::string file;
    for (std::size_t i = 1; i < args.size(); ++i)
    {
        if (args[i] == "--config" && i + 1 < args.size())
            file = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            file = args[i].substr(9);
    }
    if (file.empty())
        return args;
    if (!fs::exists(file))
        throw MissingInput("config file not found: " + file);
    auto given = [&](const std::string &flag) {
        for (std::size_t i = 1; i < args.size(); ++i)
            if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0)
                return true;
        return false;
    };
    std::vector<std::string> extra;
    std::istringstream in(store::detail::read_file(file));
    int line_no = 0;
    for (std::string line; std::getline(in, line);)
    {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(file + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0)
            key = key.substr(2);
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        const std::string flag = "--" + key;
        const CLI::Option *opt = sub->get_option_no_throw(flag);
        if (!opt || key == "config")
            throw UsageError(file + ":" + std::to_string(line_no) + ": unknown key '" + key + "' for " + args[0]);
        if (given(flag))
            continue;
        if (opt->get_expected_min() == 0)
        {
            if (value == "true" || value == "1" || value == "yes" || value == "on")
                extra.push_back(flag);
        }
        else
        {
            extra.push_back(flag);
            extra.push_back(value);
        }
    }
    args.insert(args.begin() + 1, extra.begin(), extra.end());
    return args;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"rfcurate: RF fingerprinting dataset curation toolkit"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", "rfcurate 1.0.0");

    std::string config_path; // consumed by expand_config before parsing
    auto with_config = [&config_path](CLI::App *sub) {
        sub->option_defaults()->always_capture_default();
        sub->add_option("--config", config_path, "Read key=value options from this file (flags take precedence)");
        return sub;
    };

    // generate
    GenerateOpts gen;
    std::string gen_out;
    auto *c_gen = with_config(app.add_subcommand("generate", "Synthesize captures for a scenario"));
    gen.add(c_gen);
    c_gen->add_option("--out", gen_out, "Output capture directory")->required();

    // detect
    DetectOpts det;
    std::string det_in, det_out;
    auto *c_det = with_config(app.add_subcommand("detect", "Energy detection and raw Id-signal extraction"));
    c_det->add_option("--captures", det_in, "Capture directory")->required();
    c_det->add_option("--out", det_out, "Output store")->required();
    det.add(c_det);

    // equalize
    DetectOpts eq_det;
    std::string eq_in, eq_out;
    auto *c_eq = with_config(app.add_subcommand("equalize", "Preamble-based equalization of detected packets"));
    c_eq->add_option("--in", eq_in, "Detected store")->required();
    c_eq->add_option("--out", eq_out, "Output store with raw and equalized signals")->required();
    eq_det.add(c_eq, false);

    // analyze
    std::string an_store, an_out;
    std::uint64_t an_bin = 50, an_max = 0;
    int an_day = -1;
    auto *c_an = with_config(app.add_subcommand("analyze", "Count histogram and Tx x Rx grids"));
    c_an->add_option("--store", an_store, "Input store")->required();
    c_an->add_option("--hist-bin", an_bin, "Histogram bin width")->check(CLI::PositiveNumber);
    c_an->add_option("--max-count", an_max, "Largest count in the histogram (0 uses the store maximum)");
    c_an->add_option("--grid-day", an_day, "Day for the count grid (-1 prints every day)");
    c_an->add_option("--out", an_out, "Output text file (default stdout)");

    // subset
    std::string ss_store, ss_out, ss_mode = "greedy", ss_days, ss_recipe;
    int ss_ntx = 1;
    std::uint32_t ss_k = 1, ss_klow = 0, ss_max_sig = 0;
    double ss_p = 1.0;
    bool ss_parallel = false;
    std::uint64_t ss_max_nodes = milp::SolveLimits{}.max_nodes;
    std::size_t ss_max_cells = milp::SolveLimits{}.max_cells;
    auto *c_ss = with_config(app.add_subcommand("subset", "Balanced subset selection"));
    c_ss->add_option("--store", ss_store, "Input store")->required();
    c_ss->add_option("--ntx", ss_ntx, "Required transmitters N")->check(CLI::PositiveNumber);
    c_ss->add_option("--k", ss_k, "Signals required per (tx, rx, day) K")->check(CLI::PositiveNumber);
    c_ss->add_option("--p", ss_p, "Fraction of the N transmitters that must reach K")->check(CLI::Range(0.0, 1.0));
    c_ss->add_option("--klow", ss_klow, "Lower bound on the smallest selected count");
    c_ss->add_option("--days", ss_days, "Comma separated day indices (empty selects all)");
    c_ss->add_option("--mode", ss_mode, "greedy, exact or lp")->check(CLI::IsMember({"greedy", "exact", "lp"}));
    c_ss->add_option("--max-sig", ss_max_sig, "Signals kept per cell (0 uses K)");
    c_ss->add_option("--recipe", ss_recipe, "Named shape: manysig, manytx, manyrx, singleday")
        ->check(CLI::IsMember({"", "manysig", "manytx", "manyrx", "singleday"}));
    c_ss->add_flag("--parallel", ss_parallel, "Split the exact search over threads");
    c_ss->add_option("--max-nodes", ss_max_nodes, "Exact search node limit");
    c_ss->add_option("--max-cells", ss_max_cells, "Largest n_tx * n_rx the exact search accepts");
    c_ss->add_option("--out", ss_out, "Output store (greedy, exact) or LP file (lp)")->required();

    // eval
    std::string ev_store, ev_proto = "rx", ev_out;
    std::uint64_t ev_seed = 1;
    int ev_real = 5, ev_day = 0, ev_rx = 0, ev_held = 5;
    bool ev_raw = false;
    auto *c_ev = with_config(app.add_subcommand("eval", "Run an evaluation protocol with the baseline classifier"));
    c_ev->add_option("--store", ev_store, "Input store")->required();
    c_ev->add_option("--protocol", ev_proto, "rx, day, nsig or ntx")
        ->check(CLI::IsMember({"rx", "day", "nsig", "ntx", "rx_gen", "day_gen"}));
    c_ev->add_option("--seed", ev_seed, "Seed");
    c_ev->add_option("--realizations", ev_real, "Seeded realizations per sweep point")->check(CLI::PositiveNumber);
    c_ev->add_option("--day", ev_day, "Day used by rx, nsig and ntx");
    c_ev->add_option("--rx", ev_rx, "Receiver used by day");
    c_ev->add_option("--held-out", ev_held, "Unseen receivers for rx")->check(CLI::PositiveNumber);
    c_ev->add_flag("--raw", ev_raw, "Use non-equalized signals for rx, nsig and ntx");
    c_ev->add_option("--out", ev_out, "Output table (default stdout)");

    // locate
    std::string lo_store, lo_out;
    int lo_day = 0;
    std::uint64_t lo_seed = 1;
    std::size_t lo_k = 3;
    double lo_test = 0.2;
    auto *c_lo = with_config(app.add_subcommand("locate", "Received power localization"));
    c_lo->add_option("--store", lo_store, "Input store with transmitter positions")->required();
    c_lo->add_option("--day", lo_day, "Day");
    c_lo->add_option("--seed", lo_seed, "Seed for missing-pair fill and the split");
    c_lo->add_option("--k", lo_k, "Neighbours")->check(CLI::PositiveNumber);
    c_lo->add_option("--test-fraction", lo_test, "Share of transmitters held out")->check(CLI::Range(0.0, 1.0));
    c_lo->add_option("--out", lo_out, "Output report (default stdout)");

    // pipeline
    GenerateOpts pl_gen;
    DetectOpts pl_det;
    std::string pl_out;
    std::uint64_t pl_bin = 10;
    auto *c_pl = with_config(app.add_subcommand("pipeline", "generate, detect, equalize and analyze in one run"));
    pl_gen.add(c_pl);
    pl_det.add(c_pl);
    c_pl->add_option("--hist-bin", pl_bin, "Histogram bin width")->check(CLI::PositiveNumber);
    c_pl->add_option("--out", pl_out, "Output directory")->required();

    try
    {
        auto args = expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    catch (const MissingInput &e)
    {
        std::cerr << "rfcurate: " << e.what() << '\n';
        return kExitMissingInput;
    }
    catch (const UsageError &e)
    {
        std::cerr << "rfcurate: " << e.what() << '\n';
        return kExitUsage;
    }

    std::string stage = "setup";
    try
    {
        if (c_gen->parsed())
        {
            stage = "generate";
            run_generate(gen, gen_out);
        }
        else if (c_det->parsed())
        {
            stage = "detect";
            if (!fs::is_directory(det_in))
                throw MissingInput("capture directory not found: " + det_in);
            const auto o = pipeline::detect_dir(det_in, det_out, det.p);
            ensure_parent(det_out);
            pipeline::write_detect_outcome(o, det_out);
            report_detect(o);
        }
        else if (c_eq->parsed())
        {
            stage = "equalize";
            require_store(eq_in);
            require_file(pipeline::bursts_path(eq_in));
            auto [st, stats] = pipeline::equalize_file(eq_in, {}, eq_det.p);
            rebase_capture_dir(st, eq_in, eq_out);
            ensure_parent(eq_out);
            store::write_store(eq_out, st);
            report_equalize(stats);
        }
        else if (c_an->parsed())
        {
            stage = "analyze";
            require_store(an_store);
            const auto st = store::read_store(an_store);
            pipeline::check_counts(st);
            const std::uint64_t mx =
                an_max ? an_max : std::max<std::uint64_t>(1, std::max(st.counts(false).max(), st.counts(true).max()));
            write_text(an_out, pipeline::analyze(st, an_bin, mx, an_day < 0 ? std::nullopt : std::optional<int>(an_day)));
        }
        else if (c_ss->parsed())
        {
            stage = "subset";
            // Status goes to stderr when the result itself is written to stdout.
            std::ostream &status = ss_out == "-" ? std::cerr : std::cout;
            require_store(ss_store);
            const auto st = store::read_store(ss_store);
            subset::SubsetSpec spec;
            spec.n_tx_required = ss_ntx;
            spec.k_min = ss_k;
            spec.p = ss_p;
            spec.k_low = ss_klow;
            spec.days = parse_days(ss_days);
            std::optional<subset::Recipe> recipe;
            if (!ss_recipe.empty())
            {
                recipe = subset::find_recipe(ss_recipe);
                spec = recipe->spec();
                if (recipe->n_days > st.dims().n_days)
                    throw Error("recipe " + ss_recipe + " needs " + std::to_string(recipe->n_days) + " days, store has " +
                                std::to_string(st.dims().n_days));
            }
            spec.validate();
            if (spec.n_tx_required > st.dims().n_tx)
                throw Error("N = " + std::to_string(spec.n_tx_required) + " exceeds the store's " +
                            std::to_string(st.dims().n_tx) + " transmitters");
            const auto days = spec.resolved_days(st.dims().n_days);
            status << "subset: spec " << subset::describe(spec) << '\n';
            const auto model = milp::encode_milp(st.counts(false), st.counts(true), spec);
            if (ss_mode == "lp")
            {
                write_text(ss_out, milp::emit_lp(model));
                status << "subset: LP model with " << model.vars.size() << " variables and " << model.cons.size()
                          << " constraints written to " << ss_out << '\n';
                return 0;
            }
            subset::SubsetSolution sol;
            if (ss_mode == "greedy")
            {
                const auto cp = subset::min_over_days_both(st.counts(false), st.counts(true), days);
                sol = subset::greedy_select(cp, spec.n_tx_required, spec.k_min, spec.p);
            }
            else
            {
                milp::SolveLimits lim;
                lim.max_nodes = ss_max_nodes;
                lim.max_cells = ss_max_cells;
                lim.parallel = ss_parallel;
                const auto res = milp::solve_exact(model, lim);
                if (res.status != milp::SolveStatus::Optimal)
                    throw Error(std::string("exact solver: ") + milp::to_string(res.status) + ": " + res.message);
                sol = res.solution;
                status << "subset: exact search visited " << res.nodes << " nodes\n";
            }
            if (recipe && static_cast<int>(sol.rx.size()) > recipe->n_rx)
                sol.rx.resize(static_cast<std::size_t>(recipe->n_rx));
            const auto rep = subset::verify_solution(sol, st.counts(false), st.counts(true), spec);
            if (!rep.ok)
            {
                for (const auto &v : rep.violations)
                    std::cerr << "subset: violation: " << v << '\n';
                throw Error("selected subset fails verification");
            }
            sol.verified = true;
            if (recipe && static_cast<int>(sol.rx.size()) < recipe->n_rx)
                throw Error("recipe " + ss_recipe + " needs " + std::to_string(recipe->n_rx) + " receivers, found " +
                            std::to_string(sol.rx.size()));
            if (sol.rx.empty())
                throw Error("no receiver satisfies the requirements");
            const std::uint32_t max_sig = ss_max_sig ? ss_max_sig : spec.k_min;
            const auto out = subset::materialize(st, sol, days, max_sig);
            ensure_parent(ss_out);
            store::write_store(ss_out, out);
            status << "subset: N=" << sol.tx.size() << " M=" << sol.rx.size() << " K=" << spec.k_min
                      << " p=" << spec.p << " days=" << days.size() << " k=" << sol.k << '\n';
            status << "subset: tx";
            for (int t : sol.tx)
                status << ' ' << t;
            status << "\nsubset: rx";
            for (int r : sol.rx)
                status << ' ' << r;
            status << '\n';
        }
        else if (c_ev->parsed())
        {
            stage = "eval";
            require_store(ev_store);
            const auto st = store::read_store(ev_store);
            eval::ProtocolParams pp;
            pp.realizations = ev_real;
            pp.equalized = !ev_raw;
            pp.day = ev_day;
            pp.rx = ev_rx;
            pp.held_out_rx = ev_held;
            const auto table = eval::run_protocol(st, *eval::parse_protocol(ev_proto), pp, ev_seed);
            write_text(ev_out, table.to_text());
        }
        else if (c_lo->parsed())
        {
            stage = "locate";
            require_store(lo_store);
            const auto st = store::read_store(lo_store);
            if (static_cast<int>(st.tx_positions.size()) != st.dims().n_tx)
                throw Error("store carries no transmitter positions");
            const auto fps = eval::power_fingerprints(st, lo_day, lo_seed);
            eval::LocalizeParams lp;
            lp.k = lo_k;
            lp.test_fraction = lo_test;
            lp.seed = lo_seed;
            const auto rep = eval::localize(fps, st.tx_positions, lp);
            write_text(lo_out, rep.to_text());
        }
        else if (c_pl->parsed())
        {
            const fs::path out = pl_out;
            const fs::path caps = out / "captures";
            const fs::path signals = out / "signals.wsig";
            stage = "generate";
            run_generate(pl_gen, caps);
            stage = "detect";
            const auto det_o = pipeline::detect_dir(caps, signals, pl_det.p);
            report_detect(det_o);
            stage = "equalize";
            store::SignalStore st = det_o.store;
            const auto stats = pipeline::equalize_store(
                st, det_o.bursts, [&](int d, int t, int r) { return store::read_capture(caps / store::capture_filename(d, t, r)); },
                {}, pl_det.p);
            report_equalize(stats);
            store::write_store(signals, st);
            store::detail::write_file_atomic(pipeline::bursts_path(signals), pipeline::encode_bursts(det_o.bursts));
            stage = "analyze";
            const std::uint64_t mx = std::max<std::uint64_t>(1, st.counts(false).max());
            store::detail::write_file_atomic(out / "analysis.txt", pipeline::analyze(st, pl_bin, mx));
            std::cout << "pipeline: " << st.size() << " signals in " << signals.string() << '\n';
        }
    }
    catch (const MissingInput &e)
    {
        std::cerr << "rfcurate: stage '" << stage << "' failed: " << e.what() << '\n';
        return kExitMissingInput;
    }
    catch (const std::exception &e)
    {
        std::cerr << "rfcurate: stage '" << stage << "' failed: " << e.what() << '\n';
        return kExitStageFailure;
    }
    return 0;
}
