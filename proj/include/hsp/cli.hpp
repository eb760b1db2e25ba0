// Copyright 2026 the nil2hsp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsp/nil2.hpp"
#include "hsp/qsim.hpp"
#include "hsp/quadsys.hpp"
#include "hsp/reduction.hpp"

namespace hsp::cli {

using json = nlohmann::ordered_json;

// Exit codes, stable across subcommands:
//   0 success, 1 mismatch or runtime failure, 2 input error, 3 precondition error.
constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_input = 2;
constexpr int exit_precondition = 3;

inline std::uint64_t resource_bound(std::uint64_t fallback)
{
    if (const char* env = std::getenv("HSP_MAX_GROUP_ORDER")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return v;
        }
    }
    return fallback;
}

inline void emit(const json& doc, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << doc.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw parse_error("cannot open output file: " + path);
    }
    f << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

inline int cmd_gen_group(std::uint64_t p, std::size_t m, std::size_t d, std::uint64_t seed,
                         const std::string& out_path, std::ostream& out, std::ostream& err)
{
    nil2::GroupSpec spec = [&] {
        try {
            SplitRng rng(seed);
            return nil2::random_group(fp::Prime(p), m, d, rng);
        } catch (const std::invalid_argument& e) {
            throw parse_error(e.what()); // bad (p, m, d) is an input error here
        }
    }();
    if (out_path.empty() || out_path == "-") {
        nil2::write_groupspec(out, spec);
        return exit_ok;
    }
    std::ofstream f(out_path);
    if (!f) {
        err << "cannot open output file: " << out_path << '\n';
        return exit_input;
    }
    nil2::write_groupspec(f, spec);
    return exit_ok;
}

inline int cmd_solve_quadsys(const std::string& in_path, std::uint64_t seed, bool verify,
                             std::ostream& out, std::ostream& err)
{
    std::ifstream f(in_path);
    if (!f) {
        err << "cannot open input file: " << in_path << '\n';
        return exit_input;
    }
    quadsys::QuadLinSystem sys = quadsys::parse_system(f);
    SplitRng rng(seed);
    linalg::FpVector j = quadsys::solve_full_system(sys, rng);
    for (std::size_t i = 0; i < j.size(); ++i) {
        out << j[i] << (i + 1 == j.size() ? '\n' : ' ');
    }
    if (verify) {
        if (!quadsys::check_full(sys, j)) {
            out << "FAIL\n";
            return exit_failure;
        }
        out << "OK\n";
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct HspTrialRecord {
    json record;
    bool match = false;
};

inline int cmd_run_hsp(const std::optional<std::string>& group_file, std::uint64_t p, std::size_t m,
                       std::size_t d, const std::string& order, std::size_t trials,
                       std::uint64_t seed, const std::string& json_path, std::size_t threads,
                       bool timings, std::ostream& out, std::ostream& err)
{
    std::optional<nil2::GroupSpec> fixed;
    if (group_file) {
        std::ifstream f(*group_file);
        if (!f) {
            err << "cannot open group file: " << *group_file << '\n';
            return exit_input;
        }
        fixed = nil2::read_groupspec(f);
    } else {
        // validate parameters up front so bad input fails before any work
        try {
            fp::Prime prime(p);
            if (prime.is_two() || m < 1 || d > m * (m - 1) / 2) {
                throw std::invalid_argument("need odd p, m >= 1 and d <= m(m-1)/2");
            }
        } catch (const std::invalid_argument& e) {
            throw parse_error(std::string("run-hsp: ") + e.what());
        }
    }
    if (order != "1" && order != "p" && order != "random") {
        throw parse_error("run-hsp: --order must be 1, p or random");
    }

    const std::uint64_t bound = resource_bound(nil2::default_order_bound);
    SplitRng root(seed);
    std::vector<HspTrialRecord> records(trials);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= trials) {
                return;
            }
            SplitRng rng = root.split(t);
            const auto started = std::chrono::steady_clock::now();
            json rec;
            rec["trial"] = t;
            bool match = false;
            try {
                nil2::GroupSpec spec =
                    fixed ? *fixed
                          : nil2::random_group(fp::Prime(p), m, d, rng);
                std::uint64_t horder = 1;
                if (order == "p" || (order == "random" && rng.below(2) == 1)) {
                    horder = spec.prime().value();
                }
                nil2::SubgroupGens hgens = nil2::random_hidden_subgroup(spec, horder, rng);
                nil2::HidingFunction f = nil2::hiding_function(spec, hgens, bound);
                nil2::ElemSet oracle = nil2::brute_force_hsp(spec, f, bound);

                qsim::HspOptions opts;
                opts.order_bound = bound;
                qsim::HspResult res = qsim::find_hidden_subgroup(spec, f, rng, opts);

                match = res.subgroup == oracle;
                rec["p"] = spec.prime().value();
                rec["m"] = spec.m();
                rec["d"] = spec.d();
                rec["hidden_order"] = oracle.size();
                rec["recovered_order"] = res.subgroup.size();
                rec["hidden"] = oracle;
                rec["recovered"] = res.subgroup;
                rec["match"] = match;
                rec["retries"] = res.retries;
                rec["samples"] = res.samples;
            } catch (const std::exception& e) {
                rec["error"] = e.what();
                rec["match"] = false;
            }
            if (timings) {
                const auto elapsed = std::chrono::steady_clock::now() - started;
                rec["wall_ms"] =
                    std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count() / 1000.0;
            }
            records[t] = HspTrialRecord{std::move(rec), match};
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::size_t matches = 0;
    std::uint64_t total_retries = 0;
    std::uint64_t total_samples = 0;
    json trial_array = json::array();
    for (const auto& r : records) {
        matches += r.match ? 1 : 0;
        if (r.record.contains("retries")) {
            total_retries += r.record["retries"].get<std::uint64_t>();
            total_samples += r.record["samples"].get<std::uint64_t>();
        }
        trial_array.push_back(r.record);
    }

    json doc;
    doc["command"] = "run-hsp";
    doc["config"] = {{"seed", seed},
                     {"trials", trials},
                     {"order", order},
                     {"max_group_order", bound}};
    if (group_file) {
        doc["config"]["group_file"] = *group_file;
    } else {
        doc["config"]["p"] = p;
        doc["config"]["m"] = m;
        doc["config"]["d"] = d;
    }
    doc["trials"] = std::move(trial_array);
    doc["aggregate"] = {{"trials", trials},
                        {"matches", matches},
                        {"success", matches == trials},
                        {"total_retries", total_retries},
                        {"mean_retries", trials == 0 ? 0.0 : double(total_retries) / double(trials)},
                        {"total_samples", total_samples}};
    emit(doc, json_path, out);
    return matches == trials ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------------------

inline int cmd_run_reduction(const std::string& table_file, std::uint64_t seed,
                             const std::string& json_path, std::ostream& out, std::ostream& err)
{
    std::ifstream f(table_file);
    if (!f) {
        err << "cannot open table file: " << table_file << '\n';
        return exit_input;
    }
    const std::uint64_t bound = resource_bound(reduction::default_explicit_bound);
    reduction::TableFile tf = reduction::parse_table(f, bound);
    const reduction::ExplicitGroup& g = tf.group;

    reduction::IdxSet hidden = reduction::closure_of(g, tf.hidden_gens);
    std::vector<std::uint64_t> labels = reduction::labels_from_subgroup(g, hidden);

    json doc;
    doc["command"] = "run-reduction";
    doc["config"] = {{"seed", seed}, {"table_file", table_file}};
    doc["group"] = {{"order", g.n()}};

    auto parts = reduction::sylow_decompose(g);
    json sylow;
    for (const auto& [q, part] : parts) {
        sylow[std::to_string(q)] = part.size();
    }
    doc["group"]["sylow"] = std::move(sylow);
    doc["hidden"] = {{"generators", tf.hidden_gens}, {"order", hidden.size()},
                     {"elements", hidden}};

    // Recover H one Sylow part at a time with the normalizer iteration.
    reduction::IdxSet recovered_gens;
    std::size_t total_calls = 0;
    json per_part = json::array();
    for (const auto& [q, part] : parts) {
        auto [pg, to_parent] = reduction::subgroup_as_group(g, part);
        std::vector<std::uint64_t> plabels(pg.n());
        for (std::uint32_t i = 0; i < pg.n(); ++i) {
            plabels[i] = labels[to_parent[i]];
        }
        reduction::Algorithm1Stats st;
        reduction::IdxSet found =
            reduction::algorithm1(pg, plabels, reduction::brute_force_solver(), &st);
        total_calls += st.p_calls;
        for (reduction::ElemIdx e : found) {
            recovered_gens.push_back(to_parent[e]);
        }
        json part_doc;
        part_doc["prime"] = q;
        part_doc["order"] = part.size();
        part_doc["recovered_order"] = found.size();
        part_doc["p_calls"] = st.p_calls;
        try {
            part_doc["exponent_p_subgroup"] = reduction::exponent_p_subgroup(pg, q).size();
        } catch (const std::domain_error& e) {
            part_doc["exponent_p_subgroup"] = std::string("error: ") + e.what();
        }
        per_part.push_back(std::move(part_doc));
    }
    std::sort(recovered_gens.begin(), recovered_gens.end());
    reduction::IdxSet recovered = reduction::closure_of(g, recovered_gens);
    const bool match = recovered == hidden;

    doc["parts"] = std::move(per_part);
    doc["algorithm1"] = {{"recovered", recovered}, {"match", match}, {"p_calls", total_calls}};
    emit(doc, json_path, out);
    return match ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------------------

inline double time_solver_us(std::uint64_t p, std::size_t d, std::uint64_t seed)
{
    SplitRng rng(seed);
    const fp::Prime prime(p);
    const std::size_t n = quadsys::full_system_bound(d);

    // batch until the clock has something to measure
    double elapsed_us = 0;
    std::size_t solves = 0;
    while (elapsed_us < 50'000.0 && solves < 2000) {
        linalg::FpMatrix u(d, n);
        for (auto& x : u.a) {
            x = rng.below(p);
        }
        quadsys::QuadLinSystem sys(prime, d, n, std::move(u));
        const auto t0 = std::chrono::steady_clock::now();
        linalg::FpVector j = quadsys::solve_full_system(sys, rng);
        const auto t1 = std::chrono::steady_clock::now();
        if (!quadsys::check_full(sys, j)) {
            throw std::logic_error("bench: solver produced an invalid solution");
        }
        elapsed_us += std::chrono::duration<double, std::micro>(t1 - t0).count();
        ++solves;
    }
    return elapsed_us / double(solves);
}

inline int cmd_bench(const std::string& suite, std::uint64_t seed, const std::string& json_path,
                     std::ostream& out, std::ostream& err)
{
    if (suite != "quadsys") {
        err << "unknown bench suite: " << suite << '\n';
        return exit_input;
    }
    json doc;
    doc["command"] = "bench";
    doc["suite"] = suite;
    doc["seed"] = seed;

    // growth in the number of equations at fixed p
    const std::uint64_t fixed_p = 101;
    json d_rows = json::array();
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t d = 1; d <= 8; ++d) {
        const double us = time_solver_us(fixed_p, d, seed + d);
        d_rows.push_back({{"d", d},
                          {"n", quadsys::full_system_bound(d)},
                          {"mean_us", us}});
        xs.push_back(std::log(double(d)));
        ys.push_back(std::log(us));
    }
    // least-squares slope of log t vs log d
    double sx = 0;
    double sy = 0;
    double sxx = 0;
    double sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double npts = double(xs.size());
    const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    doc["d_sweep"] = {{"p", fixed_p}, {"rows", std::move(d_rows)}, {"loglog_slope", slope}};

    // growth in log p at fixed d
    json p_rows = json::array();
    for (std::uint64_t p : {3ULL, 101ULL, 10007ULL, 1000003ULL, 100000007ULL}) {
        p_rows.push_back({{"p", p}, {"mean_us", time_solver_us(p, 3, seed + p)}});
    }
    doc["p_sweep"] = {{"d", 3}, {"rows", std::move(p_rows)}};

    emit(doc, json_path, out);
    return exit_ok;
}

// ---------------------------------------------------------------------------

inline int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"hidden-subgroup toolkit for nil-2 p-groups of exponent p"};
    app.require_subcommand(1);

    // gen-group
    auto* gen = app.add_subcommand("gen-group", "generate a random structure-constant group file");
    std::uint64_t gg_p = 3;
    std::size_t gg_m = 2;
    std::size_t gg_d = 1;
    std::uint64_t gg_seed = 0;
    std::string gg_out = "-";
    gen->add_option("--p", gg_p, "odd prime")->required();
    gen->add_option("--m", gg_m, "number of transversal generators")->required();
    gen->add_option("--d", gg_d, "dimension of the derived subgroup")->required();
    gen->add_option("--seed", gg_seed, "random seed");
    gen->add_option("--out", gg_out, "output file (default stdout)");

    // solve-quadsys
    auto* solve = app.add_subcommand("solve-quadsys",
                                     "solve a diagonal quadratic+linear system file");
    std::string sq_in;
    std::uint64_t sq_seed = 0;
    bool sq_verify = false;
    solve->add_option("--in", sq_in, "system file")->required();
    solve->add_option("--seed", sq_seed, "random seed");
    solve->add_flag("--verify", sq_verify, "substitute the solution back and report");

    // run-hsp
    auto* hsp = app.add_subcommand("run-hsp", "run end-to-end hidden-subgroup experiments");
    std::string rh_group_file;
    std::uint64_t rh_p = 3;
    std::size_t rh_m = 2;
    std::size_t rh_d = 1;
    std::string rh_order = "random";
    std::size_t rh_trials = 1;
    std::uint64_t rh_seed = 0;
    std::string rh_json = "-";
    std::size_t rh_threads = 1;
    bool rh_timings = false;
    hsp->add_option("--group-file", rh_group_file, "structure-constant group file");
    hsp->add_option("--p", rh_p, "odd prime (ignored with --group-file)");
    hsp->add_option("--m", rh_m, "transversal rank");
    hsp->add_option("--d", rh_d, "derived subgroup dimension");
    hsp->add_option("--order", rh_order, "hidden subgroup order: 1, p or random");
    hsp->add_option("--trials", rh_trials, "number of independent trials");
    hsp->add_option("--seed", rh_seed, "root random seed");
    hsp->add_option("--json", rh_json, "report path (default stdout)");
    hsp->add_option("--threads", rh_threads, "worker threads (per-trial seeds keep runs reproducible)");
    hsp->add_flag("--timings", rh_timings, "include wall-clock fields (breaks bitwise determinism)");

    // run-reduction
    auto* red = app.add_subcommand("run-reduction",
                                   "run the classical reduction pipeline on a multiplication table");
    std::string rr_table;
    std::uint64_t rr_seed = 0;
    std::string rr_json = "-";
    red->add_option("--table-file", rr_table, "multiplication table file")->required();
    red->add_option("--seed", rr_seed, "random seed");
    red->add_option("--json", rr_json, "report path (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "timing sweeps for the system solver");
    std::string be_suite = "quadsys";
    std::uint64_t be_seed = 0;
    std::string be_json = "-";
    bench->add_option("--suite", be_suite, "bench suite (quadsys)");
    bench->add_option("--seed", be_seed, "random seed");
    bench->add_option("--json", be_json, "report path (default stdout)");

    std::vector<const char*> argv;
    argv.push_back("nil2hsp");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << e.what() << '\n';
        return exit_input;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_group(gg_p, gg_m, gg_d, gg_seed, gg_out, out, err);
        }
        if (solve->parsed()) {
            return cmd_solve_quadsys(sq_in, sq_seed, sq_verify, out, err);
        }
        if (hsp->parsed()) {
            std::optional<std::string> gf;
            if (!rh_group_file.empty()) {
                gf = rh_group_file;
            }
            return cmd_run_hsp(gf, rh_p, rh_m, rh_d, rh_order, rh_trials, rh_seed, rh_json,
                               rh_threads, rh_timings, out, err);
        }
        if (red->parsed()) {
            return cmd_run_reduction(rr_table, rr_seed, rr_json, out, err);
        }
        if (bench->parsed()) {
            return cmd_bench(be_suite, be_seed, be_json, out, err);
        }
    } catch (const parse_error& e) {
        err << "input error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::invalid_argument& e) {
        err << "precondition error: " << e.what() << '\n';
        return exit_precondition;
    } catch (const std::domain_error& e) {
        err << "precondition error: " << e.what() << '\n';
        return exit_precondition;
    } catch (const resource_error& e) {
        err << "precondition error: " << e.what() << '\n';
        return exit_precondition;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_input;
}

} // namespace hsp::cli
