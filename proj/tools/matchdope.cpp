// Copyright 2026 The matchdope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// matchdope: command-line driver for the doped matchgate circuit simulator.
//
//   matchdope evolve   --n 64 --depth 200 --p 0.1 --eta 0 --backend arc --out growth.csv
//   matchdope page     --n 64 --eta 0 1 2 --out page.csv
//   matchdope mastereq --p 0.1 --L 4096 --out steady.csv
//   matchdope collapse --input a.csv b.csv ... --out collapse.json
//   matchdope replay   growth.csv.manifest.json --out again.csv
//
// Every CSV starts with '#' comment lines, the first of which carries the
// manifest hash. A JSON manifest is written next to each output as
// <out>.manifest.json. Exit codes: 0 success, 2 configuration error,
// 3 numerical non-convergence, 4 internal invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "matchdope/circuit.hpp"
#include "matchdope/closed_form.hpp"
#include "matchdope/ensemble.hpp"
#include "matchdope/errors.hpp"
#include "matchdope/rng.hpp"
#include "matchdope/stats.hpp"

#ifndef MATCHDOPE_VERSION
#define MATCHDOPE_VERSION "0.0.0"
#endif

namespace {

using json = nlohmann::json;
using namespace matchdope;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInvariant = 4;

const std::string kVersion = std::string("matchdope ") + MATCHDOPE_VERSION;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot open output file " + path);
    f << content;
    require(static_cast<bool>(f), "failed writing " + path);
}

/// Output-determining part of a run: command, options and code version.
struct RunSpec {
    std::string command;
    json options;

    uint64_t hash() const {
        std::string text = json{{"version", kVersion}, {"command", command}, {"options", options}}.dump();
        Fnv1a h;
        h.add_bytes(text.data(), text.size());
        return h.value();
    }

    std::string csv_preamble() const {
        std::ostringstream os;
        os << "# " << kVersion << " manifest=" << hex64(hash()) << "\n";
        os << "# command=" << command;
        for (const auto& [key, value] : options.items()) {
            os << ' ' << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump());
        }
        os << "\n";
        return os.str();
    }
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_manifest(const RunSpec& spec, const std::string& out, size_t workers, double wall, json metrics) {
    json m;
    m["version"] = kVersion;
    m["command"] = spec.command;
    m["options"] = spec.options;
    m["manifest_hash"] = hex64(spec.hash());
    m["output"] = out;
    m["shards"] = {{"workers", workers}, {"queue", "trajectory-index work queue, shard sums merged exactly"}};
    m["wall_seconds"] = wall;
    m["metrics"] = std::move(metrics);
    write_file(out + ".manifest.json", m.dump(2) + "\n");
}

json throughput(const EnsembleSeries& s, double wall) {
    double w = std::max(wall, 1e-9);
    return {{"trajectories", s.count()},
            {"gates", s.gates_applied()},
            {"measurements", s.measurements()},
            {"gates_per_second", static_cast<double>(s.gates_applied()) / w},
            {"measurements_per_second", static_cast<double>(s.measurements()) / w}};
}

Backend parse_backend(const std::string& s) {
    if (s == "tableau") return Backend::Tableau;
    if (s == "arc") return Backend::Arc;
    throw ConfigError("unknown backend '" + s + "' (tableau or arc)");
}

InitialState parse_init(const std::string& s) {
    if (s == "vacuum") return InitialState::Vacuum;
    if (s == "random-gaussian") return InitialState::RandomGaussian;
    throw ConfigError("unknown initial state '" + s + "' (vacuum or random-gaussian)");
}

GridAxis parse_grid(const std::string& s) {
    GridAxis g;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.steps) || c1 != ':' || c2 != ':') {
        throw ConfigError("grid '" + s + "' must look like lo:hi:steps");
    }
    require(g.hi > g.lo && g.steps >= 3, "grid needs hi > lo and at least 3 steps");
    return g;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveArgs {
    size_t n = 64;
    size_t depth = 0;
    double p = 0;
    double eta = 0;
    double beta = 1;
    size_t shots = 100;
    std::string backend = "tableau";
    std::string init = "vacuum";
    uint64_t seed = 1;
    std::string cuts = "half";
    size_t record_every = 0;

    json to_json() const {
        return {{"n", n},         {"depth", depth},   {"p", p},         {"eta", eta},
                {"beta", beta},   {"shots", shots},   {"backend", backend}, {"init", init},
                {"seed", seed},   {"cuts", cuts},     {"record-every", record_every}};
    }
};

CircuitConfig make_config(const EvolveArgs& a) {
    CircuitConfig cfg;
    cfg.n = a.n;
    cfg.depth = a.depth == 0 ? 2 * a.n : a.depth;
    cfg.p = a.p;
    cfg.eta = a.eta;
    cfg.beta = a.beta;
    cfg.backend = parse_backend(a.backend);
    cfg.initial_state = parse_init(a.init);
    require(a.cuts == "half" || a.cuts == "all", "--cuts must be half or all");
    cfg.cuts = a.cuts == "half" ? half_cut(a.n) : all_cuts(a.n);
    cfg.record_every = a.record_every;
    require(a.shots >= 1, "--shots must be positive");
    cfg.validate();
    return cfg;
}

int run_evolve(const EvolveArgs& a, const std::string& out, size_t workers) {
    CircuitConfig cfg = make_config(a);
    RunSpec spec{"evolve", a.to_json()};
    Timer timer;
    EnsembleSeries s = simulate_series(cfg, a.seed, a.shots, workers);
    double wall = timer.seconds();

    std::ostringstream os;
    os << spec.csv_preamble();
    os << "t,cut,mean_S,std_S,stderr_S,shots,n_ng_mean\n";
    for (size_t ti = 0; ti < s.times().size(); ++ti) {
        for (size_t ci = 0; ci < s.cuts().size(); ++ci) {
            os << s.times()[ti] << ',' << s.cuts()[ci] << ',' << num(s.mean(ti, ci)) << ',' << num(s.std_dev(ti, ci))
               << ',' << num(s.std_error(ti, ci)) << ',' << s.count() << ',' << num(s.n_ng_mean(ti)) << "\n";
        }
    }
    write_file(out, os.str());
    json metrics = throughput(s, wall);
    metrics["q"] = cfg.q();
    write_manifest(spec, out, workers, wall, std::move(metrics));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// page

struct PageArgs {
    size_t n = 64;
    std::vector<double> eta{0.0};
    double beta = 1;
    size_t depth_multiple = 5;
    size_t shots = 200;
    size_t clifford_shots = 0;
    uint64_t seed = 1;

    json to_json() const {
        return {{"n", n},         {"eta", eta},   {"beta", beta},  {"depth-multiple", depth_multiple},
                {"shots", shots}, {"clifford-shots", clifford_shots}, {"seed", seed}};
    }
};

int run_page(const PageArgs& a, const std::string& out, size_t workers) {
    require(a.n >= 4, "--n must be at least 4");
    require(!a.eta.empty(), "--eta needs at least one value");
    require(a.depth_multiple >= 1 && a.shots >= 1, "--depth-multiple and --shots must be positive");
    RunSpec spec{"page", a.to_json()};
    Timer timer;

    auto base = [&](double eta, double beta) {
        CircuitConfig cfg;
        cfg.n = a.n;
        cfg.depth = a.depth_multiple * a.n;
        cfg.p = 0;
        cfg.eta = eta;
        cfg.beta = beta;
        cfg.initial_state = InitialState::RandomGaussian;
        cfg.backend = eta == 0 ? Backend::Arc : Backend::Tableau;
        cfg.cuts = all_cuts(a.n);
        cfg.record_at = {cfg.depth};
        return cfg;
    };

    std::vector<EnsembleSeries> runs;
    uint64_t gates = 0, measurements = 0, trajectories = 0;
    for (size_t e = 0; e < a.eta.size(); ++e) {
        runs.push_back(simulate_series(base(a.eta[e], a.beta), trajectory_seed(a.seed, e), a.shots, workers));
    }
    // Random stabilizer reference: every gate drawn from C2.
    size_t ref_shots = a.clifford_shots == 0 ? a.shots : a.clifford_shots;
    EnsembleSeries ref = simulate_series(base(1.0, 0.0), trajectory_seed(a.seed, a.eta.size()), ref_shots, workers);
    for (const auto& s : runs) {
        gates += s.gates_applied();
        measurements += s.measurements();
        trajectories += s.count();
    }
    double wall = timer.seconds();

    std::ostringstream os;
    os << spec.csv_preamble();
    os << "i,eta,n_ng_mean,mean_S,stderr_S,page_cg,clifford_S,clifford_stderr,deviation\n";
    for (size_t e = 0; e < a.eta.size(); ++e) {
        const auto& s = runs[e];
        for (size_t ci = 0; ci < s.cuts().size(); ++ci) {
            size_t i = s.cuts()[ci];
            double cg = page_curve_cg(static_cast<int64_t>(a.n), static_cast<int64_t>(i));
            os << i << ',' << num(a.eta[e]) << ',' << num(s.n_ng_mean(0)) << ',' << num(s.mean(0, ci)) << ','
               << num(s.std_error(0, ci)) << ',' << num(cg) << ',' << num(ref.mean(0, ci)) << ','
               << num(ref.std_error(0, ci)) << ',' << num(ref.mean(0, ci) - s.mean(0, ci)) << "\n";
        }
    }
    write_file(out, os.str());
    double w = std::max(wall, 1e-9);
    json metrics = {{"trajectories", trajectories + ref.count()},
                    {"gates", gates + ref.gates_applied()},
                    {"measurements", measurements + ref.measurements()},
                    {"gates_per_second", static_cast<double>(gates + ref.gates_applied()) / w}};
    write_manifest(spec, out, workers, wall, std::move(metrics));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mastereq

struct MasterEqArgs {
    double p = 0.1;
    int64_t L = 4096;
    double tol = 1e-12;
    size_t max_iterations = 100000;
    /// Empty: 16, 32, ... up to L + 1.
    std::vector<int64_t> sizes;

    json to_json() const {
        return {{"p", p}, {"L", L}, {"tol", tol}, {"max-iterations", max_iterations}, {"sizes", sizes}};
    }
};

std::string sibling(const std::string& out, const std::string& tag) {
    auto dot = out.rfind('.');
    auto slash = out.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + "." + tag;
    return out.substr(0, dot) + "." + tag + out.substr(dot);
}

int run_mastereq(const MasterEqArgs& a, const std::string& out) {
    RunSpec spec{"mastereq", a.to_json()};
    std::vector<int64_t> sizes = a.sizes;
    if (sizes.empty()) {
        for (int64_t n = 16; n <= a.L + 1; n *= 2) sizes.push_back(n);
    }
    for (int64_t n : sizes) require(n >= 2 && n - 1 <= a.L, "--sizes must lie in [2, L + 1]");
    Timer timer;
    MasterEquation eq(a.p, a.L);
    auto r = eq.solve(a.tol, a.max_iterations);
    if (!r.converged) {
        throw NonConvergence("master equation did not converge: residual " + num(r.last_change) + " after " +
                             std::to_string(r.iterations) + " iterations");
    }
    const auto& d = r.steady;
    double tail = tail_coefficient(d);
    double predicted = predicted_tail_coefficient(a.p);
    double mismatch = fourier_mismatch(d, a.p);
    double wall = timer.seconds();

    std::string pre = spec.csv_preamble();
    pre += "# iterations=" + std::to_string(r.iterations) + " residual=" + num(r.last_change) +
           " boundary_mass=" + num(r.boundary_mass) + "\n";
    pre += "# tail_coefficient=" + num(tail) + " predicted=" + num(predicted) + " fourier_mismatch=" + num(mismatch) +
           "\n";

    std::ostringstream steady;
    steady << pre << "l,P\n";
    for (int64_t l = -a.L; l <= a.L; ++l) steady << l << ',' << num(d[l]) << "\n";
    write_file(out, steady.str());

    std::ostringstream momentum;
    momentum << pre << "k,P_iterated,P_closed_form\n";
    auto ks = lattice_momenta(a.L);
    auto ft = momentum_transform(d);
    for (size_t j = 0; j < ks.size(); ++j) {
        momentum << num(ks[j]) << ',' << num(ft[j]) << ',' << num(steady_state_momentum(ks[j], a.p)) << "\n";
    }
    write_file(sibling(out, "momentum"), momentum.str());

    std::ostringstream entropy;
    entropy << pre << "N,S_half\n";
    for (int64_t n : sizes) {
        entropy << n << ',' << num(entropy_from_lengths(d, n)) << "\n";
    }
    write_file(sibling(out, "entropy"), entropy.str());

    json summary = {{"iterations", r.iterations},   {"residual", r.last_change},
                    {"boundary_mass", r.boundary_mass}, {"tail_coefficient", tail},
                    {"predicted_tail_coefficient", predicted}, {"fourier_mismatch", mismatch}};
    std::cout << summary.dump(2) << "\n";
    write_manifest(spec, out, 1, wall, summary);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// collapse

struct CollapseArgs {
    std::vector<std::string> input;
    std::string pc_grid = "0.05:0.6:56";
    std::string nu_grid = "0.4:4:37";
    std::string a_grid = "-0.5:2:51";
    size_t bootstrap = 100;
    uint64_t seed = 1;

    json to_json() const {
        return {{"input", input},       {"pc-grid", pc_grid},     {"nu-grid", nu_grid},
                {"a-grid", a_grid},     {"bootstrap", bootstrap}, {"seed", seed}};
    }
};

/// Half-chain mean entropy at the last recorded time of an evolve CSV.
CollapsePoint read_evolve_csv(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), "cannot read " + path);
    std::map<std::string, std::string> meta;
    std::string line;
    size_t best_t = 0;
    bool found = false;
    CollapsePoint pt;
    bool header = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream is(line.substr(1));
            std::string tok;
            while (is >> tok) {
                auto eq = tok.find('=');
                if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        if (!header) {
            require(line.rfind("t,cut,mean_S", 0) == 0, path + " is not an evolve table");
            header = true;
            require(meta.count("n") && meta.count("p"), path + " lacks n and p in its header");
            continue;
        }
        std::istringstream is(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(is, cell, ',')) cells.push_back(cell);
        require(cells.size() >= 5, "malformed row in " + path);
        size_t t = std::stoul(cells[0]);
        size_t cut = std::stoul(cells[1]);
        size_t n = std::stoul(meta["n"]);
        if (cut == n / 2 && (!found || t > best_t)) {
            best_t = t;
            found = true;
            pt.value = std::stod(cells[2]);
            pt.error = std::stod(cells[4]);
        }
    }
    require(found, path + " has no half-chain rows");
    pt.n = std::stod(meta["n"]);
    pt.p = std::stod(meta["p"]);
    return pt;
}

int run_collapse(const CollapseArgs& a, const std::string& out, size_t workers) {
    require(!a.input.empty(), "--input needs evolve CSV files");
    RunSpec spec{"collapse", a.to_json()};
    Timer timer;
    std::vector<CollapsePoint> pts;
    for (const auto& path : a.input) pts.push_back(read_evolve_csv(path));

    CollapseOptions opt;
    opt.pc = parse_grid(a.pc_grid);
    opt.nu = parse_grid(a.nu_grid);
    opt.a = parse_grid(a.a_grid);
    opt.bootstrap = a.bootstrap;
    opt.seed = a.seed;
    opt.workers = workers;
    CollapseResult r = scaling_collapse(pts, opt);

    // Log prefactor per rate, over all sizes present at that rate.
    std::map<double, std::vector<const CollapsePoint*>> by_rate;
    for (const auto& pt : pts) by_rate[pt.p].push_back(&pt);
    json ceff = json::array();
    for (const auto& [p, list] : by_rate) {
        if (list.size() < 3) continue;
        std::vector<double> n, v, e;
        for (const auto* pt : list) {
            n.push_back(pt->n);
            v.push_back(pt->value);
            e.push_back(pt->error);
        }
        auto fit = fit_log_prefactor(n, v, e);
        ceff.push_back({{"p", p}, {"c_eff", fit.c_eff}, {"c_eff_error", fit.error}});
    }

    json result = {{"manifest", hex64(spec.hash())},
                   {"p_c", r.pc},
                   {"nu", r.nu},
                   {"a", r.a},
                   {"cost", r.cost},
                   {"p_c_interval", {r.pc_interval.lo, r.pc_interval.hi}},
                   {"nu_interval", {r.nu_interval.lo, r.nu_interval.hi}},
                   {"a_interval", {r.a_interval.lo, r.a_interval.hi}},
                   {"bootstrap_used", r.bootstrap_used},
                   {"bootstrap_failed", r.bootstrap_failed},
                   {"local_optimum", r.local_optimum},
                   {"c_eff", ceff}};
    write_file(out, result.dump(2) + "\n");

    std::ostringstream coords;
    coords << spec.csv_preamble() << "p,N,x,y,error\n";
    for (const auto& pt : pts) {
        double x = (pt.p - r.pc) * std::pow(pt.n, 1.0 / r.nu);
        double y = pt.value - r.a * std::log(pt.n);
        coords << num(pt.p) << ',' << num(pt.n) << ',' << num(x) << ',' << num(y) << ',' << num(pt.error) << "\n";
    }
    auto dot = out.rfind('.');
    std::string stem = dot == std::string::npos || out.find('/', dot) != std::string::npos ? out : out.substr(0, dot);
    write_file(stem + ".coords.csv", coords.str());
    write_manifest(spec, out, workers, timer.seconds(), {{"points", pts.size()}});
    return kExitOk;
}

// ---------------------------------------------------------------------------

int run(std::vector<std::string> args);

int run_replay(const std::string& manifest_path, const std::string& out, const std::string& workers) {
    std::ifstream f(manifest_path);
    require(static_cast<bool>(f), "cannot read manifest " + manifest_path);
    json m;
    try {
        f >> m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    require(m.contains("command") && m.contains("options"), "manifest lacks command or options");
    if (m.value("version", "") != kVersion) {
        std::cerr << "warning: manifest written by " << m.value("version", "?") << ", replaying with " << kVersion
                  << "\n";
    }
    std::vector<std::string> args{m["command"].get<std::string>()};
    for (const auto& [key, value] : m["options"].items()) {
        args.push_back("--" + key);
        auto push = [&](const json& v) { args.push_back(v.is_string() ? v.get<std::string>() : v.dump()); };
        if (value.is_array()) {
            if (value.empty()) {
                args.pop_back();
                continue;
            }
            for (const auto& v : value) push(v);
        } else {
            push(value);
        }
    }
    args.push_back("--out");
    args.push_back(out);
    if (!workers.empty() && args.front() != "mastereq") {
        args.push_back("--workers");
        args.push_back(workers);
    }
    return run(args);
}

int run(std::vector<std::string> args) {
    CLI::App app{"Monitored doped matchgate circuits: simulation and analysis"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
    app.require_subcommand(1);

    std::string out;
    size_t workers = 1;
    auto add_common = [&](CLI::App* sub, bool parallel) {
        sub->add_option("--out", out, "Output path")->required();
        if (parallel) {
            sub->add_option("--workers", workers, "Worker threads")
                ->envname("MATCHDOPE_WORKERS")
                ->check(CLI::Range(size_t{1}, size_t{1024}));
        }
    };

    EvolveArgs ev;
    auto* evolve = app.add_subcommand("evolve", "Entropy time series of an ensemble of circuits");
    evolve->add_option("--n", ev.n, "Qubits")->capture_default_str();
    evolve->add_option("--depth", ev.depth, "Layers (0: 2n)")->capture_default_str();
    evolve->add_option("--p", ev.p, "Measurement probability per qubit and layer")->capture_default_str();
    evolve->add_option("--eta", ev.eta, "Doping amplitude")->capture_default_str();
    evolve->add_option("--beta", ev.beta, "Doping exponent, q = eta / n^beta")->capture_default_str();
    evolve->add_option("--shots", ev.shots, "Trajectories")->capture_default_str();
    evolve->add_option("--backend", ev.backend, "tableau or arc")->capture_default_str();
    evolve->add_option("--init", ev.init, "vacuum or random-gaussian")->capture_default_str();
    evolve->add_option("--seed", ev.seed, "Master seed")->capture_default_str();
    evolve->add_option("--cuts", ev.cuts, "half or all")->capture_default_str();
    evolve->add_option("--record-every", ev.record_every, "Recording stride (0: automatic)")->capture_default_str();
    add_common(evolve, true);

    PageArgs pg;
    auto* page = app.add_subcommand("page", "Late-time entropy of every block from random Gaussian states");
    page->add_option("--n", pg.n, "Qubits")->capture_default_str();
    page->add_option("--eta", pg.eta, "Doping amplitudes")->capture_default_str();
    page->add_option("--beta", pg.beta, "Doping exponent")->capture_default_str();
    page->add_option("--depth-multiple", pg.depth_multiple, "Evolution time in units of n")->capture_default_str();
    page->add_option("--shots", pg.shots, "Trajectories per doping")->capture_default_str();
    page->add_option("--clifford-shots", pg.clifford_shots, "Trajectories of the stabilizer reference (0: --shots)")
        ->capture_default_str();
    page->add_option("--seed", pg.seed, "Master seed")->capture_default_str();
    add_common(page, true);

    MasterEqArgs me;
    auto* mastereq = app.add_subcommand("mastereq", "Steady state of the arc-length master equation");
    mastereq->add_option("--p", me.p, "Measurement probability")->capture_default_str();
    mastereq->add_option("--L", me.L, "Half width of the length lattice")->capture_default_str();
    mastereq->add_option("--tol", me.tol, "Residual tolerance")->capture_default_str();
    mastereq->add_option("--max-iterations", me.max_iterations, "Iteration cap")->capture_default_str();
    mastereq->add_option("--sizes", me.sizes, "Chain lengths of the entropy table (default: doublings from 16)");
    add_common(mastereq, false);

    CollapseArgs co;
    auto* collapse = app.add_subcommand("collapse", "Finite-size scaling collapse of half-chain entropies");
    collapse->add_option("--input", co.input, "evolve CSV files, one per (p, n)")->required();
    collapse->add_option("--pc-grid", co.pc_grid, "lo:hi:steps")->capture_default_str();
    collapse->add_option("--nu-grid", co.nu_grid, "lo:hi:steps")->capture_default_str();
    collapse->add_option("--a-grid", co.a_grid, "lo:hi:steps")->capture_default_str();
    collapse->add_option("--bootstrap", co.bootstrap, "Bootstrap replicates")->capture_default_str();
    collapse->add_option("--seed", co.seed, "Bootstrap seed")->capture_default_str();
    add_common(collapse, true);

    std::string manifest_path;
    std::string replay_workers;
    auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
    replay->add_option("manifest", manifest_path, "Manifest JSON")->required();
    replay->add_option("--out", out, "Output path")->required();
    replay->add_option("--workers", replay_workers, "Worker threads")->envname("MATCHDOPE_WORKERS");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (evolve->parsed()) return run_evolve(ev, out, workers);
    if (page->parsed()) return run_page(pg, out, workers);
    if (mastereq->parsed()) return run_mastereq(me, out);
    if (collapse->parsed()) return run_collapse(co, out, workers);
    if (replay->parsed()) return run_replay(manifest_path, out, replay_workers);
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(std::move(args));
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
}
