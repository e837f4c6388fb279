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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "matchdope/arcs.hpp"
#include "matchdope/errors.hpp"
#include "matchdope/gates.hpp"
#include "matchdope/pauli.hpp"
#include "matchdope/rng.hpp"
#include "matchdope/tableau.hpp"

namespace matchdope {

enum class Backend { Tableau, Arc };
enum class InitialState { Vacuum, RandomGaussian };

inline const char* to_string(Backend b) { return b == Backend::Tableau ? "tableau" : "arc"; }
inline const char* to_string(InitialState s) { return s == InitialState::Vacuum ? "vacuum" : "random-gaussian"; }

/// Per-gate doping probability q = min(eta / n^beta, 1).
inline double doping_probability(double eta, double beta, size_t n) {
    require(eta >= 0 && beta >= 0, "eta and beta must be nonnegative");
    require(n >= 2, "doping needs at least two qubits");
    return std::min(eta / std::pow(static_cast<double>(n), beta), 1.0);
}

/// Times at which entropies are recorded. stride 0 picks every layer up to
/// depth 1000 and sqrt(t)-spaced layers beyond.
inline std::vector<size_t> recording_times(size_t depth, size_t stride) {
    std::vector<size_t> out;
    if (stride > 0) {
        for (size_t t = stride; t <= depth; t += stride) {
            out.push_back(t);
        }
    } else if (depth <= 1000) {
        for (size_t t = 1; t <= depth; ++t) {
            out.push_back(t);
        }
    } else {
        for (size_t t = 1; t <= depth;) {
            out.push_back(t);
            t += std::max<size_t>(1, static_cast<size_t>(std::sqrt(static_cast<double>(t))));
        }
    }
    if (!out.empty() && out.back() != depth) {
        out.push_back(depth);
    }
    if (out.empty() && depth > 0) {
        out.push_back(depth);
    }
    return out;
}

struct CircuitConfig {
    size_t n = 16;
    size_t depth = 16;
    double p = 0.0;
    double eta = 0.0;
    double beta = 1.0;
    InitialState initial_state = InitialState::Vacuum;
    Backend backend = Backend::Tableau;
    std::vector<size_t> cuts;
    size_t record_every = 0;
    /// Explicit recording times; overrides record_every when nonempty.
    std::vector<size_t> record_at;

    double q() const { return doping_probability(eta, beta, n); }

    void validate() const {
        require(n >= 2, "circuit needs at least two qubits");
        require(p >= 0 && p <= 1, "measurement probability must lie in [0, 1]");
        require(eta >= 0 && beta >= 0, "eta and beta must be nonnegative");
        require(backend != Backend::Arc || eta == 0, "the arc backend is exact only for Gaussian circuits (eta = 0)");
        require(!cuts.empty(), "at least one cut must be recorded");
        for (size_t c : cuts) {
            require(c >= 1 && c < n, "cuts must lie in [1, n-1]");
        }
        for (size_t t : record_at) {
            require(t >= 1 && t <= depth, "recording times must lie in [1, depth]");
        }
    }

    std::vector<size_t> times() const {
        if (!record_at.empty()) {
            std::vector<size_t> out = record_at;
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
        return recording_times(depth, record_every);
    }

    uint64_t fingerprint_hash() const {
        std::string text = fingerprint();
        Fnv1a h;
        h.add_bytes(text.data(), text.size());
        return h.value();
    }

    /// Canonical text of every field that influences a trajectory.
    std::string fingerprint() const {
        std::ostringstream os;
        os.precision(17);
        os << "n=" << n << ";depth=" << depth << ";p=" << p << ";eta=" << eta << ";beta=" << beta
           << ";init=" << to_string(initial_state) << ";backend=" << to_string(backend) << ";cuts=";
        for (size_t c : cuts) os << c << ',';
        os << ";times=";
        for (size_t t : times()) os << t << ',';
        return os.str();
    }
};

inline std::vector<size_t> half_cut(size_t n) { return {n / 2}; }
inline std::vector<size_t> all_cuts(size_t n) {
    std::vector<size_t> out;
    for (size_t c = 1; c < n; ++c) out.push_back(c);
    return out;
}

/// One gate of a brickwall layer. `index` points into GateSets::clifford() when
/// `from_clifford` is set and into GateSets::gaussian() otherwise.
struct GateSlot {
    uint32_t site = 0;
    bool from_clifford = false;
    uint16_t index = 0;
};

/// Layer t >= 1: odd t covers (0,1), (2,3), ...; even t covers (1,2), (3,4), ...
/// Open boundaries. Each gate comes from C2 with probability q, else CG2.
inline std::vector<GateSlot> build_unitary_layer(size_t t, size_t n, double q, RandomStream& choice,
                                                 RandomStream& identity) {
    const auto& sets = GateSets::get();
    std::vector<GateSlot> out;
    out.reserve(n / 2);
    for (size_t site = (t % 2 == 1) ? 0 : 1; site + 1 < n; site += 2) {
        GateSlot slot;
        slot.site = static_cast<uint32_t>(site);
        slot.from_clifford = q > 0 && choice.bernoulli(q);
        slot.index = static_cast<uint16_t>(slot.from_clifford ? sets.sample_clifford_index(identity)
                                                              : sets.sample_gaussian_index(identity));
        out.push_back(slot);
    }
    return out;
}

inline const CliffordGate2& gate_of(const GateSlot& slot) {
    const auto& sets = GateSets::get();
    return slot.from_clifford ? sets.clifford()[slot.index] : sets.gaussian()[slot.index];
}

/// Qubits measured in one layer: independent Bernoulli(p) per qubit.
inline std::vector<uint32_t> measurement_sites(size_t n, double p, RandomStream& sites) {
    std::vector<uint32_t> out;
    if (p <= 0) {
        return out;
    }
    for (size_t q = 0; q < n; ++q) {
        if (p >= 1 || sites.bernoulli(p)) {
            out.push_back(static_cast<uint32_t>(q));
        }
    }
    return out;
}

/// Stabilizers i*gamma_a*gamma_b, one per arc, with the given sign bits
/// (sign bit k belongs to the k-th arc in ascending order of its lower end).
inline StabilizerTableau tableau_from_arcs(const ArcConfiguration& arcs, const std::vector<bool>& negative) {
    auto pairs = arcs.arcs();
    require(negative.size() == pairs.size(), "one sign per arc is required");
    std::vector<PauliString> gens;
    gens.reserve(pairs.size());
    for (size_t k = 0; k < pairs.size(); ++k) {
        gens.push_back(majorana_bilinear(arcs.num_qubits(), pairs[k].first, pairs[k].second, negative[k]));
    }
    return StabilizerTableau::from_stabilizers(gens);
}

/// Tableau-backed state driven by circuit layers.
class TableauState {
   public:
    explicit TableauState(StabilizerTableau tab) : tab_(std::move(tab)) {}

    void apply(const GateSlot& slot) { tab_.apply_two_qubit(gate_of(slot).table(), slot.site); }
    bool measure(size_t q, RandomStream& outcomes) { return tab_.measure_z(q, outcomes.coin()).outcome; }

    void entropies(const std::vector<size_t>& cuts, int* out) const {
        if (cuts.size() == 1) {
            out[0] = tab_.entanglement_entropy(0, cuts[0]);
            return;
        }
        auto profile = tab_.entropy_profile();
        for (size_t k = 0; k < cuts.size(); ++k) {
            out[k] = profile[cuts[k]];
        }
    }

    const StabilizerTableau& tableau() const { return tab_; }

   private:
    StabilizerTableau tab_;
};

/// Arc-backed state. Only Gaussian gates are accepted.
class ArcState {
   public:
    explicit ArcState(ArcConfiguration arcs) : arcs_(std::move(arcs)) {}

    void apply(const GateSlot& slot) {
        ensure(!slot.from_clifford, "arc backend received a non-Gaussian gate");
        arcs_.apply_permutation(slot.site, GateSets::get().arc_permutation(slot.index));
    }
    bool measure(size_t q, RandomStream&) {
        arcs_.measure(q);
        return false;
    }
    void entropies(const std::vector<size_t>& cuts, int* out) const {
        for (size_t k = 0; k < cuts.size(); ++k) {
            out[k] = arcs_.entropy(cuts[k]);
        }
    }

    const ArcConfiguration& arcs() const { return arcs_; }

   private:
    ArcConfiguration arcs_;
};

/// Result of one circuit realization.
struct TrajectoryRecord {
    uint64_t seed = 0;
    /// Hash of CircuitConfig::fingerprint() of the generating config.
    uint64_t config_hash = 0;
    std::vector<size_t> times;
    std::vector<size_t> cuts;
    /// entropies[ti * cuts.size() + ci], in bits.
    std::vector<int32_t> entropies;
    /// Running count of gates drawn from C2, at each recorded time.
    std::vector<uint32_t> n_ng;
    uint64_t outcomes_digest = 0;
    uint64_t gates_applied = 0;
    uint64_t measurements = 0;

    int entropy(size_t ti, size_t ci) const { return entropies[ti * cuts.size() + ci]; }
    uint32_t final_n_ng() const { return n_ng.empty() ? 0 : n_ng.back(); }
    bool operator==(const TrajectoryRecord&) const = default;
};

/// Random Gaussian stabilizer state: uniform pairing, then a uniform sign per arc.
inline ArcConfiguration random_gaussian_arcs(size_t n, RandomStream& init) {
    return ArcConfiguration::random_pairing(n, init);
}

inline StabilizerTableau random_gaussian_stabilizer_init(size_t n, RandomStream& init) {
    ArcConfiguration arcs = random_gaussian_arcs(n, init);
    std::vector<bool> negative(n);
    for (size_t k = 0; k < n; ++k) {
        negative[k] = init.coin();
    }
    return tableau_from_arcs(arcs, negative);
}

namespace detail {

template <class State>
TrajectoryRecord run_with_state(const CircuitConfig& cfg, uint64_t seed, State& state) {
    RandomStream choice(seed, StreamId::GateChoice);
    RandomStream identity(seed, StreamId::GateIdentity);
    RandomStream sites(seed, StreamId::MeasureSites);
    RandomStream outcomes(seed, StreamId::MeasureOutcomes);
    const double q = cfg.q();

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.config_hash = cfg.fingerprint_hash();
    rec.times = cfg.times();
    rec.cuts = cfg.cuts;
    rec.entropies.resize(rec.times.size() * rec.cuts.size());
    rec.n_ng.resize(rec.times.size());
    Fnv1a digest;
    uint32_t n_ng = 0;
    size_t next = 0;
    for (size_t t = 1; t <= cfg.depth && next < rec.times.size(); ++t) {
        for (const GateSlot& slot : build_unitary_layer(t, cfg.n, q, choice, identity)) {
            state.apply(slot);
            n_ng += slot.from_clifford;
            ++rec.gates_applied;
        }
        for (uint32_t site : measurement_sites(cfg.n, cfg.p, sites)) {
            bool outcome = state.measure(site, outcomes);
            digest.add((static_cast<uint64_t>(t) << 33) | (static_cast<uint64_t>(site) << 1) | outcome);
            ++rec.measurements;
        }
        if (rec.times[next] == t) {
            state.entropies(rec.cuts, &rec.entropies[next * rec.cuts.size()]);
            rec.n_ng[next] = n_ng;
            ++next;
        }
    }
    rec.outcomes_digest = digest.value();
    return rec;
}

}  // namespace detail

/// One realization of the monitored doped circuit. A pure function of (cfg, seed).
/// One step = one unitary layer followed by one measurement layer.
inline TrajectoryRecord run_trajectory(const CircuitConfig& cfg, uint64_t seed) {
    cfg.validate();
    RandomStream init(seed, StreamId::Initial);
    if (cfg.backend == Backend::Arc) {
        ArcState state(cfg.initial_state == InitialState::Vacuum ? ArcConfiguration::local(cfg.n)
                                                                 : random_gaussian_arcs(cfg.n, init));
        return detail::run_with_state(cfg, seed, state);
    }
    TableauState state(cfg.initial_state == InitialState::Vacuum ? StabilizerTableau(cfg.n)
                                                                 : random_gaussian_stabilizer_init(cfg.n, init));
    return detail::run_with_state(cfg, seed, state);
}

}  // namespace matchdope
