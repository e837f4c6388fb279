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
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "matchdope/errors.hpp"
#include "matchdope/gates.hpp"
#include "matchdope/rng.hpp"

namespace matchdope {

/// New position of Majorana point `point` after a gate on qubits (site, site+1)
/// relabels the window [2 site, 2 site + 4) by sigma.
inline uint32_t permute_point(uint32_t point, size_t site, const Permutation4& sigma) {
    uint32_t base = static_cast<uint32_t>(2 * site);
    if (point >= base && point < base + 4) {
        return base + sigma[point - base];
    }
    return point;
}

/// Perfect pairing of the 2n Majorana points of a Gaussian stabilizer state.
///
/// Point mu (0-based) sits on qubit mu / 2. Cut c in [1, n-1] separates
/// qubits [0, c) from [c, n), i.e. points [0, 2c) from the rest. The number
/// of arcs crossing every cut is cached and updated per event.
class ArcConfiguration {
   public:
    ArcConfiguration() = default;

    /// Local arcs (2i, 2i+1): the vacuum, stabilized by Z_i = -i gamma_2i gamma_2i+1.
    static ArcConfiguration local(size_t n) {
        require(n >= 1, "arc configuration needs at least one qubit");
        std::vector<uint32_t> partner(2 * n);
        for (uint32_t i = 0; i < 2 * n; ++i) {
            partner[i] = i ^ 1u;
        }
        return ArcConfiguration(std::move(partner));
    }

    /// Uniform over all (2n)!/(n! 2^n) pairings.
    static ArcConfiguration random_pairing(size_t n, RandomStream& rng) {
        require(n >= 1, "arc configuration needs at least one qubit");
        std::vector<uint32_t> unpaired(2 * n);
        std::iota(unpaired.begin(), unpaired.end(), 0u);
        std::vector<uint32_t> partner(2 * n);
        // Pair the lowest unpaired point with a uniformly chosen remaining one.
        std::reverse(unpaired.begin(), unpaired.end());
        while (!unpaired.empty()) {
            uint32_t a = unpaired.back();
            unpaired.pop_back();
            size_t pick = rng.below(unpaired.size());
            uint32_t b = unpaired[pick];
            unpaired.erase(unpaired.begin() + static_cast<std::ptrdiff_t>(pick));
            partner[a] = b;
            partner[b] = a;
        }
        return ArcConfiguration(std::move(partner));
    }

    /// Validates and adopts an explicit pairing.
    static ArcConfiguration from_partners(std::vector<uint32_t> partner) {
        require(!partner.empty() && partner.size() % 2 == 0, "pairing needs an even, nonzero number of points");
        for (uint32_t a = 0; a < partner.size(); ++a) {
            require(partner[a] < partner.size() && partner[a] != a && partner[partner[a]] == a,
                    "partner table is not a fixed-point-free involution");
        }
        return ArcConfiguration(std::move(partner));
    }

    size_t num_qubits() const { return partner_.size() / 2; }
    size_t num_points() const { return partner_.size(); }
    uint32_t partner(size_t point) const { return partner_[point]; }
    const std::vector<uint32_t>& partners() const { return partner_; }

    /// Arcs as (low, high) pairs, sorted.
    std::vector<std::pair<uint32_t, uint32_t>> arcs() const {
        std::vector<std::pair<uint32_t, uint32_t>> out;
        for (uint32_t a = 0; a < partner_.size(); ++a) {
            if (a < partner_[a]) {
                out.emplace_back(a, partner_[a]);
            }
        }
        return out;
    }

    /// Gate on qubits (site, site+1) acting as the endpoint permutation sigma.
    void apply_permutation(size_t site, const Permutation4& sigma) {
        require(site + 1 < num_qubits(), "gate site out of range");
        uint32_t base = static_cast<uint32_t>(2 * site);
        uint32_t cut_point = base + 2;
        std::array<uint32_t, 4> old;
        for (uint32_t k = 0; k < 4; ++k) {
            old[k] = partner_[base + k];
        }
        int delta = 0;
        for (uint32_t k = 0; k < 4; ++k) {
            uint32_t a = base + k, b = old[k];
            bool inside = b >= base && b < base + 4;
            if (inside && b < a) {
                continue;
            }
            uint32_t a2 = permute_point(a, site, sigma), b2 = permute_point(b, site, sigma);
            delta += static_cast<int>((a2 < cut_point) != (b2 < cut_point)) -
                     static_cast<int>((a < cut_point) != (b < cut_point));
        }
        for (uint32_t k = 0; k < 4; ++k) {
            uint32_t b = old[k];
            uint32_t a2 = base + sigma[k];
            uint32_t b2 = permute_point(b, site, sigma);
            partner_[a2] = b2;
            partner_[b2] = a2;
        }
        crossings_[site + 1] += delta;
    }

    /// Z measurement on qubit `site`: the arcs (2i, j) and (2i+1, k) become
    /// (j, k) and (2i, 2i+1). Independent of the outcome.
    void measure(size_t site) {
        require(site < num_qubits(), "measured qubit out of range");
        uint32_t a = static_cast<uint32_t>(2 * site), b = a + 1;
        uint32_t j = partner_[a];
        if (j == b) {
            return;
        }
        uint32_t k = partner_[b];
        add_arc_to_profile(a, j, -1);
        add_arc_to_profile(b, k, -1);
        add_arc_to_profile(j, k, +1);
        partner_[j] = k;
        partner_[k] = j;
        partner_[a] = b;
        partner_[b] = a;
    }

    /// Cached entropy in bits across cut c (0 and n allowed, giving 0).
    int entropy(size_t cut) const {
        require(cut <= num_qubits(), "cut out of range");
        return crossings_[cut] / 2;
    }
    int crossings(size_t cut) const { return crossings_[cut]; }

    /// Recounts crossing arcs at cut c from scratch; half of that count.
    int entropy_from_arcs(size_t cut) const {
        require(cut >= 1 && cut < num_qubits(), "cut out of range");
        uint32_t boundary = static_cast<uint32_t>(2 * cut);
        int count = 0;
        for (uint32_t a = 0; a < boundary; ++a) {
            count += partner_[a] >= boundary;
        }
        ensure(count % 2 == 0, "odd number of arcs across a cut");
        return count / 2;
    }

    /// Involution, no fixed points, even crossings, cache consistent with a recount.
    void check_invariants() const {
        for (uint32_t a = 0; a < partner_.size(); ++a) {
            ensure(partner_[a] < partner_.size() && partner_[a] != a && partner_[partner_[a]] == a,
                   "partner table is not a fixed-point-free involution");
        }
        auto fresh = recount();
        for (size_t c = 0; c < fresh.size(); ++c) {
            ensure(fresh[c] % 2 == 0, "odd number of arcs across a cut");
            ensure(fresh[c] == crossings_[c], "cached crossing counts drifted");
        }
    }

    bool operator==(const ArcConfiguration& other) const { return partner_ == other.partner_; }

   private:
    explicit ArcConfiguration(std::vector<uint32_t> partner) : partner_(std::move(partner)) {
        crossings_ = recount();
    }

    std::vector<int> recount() const {
        size_t n = num_qubits();
        std::vector<int> diff(n + 2, 0);
        for (uint32_t a = 0; a < partner_.size(); ++a) {
            uint32_t b = partner_[a];
            if (a < b) {
                diff[a / 2 + 1] += 1;
                diff[b / 2 + 1] -= 1;
            }
        }
        std::vector<int> out(n + 1, 0);
        int running = 0;
        for (size_t c = 0; c <= n; ++c) {
            running += diff[c];
            out[c] = running;
        }
        return out;
    }

    /// Arc (u, v) crosses the cuts c with min < 2c <= max.
    void add_arc_to_profile(uint32_t u, uint32_t v, int weight) {
        if (u > v) std::swap(u, v);
        for (size_t c = u / 2 + 1; c <= v / 2; ++c) {
            crossings_[c] += weight;
        }
    }

    std::vector<uint32_t> partner_;
    std::vector<int> crossings_;
};

}  // namespace matchdope
