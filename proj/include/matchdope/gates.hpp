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
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "matchdope/errors.hpp"
#include "matchdope/pauli.hpp"
#include "matchdope/rng.hpp"
#include "matchdope/tableau.hpp"

namespace matchdope {

/// Two-qubit Pauli with a power of i. Bit 0 of x/z is the first qubit.
/// The operator is i^phase * H(x, z), H Hermitian (Y = iXZ).
struct LocalPauli {
    uint8_t x = 0;
    uint8_t z = 0;
    uint8_t phase = 0;

    static constexpr LocalPauli from_index(unsigned idx) {
        return {static_cast<uint8_t>(idx & 3), static_cast<uint8_t>((idx >> 2) & 3), 0};
    }
    constexpr unsigned index() const { return x | (z << 2); }
    constexpr bool hermitian() const { return (phase & 1) == 0; }
    constexpr bool negative() const { return (phase & 3) == 2; }
    constexpr bool is_identity() const { return x == 0 && z == 0; }

    constexpr LocalPauli operator*(const LocalPauli& rhs) const {
        int ph = phase + rhs.phase + product_phase_word(x, z, rhs.x, rhs.z);
        return {static_cast<uint8_t>(x ^ rhs.x), static_cast<uint8_t>(z ^ rhs.z), static_cast<uint8_t>(ph & 3)};
    }
    constexpr LocalPauli times_i(int k) const {
        return {x, z, static_cast<uint8_t>((phase + k) & 3)};
    }
    constexpr LocalPauli negated() const { return times_i(2); }
    constexpr bool operator==(const LocalPauli&) const = default;

    std::string str() const {
        static constexpr const char* kPhase[] = {"+", "+i", "-", "-i"};
        std::string out = kPhase[phase & 3];
        for (int q = 0; q < 2; ++q) {
            out += "IZXY"[(((x >> q) & 1) ? 2 : 0) + (((z >> q) & 1) ? 1 : 0)];
        }
        return out;
    }
};

inline constexpr bool symplectic_product(const LocalPauli& a, const LocalPauli& b) {
    return (std::popcount(static_cast<unsigned>((a.x & b.z) ^ (a.z & b.x))) & 1) != 0;
}

/// The four local Majoranas gamma_0..3 of a qubit pair: X_a, Y_a, Z_a X_b, Z_a Y_b.
inline constexpr std::array<LocalPauli, 4> kLocalMajorana = {{
    {0b01, 0b00, 0},
    {0b01, 0b01, 0},
    {0b10, 0b01, 0},
    {0b10, 0b11, 0},
}};

/// Generators X_a, Z_a, X_b, Z_b, in the order images are stored.
inline constexpr std::array<LocalPauli, 4> kLocalGenerators = {{
    {0b01, 0b00, 0},
    {0b00, 0b01, 0},
    {0b10, 0b00, 0},
    {0b00, 0b10, 0},
}};

using Permutation4 = std::array<uint8_t, 4>;

inline int permutation_parity(const Permutation4& p) {
    int inversions = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            inversions += p[i] > p[j];
        }
    }
    return (inversions & 1) ? -1 : 1;
}

inline bool is_permutation4(const Permutation4& p) {
    unsigned seen = 0;
    for (auto v : p) {
        if (v >= 4) {
            return false;
        }
        seen |= 1u << v;
    }
    return seen == 0xF;
}

inline Permutation4 inverse(const Permutation4& p) {
    Permutation4 out{};
    for (uint8_t i = 0; i < 4; ++i) {
        out[p[i]] = i;
    }
    return out;
}

/// gamma_mu -> (negative[mu] ? -1 : 1) * gamma_{perm[mu]}, restricted to SO(4).
struct SignedMajoranaPermutation {
    Permutation4 perm{0, 1, 2, 3};
    std::array<bool, 4> negative{};

    bool in_so4() const {
        if (!is_permutation4(perm)) {
            return false;
        }
        int sign = permutation_parity(perm);
        for (bool neg : negative) {
            sign = neg ? -sign : sign;
        }
        return sign == 1;
    }

    LocalPauli image(size_t mu) const {
        LocalPauli g = kLocalMajorana[perm[mu]];
        return negative[mu] ? g.negated() : g;
    }
};

/// Two-qubit Clifford modulo global phase, stored as the images of
/// X_a, Z_a, X_b, Z_b under P -> U P U^dagger.
class CliffordGate2 {
   public:
    /// The identity gate.
    CliffordGate2() : CliffordGate2(kLocalGenerators, Unchecked{}) {}

    /// Validates that the images are Hermitian and preserve the symplectic form.
    static CliffordGate2 from_images(const std::array<LocalPauli, 4>& images) {
        for (const auto& p : images) {
            require(p.hermitian() && !p.is_identity(), "gate images must be Hermitian non-identity Paulis");
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                bool anti = symplectic_product(images[i], images[j]);
                bool expect = (i == 0 && j == 1) || (i == 2 && j == 3);
                require(anti == expect, "gate images do not preserve the symplectic form");
            }
        }
        return CliffordGate2(images, Unchecked{});
    }

    const std::array<LocalPauli, 4>& images() const { return images_; }
    const LocalConjugationTable& table() const { return table_; }

    /// U P U^dagger for an arbitrary phased local Pauli.
    LocalPauli conjugate(const LocalPauli& p) const {
        uint8_t entry = table_[p.index()];
        return {static_cast<uint8_t>(entry & 3), static_cast<uint8_t>((entry >> 2) & 3),
                static_cast<uint8_t>((p.phase + ((entry & 0x10) ? 2 : 0)) & 3)};
    }

    /// The gate that applies *this first and `next` second.
    CliffordGate2 then(const CliffordGate2& next) const {
        std::array<LocalPauli, 4> out;
        for (int k = 0; k < 4; ++k) {
            out[k] = next.conjugate(images_[k]);
        }
        return CliffordGate2(out, Unchecked{});
    }

    CliffordGate2 inverse() const {
        // Solve for the preimages of the generators by scanning the 16 entries.
        std::array<LocalPauli, 4> out;
        for (int k = 0; k < 4; ++k) {
            for (unsigned idx = 1; idx < 16; ++idx) {
                LocalPauli img = conjugate(LocalPauli::from_index(idx));
                if (img.x == kLocalGenerators[k].x && img.z == kLocalGenerators[k].z) {
                    out[k] = LocalPauli::from_index(idx).times_i(img.phase);
                    break;
                }
            }
        }
        return CliffordGate2(out, Unchecked{});
    }

    /// Packs the signed images into 20 bits; equal keys iff equal gates.
    uint32_t key() const {
        uint32_t k = 0;
        for (int i = 0; i < 4; ++i) {
            k |= static_cast<uint32_t>(images_[i].index() | (images_[i].negative() ? 16 : 0)) << (5 * i);
        }
        return k;
    }

    bool operator==(const CliffordGate2& other) const { return images_ == other.images_; }

    std::string str() const {
        static constexpr const char* kNames[] = {"Xa", "Za", "Xb", "Zb"};
        std::string out;
        for (int k = 0; k < 4; ++k) {
            out += std::string(kNames[k]) + "->" + images_[k].str() + (k < 3 ? " " : "");
        }
        return out;
    }

   private:
    struct Unchecked {};

    CliffordGate2(const std::array<LocalPauli, 4>& images, Unchecked) : images_(images) {
        table_[0] = 0;
        for (unsigned idx = 1; idx < 16; ++idx) {
            // H(x, z) = i^{#Y} X_a^xa Z_a^za X_b^xb Z_b^zb, mapped factor by factor.
            LocalPauli p = LocalPauli::from_index(idx);
            int ys = std::popcount(static_cast<unsigned>(p.x & p.z));
            LocalPauli img{0, 0, static_cast<uint8_t>(ys & 3)};
            for (int q = 0; q < 2; ++q) {
                if ((p.x >> q) & 1) {
                    img = img * images_[2 * q];
                }
                if ((p.z >> q) & 1) {
                    img = img * images_[2 * q + 1];
                }
            }
            ensure(img.hermitian(), "conjugated Hermitian Pauli is not Hermitian");
            table_[idx] = static_cast<uint8_t>(img.index() | (img.negative() ? 0x10 : 0));
        }
    }

    std::array<LocalPauli, 4> images_;
    LocalConjugationTable table_{};
};

/// Builds the Clifford realizing a signed Majorana permutation.
inline CliffordGate2 signed_perm_to_gate(const SignedMajoranaPermutation& q) {
    require(q.in_so4(), "signed permutation is not in SO(4)");
    LocalPauli g0 = q.image(0), g1 = q.image(1), g2 = q.image(2), g3 = q.image(3);
    // X_a = g0, Z_a = -i g0 g1, X_b = -i g0 g1 g2, Z_b = -i g2 g3.
    std::array<LocalPauli, 4> images = {
        g0,
        (g0 * g1).times_i(3),
        (g0 * g1 * g2).times_i(3),
        (g2 * g3).times_i(3),
    };
    return CliffordGate2::from_images(images);
}

/// Conjugation image of each local Majorana if it is +-(single Majorana).
/// Parity-odd Cliffords such as X_a also qualify here; their signed
/// permutation has determinant -1.
inline std::optional<SignedMajoranaPermutation> majorana_action(const CliffordGate2& g) {
    SignedMajoranaPermutation out;
    for (size_t mu = 0; mu < 4; ++mu) {
        LocalPauli img = g.conjugate(kLocalMajorana[mu]);
        bool matched = false;
        for (uint8_t nu = 0; nu < 4; ++nu) {
            if (img.x == kLocalMajorana[nu].x && img.z == kLocalMajorana[nu].z) {
                out.perm[mu] = nu;
                out.negative[mu] = img.negative();
                matched = true;
                break;
            }
        }
        if (!matched) {
            return std::nullopt;
        }
    }
    return out;
}

/// Clifford matchgate: a signed Majorana permutation in SO(4).
inline bool is_gaussian(const CliffordGate2& g) {
    auto action = majorana_action(g);
    return action.has_value() && action->in_so4();
}

/// Arc-endpoint permutation of a Gaussian gate: gamma_mu -> +-gamma_{sigma(mu)}.
inline Permutation4 gate_to_arc_permutation(const CliffordGate2& g) {
    auto action = majorana_action(g);
    require(action.has_value() && action->in_so4(), "gate is not Gaussian");
    return action->perm;
}

inline std::vector<Permutation4> all_permutations4() {
    std::vector<Permutation4> out;
    Permutation4 p{0, 1, 2, 3};
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// All 192 Clifford matchgates, ordered by (permutation, sign pattern).
inline std::vector<CliffordGate2> enumerate_cg2() {
    std::vector<CliffordGate2> out;
    for (const auto& perm : all_permutations4()) {
        for (unsigned signs = 0; signs < 16; ++signs) {
            SignedMajoranaPermutation q{perm, {(signs & 1) != 0, (signs & 2) != 0, (signs & 4) != 0, (signs & 8) != 0}};
            if (q.in_so4()) {
                out.push_back(signed_perm_to_gate(q));
            }
        }
    }
    return out;
}

/// The 720 elements of Sp(4, 2) as unsigned image index quadruples.
inline std::vector<std::array<uint8_t, 4>> enumerate_symplectic4() {
    std::vector<std::array<uint8_t, 4>> out;
    auto omega = [](unsigned a, unsigned b) {
        return symplectic_product(LocalPauli::from_index(a), LocalPauli::from_index(b));
    };
    for (unsigned xa = 1; xa < 16; ++xa) {
        for (unsigned za = 1; za < 16; ++za) {
            if (!omega(xa, za)) continue;
            for (unsigned xb = 1; xb < 16; ++xb) {
                if (omega(xa, xb) || omega(za, xb)) continue;
                for (unsigned zb = 1; zb < 16; ++zb) {
                    if (omega(xa, zb) || omega(za, zb) || !omega(xb, zb)) continue;
                    out.push_back({static_cast<uint8_t>(xa), static_cast<uint8_t>(za), static_cast<uint8_t>(xb),
                                   static_cast<uint8_t>(zb)});
                }
            }
        }
    }
    return out;
}

/// All 11520 two-qubit Cliffords modulo phase: Sp(4, 2) times 16 sign patterns.
inline std::vector<CliffordGate2> enumerate_c2() {
    std::vector<CliffordGate2> out;
    for (const auto& sym : enumerate_symplectic4()) {
        for (unsigned signs = 0; signs < 16; ++signs) {
            std::array<LocalPauli, 4> images;
            for (int k = 0; k < 4; ++k) {
                images[k] = LocalPauli::from_index(sym[k]).times_i(((signs >> k) & 1) ? 2 : 0);
            }
            out.push_back(CliffordGate2::from_images(images));
        }
    }
    return out;
}

/// Immutable gate tables shared by every trajectory. Built once on first use.
class GateSets {
   public:
    static constexpr size_t kNumGaussian = 192;
    static constexpr size_t kNumClifford = 11520;

    static const GateSets& get() {
        static const GateSets instance;
        return instance;
    }

    const std::vector<CliffordGate2>& gaussian() const { return cg2_; }
    const std::vector<CliffordGate2>& clifford() const { return c2_; }
    const Permutation4& arc_permutation(size_t gaussian_index) const { return arc_perm_[gaussian_index]; }
    bool clifford_is_gaussian(size_t clifford_index) const { return c2_gaussian_[clifford_index] != 0; }

    /// Index into gaussian() of a gate, if it is a Clifford matchgate.
    std::optional<size_t> find_gaussian(const CliffordGate2& g) const {
        auto it = cg2_index_.find(g.key());
        if (it == cg2_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<size_t> find_clifford(const CliffordGate2& g) const {
        auto it = c2_index_.find(g.key());
        if (it == c2_index_.end()) return std::nullopt;
        return it->second;
    }

    size_t sample_gaussian_index(RandomStream& rng) const { return rng.below(kNumGaussian); }
    size_t sample_clifford_index(RandomStream& rng) const { return rng.below(kNumClifford); }
    const CliffordGate2& sample_cg2(RandomStream& rng) const { return cg2_[sample_gaussian_index(rng)]; }
    const CliffordGate2& sample_c2(RandomStream& rng) const { return c2_[sample_clifford_index(rng)]; }

   private:
    GateSets() : cg2_(enumerate_cg2()), c2_(enumerate_c2()) {
        ensure(cg2_.size() == kNumGaussian, "wrong number of Clifford matchgates");
        ensure(c2_.size() == kNumClifford, "wrong number of two-qubit Cliffords");
        for (size_t i = 0; i < cg2_.size(); ++i) {
            cg2_index_.emplace(cg2_[i].key(), i);
            arc_perm_.push_back(gate_to_arc_permutation(cg2_[i]));
        }
        for (size_t i = 0; i < c2_.size(); ++i) {
            c2_index_.emplace(c2_[i].key(), i);
            c2_gaussian_.push_back(is_gaussian(c2_[i]) ? 1 : 0);
        }
        ensure(cg2_index_.size() == kNumGaussian && c2_index_.size() == kNumClifford, "duplicate gates in tables");
    }

    std::vector<CliffordGate2> cg2_;
    std::vector<CliffordGate2> c2_;
    std::vector<Permutation4> arc_perm_;
    std::vector<uint8_t> c2_gaussian_;
    std::unordered_map<uint32_t, size_t> cg2_index_;
    std::unordered_map<uint32_t, size_t> c2_index_;
};

/// Conjugates the state by `gate` on qubits (site, site+1).
inline void apply_gate(StabilizerTableau& tab, const CliffordGate2& gate, size_t site) {
    tab.apply_two_qubit(gate.table(), site);
}

}  // namespace matchdope
