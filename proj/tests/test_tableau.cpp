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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "matchdope/gates.hpp"
#include "matchdope/pauli.hpp"
#include "matchdope/rng.hpp"
#include "matchdope/tableau.hpp"
#include "support/statevector.hpp"

namespace matchdope {
namespace {

using testing::gate_unitary;
using testing::StateVector;

StabilizerTableau random_clifford_state(size_t n, size_t layers, RandomStream& rng) {
    StabilizerTableau tab(n);
    const auto& sets = GateSets::get();
    for (size_t l = 0; l < layers; ++l) {
        size_t site = rng.below(n - 1);
        apply_gate(tab, sets.sample_c2(rng), site);
    }
    return tab;
}

TEST(PauliString, ParseAndPrint) {
    auto p = PauliString::parse("-XYZI");
    EXPECT_EQ(p.str(), "-XYZI");
    EXPECT_EQ(p.weight(), 3u);
    EXPECT_TRUE(p.negative());
}

TEST(PauliString, ProductPhases) {
    // X * Y = iZ.
    auto x = PauliString::parse("X");
    EXPECT_EQ(x.multiply_right(PauliString::parse("Y")), 1);
    EXPECT_EQ(x.str(), "+Z");
    // Y * X = -iZ = i * (-Z).
    auto y = PauliString::parse("Y");
    EXPECT_EQ(y.multiply_right(PauliString::parse("X")), 1);
    EXPECT_EQ(y.str(), "-Z");
    // XX * ZZ = (XZ)(XZ) = (-iY)(-iY) = -YY.
    auto xx = PauliString::parse("XX");
    EXPECT_EQ(xx.multiply_right(PauliString::parse("ZZ")), 0);
    EXPECT_EQ(xx.str(), "-YY");
}

TEST(PauliString, JordanWignerBilinear) {
    // i gamma_0 gamma_1 = i X (Y) = i (iZ) = -Z.
    EXPECT_EQ(majorana_bilinear(2, 0, 1).str(), "-ZI");
    EXPECT_EQ(majorana_bilinear(2, 0, 1, true).str(), "+ZI");
    // i Y_0 (Z_0 Z_1 X_2) = i (i X_0) Z_1 X_2.
    EXPECT_EQ(majorana_bilinear(3, 1, 4).str(), "-XZX");
}

TEST(StabilizerTableau, VacuumGenerators) {
    StabilizerTableau one(1);
    EXPECT_EQ(one.stabilizer(0).str(), "+Z");
    StabilizerTableau two(2);
    EXPECT_EQ(two.stabilizer(0).str(), "+ZI");
    EXPECT_EQ(two.stabilizer(1).str(), "+IZ");
    EXPECT_EQ(two.entanglement_entropy(0, 1), 0);
    StabilizerTableau four(4);
    EXPECT_EQ(four.entanglement_entropy(0, 2), 0);
    four.check_invariants();
    EXPECT_THROW(StabilizerTableau(0), ConfigError);
}

TEST(StabilizerTableau, VacuumMeasurementIsDeterministic) {
    StabilizerTableau tab(5);
    StabilizerTableau copy = tab;
    for (size_t q = 0; q < 5; ++q) {
        auto r = tab.measure_z(q, true);
        EXPECT_TRUE(r.deterministic);
        EXPECT_FALSE(r.outcome);
    }
    EXPECT_EQ(tab, copy);
}

TEST(StabilizerTableau, BellPairMeasurement) {
    for (bool b : {false, true}) {
        std::vector<PauliString> gens = {PauliString::parse("+XX"), PauliString::parse("+ZZ")};
        auto tab = StabilizerTableau::from_stabilizers(gens);
        tab.check_invariants();
        EXPECT_EQ(tab.entanglement_entropy(0, 1), 1);
        auto r = tab.measure_z(0, b);
        EXPECT_FALSE(r.deterministic);
        EXPECT_EQ(r.outcome, b);
        EXPECT_EQ(tab.entanglement_entropy(0, 1), 0);
        auto again = tab.measure_z(1, !b);
        EXPECT_TRUE(again.deterministic);
        EXPECT_EQ(again.outcome, b);
        tab.check_invariants();
        EXPECT_EQ(tab.peek_z(0), b ? 1 : 0);
        EXPECT_EQ(tab.peek_z(1), b ? 1 : 0);
    }
}

TEST(StabilizerTableau, EntropyRegionChecks) {
    StabilizerTableau tab(4);
    EXPECT_THROW(tab.entanglement_entropy(2, 2), ConfigError);
    EXPECT_THROW(tab.entanglement_entropy(0, 4), ConfigError);
    EXPECT_THROW(tab.apply_two_qubit(CliffordGate2().table(), 3), ConfigError);
}

TEST(StabilizerTableau, IdentityAndInverseGates) {
    RandomStream rng(11);
    const auto& sets = GateSets::get();
    for (int trial = 0; trial < 50; ++trial) {
        auto tab = random_clifford_state(6, 30, rng);
        auto before = tab;
        apply_gate(tab, CliffordGate2(), 2);
        EXPECT_EQ(tab, before);
        const auto& g = sets.sample_c2(rng);
        size_t site = rng.below(5);
        apply_gate(tab, g, site);
        apply_gate(tab, g.inverse(), site);
        EXPECT_EQ(tab, before);
    }
}

TEST(StabilizerTableau, InvariantsAndEntropyBoundsOnSnapshots) {
    RandomStream rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t n = 2 + rng.below(9);
        auto tab = random_clifford_state(n, 3 * n, rng);
        for (size_t k = 0; k < n / 2; ++k) tab.measure_z(rng.below(n), rng.coin());
        if (trial % 50 == 0) tab.check_invariants();
        auto profile = tab.entropy_profile();
        ASSERT_EQ(profile.size(), n + 1);
        EXPECT_EQ(profile[0], 0);
        EXPECT_EQ(profile[n], 0);
        for (size_t c = 1; c < n; ++c) {
            int s = tab.entanglement_entropy(0, c);
            EXPECT_EQ(profile[c], s);
            EXPECT_GE(s, 0);
            EXPECT_LE(s, static_cast<int>(std::min(c, n - c)));
            EXPECT_EQ(s, tab.entanglement_entropy(c, n));
        }
    }
}

TEST(StabilizerTableau, ProfileBeyondOneWord) {
    RandomStream rng(13);
    for (size_t n : {63u, 64u, 65u, 130u}) {
        auto tab = random_clifford_state(n, 8 * n, rng);
        for (size_t k = 0; k < n / 4; ++k) tab.measure_z(rng.below(n), rng.coin());
        tab.check_invariants();
        auto profile = tab.entropy_profile();
        for (size_t c = 1; c < n; c += 7) {
            EXPECT_EQ(profile[c], tab.entanglement_entropy(0, c)) << "n=" << n << " c=" << c;
        }
    }
}

TEST(StabilizerTableau, FromStabilizersRejectsBadInput) {
    std::vector<PauliString> anti = {PauliString::parse("XI"), PauliString::parse("ZI")};
    EXPECT_THROW(StabilizerTableau::from_stabilizers(anti), ConfigError);
    std::vector<PauliString> dependent = {PauliString::parse("ZZ"), PauliString::parse("ZZ")};
    EXPECT_THROW(StabilizerTableau::from_stabilizers(dependent), ConfigError);
}

TEST(StabilizerTableau, FromStabilizersRoundTrip) {
    RandomStream rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        size_t n = 1 + rng.below(70);
        auto tab = n == 1 ? StabilizerTableau(1) : random_clifford_state(n, 4 * n, rng);
        auto gens = tab.stabilizers();
        auto rebuilt = StabilizerTableau::from_stabilizers(gens);
        rebuilt.check_invariants();
        for (size_t i = 0; i < n; ++i) EXPECT_EQ(rebuilt.stabilizer(i), gens[i]);
    }
}

// Dense oracle: conjugation, Born rule, and entropies.

TEST(StatevectorOracle, GateUnitaryReproducesImages) {
    const auto& sets = GateSets::get();
    for (size_t i = 0; i < sets.clifford().size(); i += 7) {
        const auto& g = sets.clifford()[i];
        Eigen::Matrix4cd u = gate_unitary(g);
        ASSERT_LT((u.adjoint() * u - Eigen::Matrix4cd::Identity()).norm(), 1e-10);
        for (unsigned idx = 1; idx < 16; ++idx) {
            LocalPauli p = LocalPauli::from_index(idx);
            Eigen::Matrix4cd lhs = u * testing::local_pauli_matrix(p) * u.adjoint();
            Eigen::Matrix4cd rhs = testing::local_pauli_matrix(g.conjugate(p));
            ASSERT_LT((lhs - rhs).norm(), 1e-10) << g.str();
        }
    }
}

TEST(StatevectorOracle, RandomCircuitsMatchTableau) {
    RandomStream rng(15);
    const auto& sets = GateSets::get();
    for (int trial = 0; trial < 100; ++trial) {
        size_t n = 2 + rng.below(5);
        StabilizerTableau tab(n);
        StateVector sv(n);
        for (size_t step = 0; step < 4 * n; ++step) {
            size_t site = rng.below(n - 1);
            const auto& g = rng.coin() ? sets.sample_c2(rng) : sets.sample_cg2(rng);
            apply_gate(tab, g, site);
            sv.apply(gate_unitary(g), site);
            if (rng.below(3) == 0) {
                size_t q = rng.below(n);
                double p1 = sv.probability_one(q);
                int fixed = tab.peek_z(q);
                if (fixed >= 0) {
                    ASSERT_NEAR(p1, fixed, 1e-10);
                } else {
                    ASSERT_NEAR(p1, 0.5, 1e-10);
                }
                auto r = tab.measure_z(q, rng.coin());
                sv.project(q, r.outcome);
            }
        }
        tab.check_invariants();
        for (const auto& s : tab.stabilizers()) {
            ASSERT_NEAR(sv.expectation(s), 1.0, 1e-9) << s.str();
        }
        for (size_t c = 1; c < n; ++c) {
            ASSERT_NEAR(sv.entropy(c), tab.entanglement_entropy(0, c), 1e-9);
        }
    }
}

TEST(StatevectorOracle, BornRuleOnRandomFiveQubitStates) {
    RandomStream rng(16);
    const auto& sets = GateSets::get();
    for (int trial = 0; trial < 20; ++trial) {
        StabilizerTableau base(5);
        StateVector sv(5);
        for (int k = 0; k < 25; ++k) {
            size_t site = rng.below(4);
            const auto& g = sets.sample_c2(rng);
            apply_gate(base, g, site);
            sv.apply(gate_unitary(g), site);
        }
        for (size_t q = 0; q < 5; ++q) {
            double p1 = sv.probability_one(q);
            const int coins = 10000;
            int ones = 0;
            for (int k = 0; k < coins; ++k) {
                auto copy = base;
                ones += copy.measure_z(q, rng.coin()).outcome;
            }
            double sigma = std::sqrt(coins * p1 * (1 - p1));
            EXPECT_LE(std::abs(ones - coins * p1), 3 * sigma + 1e-9) << "p1=" << p1;
        }
    }
}

}  // namespace
}  // namespace matchdope
