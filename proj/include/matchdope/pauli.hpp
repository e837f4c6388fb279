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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matchdope/errors.hpp"

namespace matchdope {

inline constexpr size_t words_for_bits(size_t n) { return (n + 63) / 64; }

/// Accumulates, over one word of qubits, the power of i picked up when the
/// Hermitian Paulis (x1, z1) are multiplied on the right by (x2, z2).
/// Each qubit contributes +1, -1 or 0 (XY = iZ, YZ = iX, ZX = iY).
constexpr int product_phase_word(uint64_t x1, uint64_t z1, uint64_t x2, uint64_t z2) {
    uint64_t y1 = x1 & z1;
    uint64_t only_x1 = x1 & ~z1;
    uint64_t only_z1 = ~x1 & z1;
    uint64_t plus = (y1 & z2 & ~x2) | (only_x1 & x2 & z2) | (only_z1 & x2 & ~z2);
    uint64_t minus = (y1 & x2 & ~z2) | (only_x1 & z2 & ~x2) | (only_z1 & x2 & z2);
    return std::popcount(plus) - std::popcount(minus);
}

/// Hermitian Pauli operator on `n` qubits with a sign in {+1, -1}.
///
/// A qubit with bits (x, z) carries X, Z or Y = iXZ; this keeps every stored
/// operator Hermitian so only the sign needs tracking.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t n) : n_(n), xs_(words_for_bits(n), 0), zs_(words_for_bits(n), 0) {}

    /// Parses e.g. "+XIZ", "-YY", "ZZ" (qubit 0 first).
    static PauliString parse(std::string_view text) {
        bool negative = false;
        if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
            negative = text.front() == '-';
            text.remove_prefix(1);
        }
        PauliString result(text.size());
        for (size_t q = 0; q < text.size(); ++q) {
            switch (text[q]) {
                case 'I': case '_': break;
                case 'X': result.set(q, true, false); break;
                case 'Y': result.set(q, true, true); break;
                case 'Z': result.set(q, false, true); break;
                default: throw ConfigError("unknown Pauli character");
            }
        }
        result.negative_ = negative;
        return result;
    }

    size_t size() const { return n_; }
    bool negative() const { return negative_; }
    void set_negative(bool value) { negative_ = value; }
    int sign() const { return negative_ ? -1 : 1; }

    bool x(size_t q) const { return (xs_[q / 64] >> (q % 64)) & 1; }
    bool z(size_t q) const { return (zs_[q / 64] >> (q % 64)) & 1; }
    void set(size_t q, bool x_bit, bool z_bit) {
        uint64_t mask = uint64_t{1} << (q % 64);
        xs_[q / 64] = x_bit ? (xs_[q / 64] | mask) : (xs_[q / 64] & ~mask);
        zs_[q / 64] = z_bit ? (zs_[q / 64] | mask) : (zs_[q / 64] & ~mask);
    }

    std::span<const uint64_t> x_words() const { return xs_; }
    std::span<const uint64_t> z_words() const { return zs_; }
    std::span<uint64_t> x_words() { return xs_; }
    std::span<uint64_t> z_words() { return zs_; }

    size_t weight() const {
        size_t w = 0;
        for (size_t k = 0; k < xs_.size(); ++k) {
            w += std::popcount(xs_[k] | zs_[k]);
        }
        return w;
    }

    bool commutes_with(const PauliString& other) const {
        int parity = 0;
        for (size_t k = 0; k < xs_.size(); ++k) {
            parity ^= std::popcount((xs_[k] & other.zs_[k]) ^ (zs_[k] & other.xs_[k])) & 1;
        }
        return parity == 0;
    }

    /// Replaces *this by (*this) * rhs and returns the residual power of i:
    /// the exact operator product equals i^k times the stored result.
    /// k is 0 whenever the operands commute.
    int multiply_right(const PauliString& rhs) {
        int phase = (negative_ ? 2 : 0) + (rhs.negative_ ? 2 : 0);
        for (size_t k = 0; k < xs_.size(); ++k) {
            phase += product_phase_word(xs_[k], zs_[k], rhs.xs_[k], rhs.zs_[k]);
            xs_[k] ^= rhs.xs_[k];
            zs_[k] ^= rhs.zs_[k];
        }
        phase &= 3;
        negative_ = (phase & 2) != 0;
        return phase & 1;
    }

    std::string str() const {
        std::string out(1, negative_ ? '-' : '+');
        for (size_t q = 0; q < n_; ++q) {
            out += "IZXY"[(x(q) ? 2 : 0) + (z(q) ? 1 : 0)];
        }
        return out;
    }

    bool operator==(const PauliString&) const = default;

   private:
    size_t n_ = 0;
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
    bool negative_ = false;
};

/// Jordan-Wigner Majorana operator on `n` qubits, 0-based index mu:
/// gamma_{2j} = Z_0..Z_{j-1} X_j and gamma_{2j+1} = Z_0..Z_{j-1} Y_j.
inline PauliString majorana(size_t n, size_t mu) {
    require(mu < 2 * n, "Majorana index out of range");
    PauliString out(n);
    size_t site = mu / 2;
    for (size_t q = 0; q < site; ++q) {
        out.set(q, false, true);
    }
    out.set(site, true, (mu & 1) != 0);
    return out;
}

/// The Hermitian stabilizer i*gamma_a*gamma_b (a != b), with an optional extra sign.
inline PauliString majorana_bilinear(size_t n, size_t a, size_t b, bool negative = false) {
    require(a != b, "bilinear needs two distinct Majoranas");
    PauliString out = majorana(n, a);
    int residual = out.multiply_right(majorana(n, b));
    // gamma_a gamma_b anticommute, so the product is +-i times a Hermitian Pauli.
    ensure(residual == 1, "distinct Majoranas must anticommute");
    // i * (i * H) = -H.
    out.set_negative(!out.negative() != negative);
    return out;
}

}  // namespace matchdope
