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
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "matchdope/errors.hpp"
#include "matchdope/pauli.hpp"

namespace matchdope {

/// Action of a two-qubit Clifford on the 16 local Hermitian Paulis.
///
/// Index layout: bit0 = x on the first qubit, bit1 = x on the second,
/// bit2 = z on the first, bit3 = z on the second. Each entry packs the image
/// index in the low nibble and a sign flip in bit 4.
using LocalConjugationTable = std::array<uint8_t, 16>;

struct MeasurementResult {
    bool outcome = false;
    bool deterministic = false;
};

namespace detail {

inline uint64_t spread_even(uint32_t v) {
    uint64_t x = v;
    x = (x | (x << 16)) & 0x0000FFFF0000FFFFULL;
    x = (x | (x << 8)) & 0x00FF00FF00FF00FFULL;
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0FULL;
    x = (x | (x << 2)) & 0x3333333333333333ULL;
    x = (x | (x << 1)) & 0x5555555555555555ULL;
    return x;
}

/// Copies bits [begin, begin + count) of `src` into `dst` starting at bit 0.
inline void extract_bits(std::span<const uint64_t> src, size_t begin, size_t count, uint64_t* dst) {
    size_t words = words_for_bits(count);
    size_t shift = begin % 64;
    size_t first = begin / 64;
    for (size_t k = 0; k < words; ++k) {
        uint64_t lo = first + k < src.size() ? src[first + k] : 0;
        uint64_t hi = first + k + 1 < src.size() ? src[first + k + 1] : 0;
        dst[k] = shift == 0 ? lo : (lo >> shift) | (hi << (64 - shift));
    }
    if (count % 64 != 0) {
        dst[words - 1] &= (uint64_t{1} << (count % 64)) - 1;
    }
}

/// Rank over GF(2) of `rows` packed rows of `stride` words each. Destroys the input.
inline size_t gf2_rank(std::vector<uint64_t>& m, size_t rows, size_t stride) {
    size_t rank = 0;
    for (size_t w = 0; w < stride && rank < rows; ++w) {
        for (int b = 0; b < 64 && rank < rows; ++b) {
            uint64_t mask = uint64_t{1} << b;
            size_t pivot = rank;
            while (pivot < rows && !(m[pivot * stride + w] & mask)) {
                ++pivot;
            }
            if (pivot == rows) {
                continue;
            }
            if (pivot != rank) {
                std::swap_ranges(m.begin() + pivot * stride, m.begin() + (pivot + 1) * stride,
                                 m.begin() + rank * stride);
            }
            const uint64_t* prow = &m[rank * stride];
            for (size_t r = rank + 1; r < rows; ++r) {
                uint64_t* row = &m[r * stride];
                if (row[w] & mask) {
                    for (size_t k = w; k < stride; ++k) {
                        row[k] ^= prow[k];
                    }
                }
            }
            ++rank;
        }
    }
    return rank;
}

}  // namespace detail

/// Pure stabilizer state of n qubits in the destabilizer/stabilizer form.
///
/// Rows [0, n) hold destabilizers and rows [n, 2n) stabilizers. Each row
/// stores its X words, then its Z words; signs are kept separately.
class StabilizerTableau {
   public:
    StabilizerTableau() = default;

    /// |0...0>: destabilizer i = X_i, stabilizer i = +Z_i.
    explicit StabilizerTableau(size_t n) : n_(n), words_(words_for_bits(n)) {
        require(n >= 1, "tableau needs at least one qubit");
        bits_.assign(2 * n * 2 * words_, 0);
        negative_.assign(2 * n, 0);
        for (size_t q = 0; q < n; ++q) {
            set_bit(x_row(q), q);
            set_bit(z_row(n + q), q);
        }
    }

    /// Builds a tableau from n independent, mutually commuting stabilizers.
    /// Destabilizers are completed by solving the symplectic duality conditions.
    static StabilizerTableau from_stabilizers(std::span<const PauliString> stabilizers);

    size_t num_qubits() const { return n_; }

    PauliString row(size_t r) const {
        PauliString out(n_);
        std::copy_n(x_row(r), words_, out.x_words().begin());
        std::copy_n(z_row(r), words_, out.z_words().begin());
        out.set_negative(negative_[r] != 0);
        return out;
    }
    PauliString stabilizer(size_t i) const { return row(n_ + i); }
    PauliString destabilizer(size_t i) const { return row(i); }
    std::vector<PauliString> stabilizers() const {
        std::vector<PauliString> out;
        out.reserve(n_);
        for (size_t i = 0; i < n_; ++i) {
            out.push_back(stabilizer(i));
        }
        return out;
    }

    /// Conjugates every row by a two-qubit Clifford acting on qubits (site, site+1).
    void apply_two_qubit(const LocalConjugationTable& table, size_t site) {
        require(site + 1 < n_, "gate site out of range");
        size_t a = site, b = site + 1;
        size_t wa = a / 64, wb = b / 64;
        uint64_t ma = uint64_t{1} << (a % 64), mb = uint64_t{1} << (b % 64);
        for (size_t r = 0; r < 2 * n_; ++r) {
            uint64_t* xr = x_row(r);
            uint64_t* zr = z_row(r);
            unsigned idx = ((xr[wa] & ma) ? 1u : 0u) | ((xr[wb] & mb) ? 2u : 0u) | ((zr[wa] & ma) ? 4u : 0u) |
                           ((zr[wb] & mb) ? 8u : 0u);
            if (idx == 0) {
                continue;
            }
            uint8_t image = table[idx];
            xr[wa] = (image & 1) ? (xr[wa] | ma) : (xr[wa] & ~ma);
            xr[wb] = (image & 2) ? (xr[wb] | mb) : (xr[wb] & ~mb);
            zr[wa] = (image & 4) ? (zr[wa] | ma) : (zr[wa] & ~ma);
            zr[wb] = (image & 8) ? (zr[wb] | mb) : (zr[wb] & ~mb);
            negative_[r] ^= (image >> 4) & 1;
        }
    }

    /// Projective Z measurement of qubit q. `random_bit` is the outcome used when
    /// the stabilizer group does not fix the result.
    MeasurementResult measure_z(size_t q, bool random_bit) {
        require(q < n_, "measured qubit out of range");
        size_t w = q / 64;
        uint64_t m = uint64_t{1} << (q % 64);
        size_t pivot = 2 * n_;
        for (size_t r = n_; r < 2 * n_; ++r) {
            if (x_row(r)[w] & m) {
                pivot = r;
                break;
            }
        }
        if (pivot == 2 * n_) {
            return {deterministic_z(q), true};
        }
        for (size_t r = 0; r < 2 * n_; ++r) {
            if (r != pivot && r != pivot - n_ && (x_row(r)[w] & m)) {
                multiply_rows(r, pivot);
            }
        }
        std::copy_n(x_row(pivot), 2 * words_, x_row(pivot - n_));
        negative_[pivot - n_] = negative_[pivot];
        std::fill_n(x_row(pivot), 2 * words_, 0);
        set_bit(z_row(pivot), q);
        negative_[pivot] = random_bit ? 1 : 0;
        return {random_bit, false};
    }

    /// Outcome of a Z measurement on q if it is fixed by the stabilizer group.
    /// Returns std::nullopt-like -1 when the outcome is random.
    int peek_z(size_t q) const {
        size_t w = q / 64;
        uint64_t m = uint64_t{1} << (q % 64);
        for (size_t r = n_; r < 2 * n_; ++r) {
            if (x_row(r)[w] & m) {
                return -1;
            }
        }
        return deterministic_z(q) ? 1 : 0;
    }

    /// S_A in bits for the qubit interval A = [begin, end): rank of the
    /// stabilizers restricted to A minus |A|.
    int entanglement_entropy(size_t begin, size_t end) const {
        require(begin < end && end <= n_, "region must be a nonempty interval");
        require(end - begin < n_, "region must be a proper subset");
        size_t len = end - begin;
        size_t half = words_for_bits(len);
        size_t stride = 2 * half;
        std::vector<uint64_t> m(n_ * stride, 0);
        for (size_t i = 0; i < n_; ++i) {
            detail::extract_bits({x_row(n_ + i), words_}, begin, len, &m[i * stride]);
            detail::extract_bits({z_row(n_ + i), words_}, begin, len, &m[i * stride + half]);
        }
        size_t rank = detail::gf2_rank(m, n_, stride);
        return static_cast<int>(rank) - static_cast<int>(len);
    }

    /// Entropy of every left block [0, c) for c = 0..n, from one elimination.
    ///
    /// Rows are brought to a form where each has a distinct last nonzero
    /// column (columns ordered x_0 z_0 x_1 z_1 ...). The stabilizers supported
    /// in [0, c) are then spanned by the rows whose last column is < 2c.
    std::vector<int> entropy_profile() const {
        size_t stride = 2 * words_;
        std::vector<uint64_t> m(n_ * stride, 0);
        for (size_t i = 0; i < n_; ++i) {
            const uint64_t* xr = x_row(n_ + i);
            const uint64_t* zr = z_row(n_ + i);
            uint64_t* dst = &m[i * stride];
            for (size_t k = 0; k < words_; ++k) {
                uint64_t xw = xr[k], zw = zr[k];
                dst[2 * k] = detail::spread_even(static_cast<uint32_t>(xw)) |
                             (detail::spread_even(static_cast<uint32_t>(zw)) << 1);
                dst[2 * k + 1] = detail::spread_even(static_cast<uint32_t>(xw >> 32)) |
                                 (detail::spread_even(static_cast<uint32_t>(zw >> 32)) << 1);
            }
        }
        std::vector<size_t> active(n_);
        std::iota(active.begin(), active.end(), size_t{0});
        size_t num_active = n_;
        std::vector<size_t> supported_below(2 * n_ + 1, 0);
        for (size_t col = 2 * n_; col-- > 0 && num_active > 0;) {
            size_t w = col / 64;
            uint64_t mask = uint64_t{1} << (col % 64);
            size_t found = num_active;
            for (size_t a = 0; a < num_active; ++a) {
                if (m[active[a] * stride + w] & mask) {
                    found = a;
                    break;
                }
            }
            if (found == num_active) {
                continue;
            }
            size_t prow = active[found];
            active[found] = active[--num_active];
            const uint64_t* p = &m[prow * stride];
            for (size_t a = 0; a < num_active; ++a) {
                uint64_t* row = &m[active[a] * stride];
                if (row[w] & mask) {
                    for (size_t k = 0; k <= w; ++k) {
                        row[k] ^= p[k];
                    }
                }
            }
            supported_below[col + 1] += 1;
        }
        ensure(num_active == 0, "stabilizer rows are not independent");
        std::vector<int> out(n_ + 1, 0);
        size_t cumulative = 0;
        for (size_t c = 0; c <= n_; ++c) {
            if (c > 0) {
                cumulative += supported_below[2 * c - 1] + supported_below[2 * c];
            }
            out[c] = static_cast<int>(c) - static_cast<int>(cumulative);
        }
        return out;
    }

    /// Verifies commutation, duality with destabilizers, and full rank.
    /// O(n^2 * n/64); meant for tests and debug checks.
    void check_invariants() const {
        for (size_t i = 0; i < 2 * n_; ++i) {
            for (size_t j = i + 1; j < 2 * n_; ++j) {
                bool anti = symplectic(i, j);
                bool expect = (j == i + n_);
                ensure(anti == expect, "tableau symplectic relations violated");
            }
        }
        std::vector<uint64_t> m(n_ * 2 * words_);
        for (size_t i = 0; i < n_; ++i) {
            std::copy_n(x_row(n_ + i), 2 * words_, &m[i * 2 * words_]);
        }
        ensure(detail::gf2_rank(m, n_, 2 * words_) == n_, "stabilizers are not independent");
    }

    bool operator==(const StabilizerTableau&) const = default;

   private:
    uint64_t* x_row(size_t r) { return &bits_[r * 2 * words_]; }
    uint64_t* z_row(size_t r) { return &bits_[r * 2 * words_ + words_]; }
    const uint64_t* x_row(size_t r) const { return &bits_[r * 2 * words_]; }
    const uint64_t* z_row(size_t r) const { return &bits_[r * 2 * words_ + words_]; }
    static void set_bit(uint64_t* row, size_t q) { row[q / 64] |= uint64_t{1} << (q % 64); }

    bool symplectic(size_t a, size_t b) const {
        int parity = 0;
        for (size_t k = 0; k < words_; ++k) {
            parity ^= std::popcount((x_row(a)[k] & z_row(b)[k]) ^ (z_row(a)[k] & x_row(b)[k])) & 1;
        }
        return parity != 0;
    }

    static int multiply_words(uint64_t* xt, uint64_t* zt, const uint64_t* xs, const uint64_t* zs, size_t words) {
        int phase = 0;
        for (size_t k = 0; k < words; ++k) {
            phase += product_phase_word(xt[k], zt[k], xs[k], zs[k]);
            xt[k] ^= xs[k];
            zt[k] ^= zs[k];
        }
        return phase;
    }

    /// row[target] <- row[target] * row[source]; rows must commute.
    void multiply_rows(size_t target, size_t source) {
        int phase = 2 * negative_[target] + 2 * negative_[source] +
                    multiply_words(x_row(target), z_row(target), x_row(source), z_row(source), words_);
        phase &= 3;
        ensure((phase & 1) == 0, "row product picked up an imaginary phase");
        negative_[target] = static_cast<uint8_t>(phase >> 1);
    }

    bool deterministic_z(size_t q) const {
        size_t w = q / 64;
        uint64_t m = uint64_t{1} << (q % 64);
        std::vector<uint64_t> scratch(2 * words_, 0);
        int phase = 0;
        for (size_t i = 0; i < n_; ++i) {
            if (x_row(i)[w] & m) {
                phase += 2 * negative_[n_ + i] +
                         multiply_words(scratch.data(), scratch.data() + words_, x_row(n_ + i), z_row(n_ + i), words_);
            }
        }
        phase &= 3;
        ensure((phase & 1) == 0, "deterministic measurement picked up an imaginary phase");
        return phase == 2;
    }

    size_t n_ = 0;
    size_t words_ = 0;
    std::vector<uint64_t> bits_;
    std::vector<uint8_t> negative_;
};

inline StabilizerTableau StabilizerTableau::from_stabilizers(std::span<const PauliString> stabilizers) {
    size_t n = stabilizers.size();
    require(n >= 1, "need at least one stabilizer");
    for (const auto& s : stabilizers) {
        require(s.size() == n, "stabilizer length must equal the number of generators");
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            require(stabilizers[i].commutes_with(stabilizers[j]), "stabilizers must commute");
        }
    }
    size_t words = words_for_bits(n);

    // Solve <D_i, S_j>_symplectic = delta_ij. Row j of the system is (z_j | x_j),
    // so its dot product with (x_D | z_D) is the symplectic form. The system is
    // reduced to RREF while tracking the row operations in an n x n block.
    size_t cols = 2 * words;
    size_t aug = words;
    size_t stride = cols + aug;
    std::vector<uint64_t> m(n * stride, 0);
    for (size_t j = 0; j < n; ++j) {
        auto xw = stabilizers[j].x_words();
        auto zw = stabilizers[j].z_words();
        std::copy(zw.begin(), zw.end(), &m[j * stride]);
        std::copy(xw.begin(), xw.end(), &m[j * stride + words]);
        m[j * stride + cols + j / 64] |= uint64_t{1} << (j % 64);
    }
    std::vector<size_t> pivot_col(n);
    size_t rank = 0;
    for (size_t col = 0; col < 2 * n && rank < n; ++col) {
        size_t bitpos = col < n ? col : words * 64 + (col - n);
        size_t w = bitpos / 64;
        uint64_t mask = uint64_t{1} << (bitpos % 64);
        size_t p = rank;
        while (p < n && !(m[p * stride + w] & mask)) {
            ++p;
        }
        if (p == n) {
            continue;
        }
        if (p != rank) {
            std::swap_ranges(m.begin() + p * stride, m.begin() + (p + 1) * stride, m.begin() + rank * stride);
        }
        for (size_t r = 0; r < n; ++r) {
            if (r != rank && (m[r * stride + w] & mask)) {
                for (size_t k = 0; k < stride; ++k) {
                    m[r * stride + k] ^= m[rank * stride + k];
                }
            }
        }
        pivot_col[rank] = col;
        ++rank;
    }
    require(rank == n, "stabilizers must be independent");

    // After reduction R A = E with E in RREF (pivots only). D_i solves A D = e_i:
    // E D = R e_i, so D has bit pivot_col[r] set iff R[r][i] = 1.
    std::vector<PauliString> destab(n, PauliString(n));
    for (size_t r = 0; r < n; ++r) {
        const uint64_t* rrow = &m[r * stride + cols];
        size_t col = pivot_col[r];
        for (size_t i = 0; i < n; ++i) {
            if ((rrow[i / 64] >> (i % 64)) & 1) {
                PauliString& d = destab[i];
                size_t q = col < n ? col : col - n;
                bool xb = d.x(q), zb = d.z(q);
                if (col < n) {
                    xb = !xb;
                } else {
                    zb = !zb;
                }
                d.set(q, xb, zb);
            }
        }
    }
    // Make the destabilizers mutually commuting: adding S_k to D_i flips only
    // the (i, k) commutation relation.
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < i; ++k) {
            if (!destab[i].commutes_with(destab[k])) {
                destab[i].multiply_right(stabilizers[k]);
            }
        }
        destab[i].set_negative(false);
    }

    StabilizerTableau out;
    out.n_ = n;
    out.words_ = words;
    out.bits_.assign(2 * n * 2 * words, 0);
    out.negative_.assign(2 * n, 0);
    for (size_t i = 0; i < n; ++i) {
        const PauliString* rows[2] = {&destab[i], &stabilizers[i]};
        for (size_t half = 0; half < 2; ++half) {
            size_t r = half * n + i;
            std::copy_n(rows[half]->x_words().begin(), words, out.x_row(r));
            std::copy_n(rows[half]->z_words().begin(), words, out.z_row(r));
            out.negative_[r] = rows[half]->negative() ? 1 : 0;
        }
    }
    return out;
}

}  // namespace matchdope
