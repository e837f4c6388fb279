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

#include <fftw3.h>

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <vector>

#include "matchdope/errors.hpp"

namespace matchdope {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

inline BigInt binomial(int64_t n, int64_t k) {
    if (k < 0 || k > n || n < 0) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt out = 1;
    for (int64_t i = 1; i <= k; ++i) {
        out *= n - k + i;
        out /= i;
    }
    return out;
}

inline BigInt factorial(int64_t n) {
    BigInt out = 1;
    for (int64_t i = 2; i <= n; ++i) out *= i;
    return out;
}

// ---------------------------------------------------------------------------
// Unitary Gaussian dynamics: endpoint random walk.

/// Probability that an arc endpoint at Majorana point `from` sits at `to` after
/// t brickwall layers, on the infinite chain. Points are 0-based; the first
/// layer pairs points [0, 4), [4, 8), ...
inline Rational endpoint_distribution_exact(int64_t t, int64_t from, int64_t to) {
    require(t >= 0, "time must be nonnegative");
    if (t == 0) {
        return from == to ? Rational(1) : Rational(0);
    }
    int64_t x = to + 1, x0 = from + 1;
    int64_t k = (t % 2 == 1) ? (t - 1) / 2 + floor_div(x - 1, 4) - floor_div(x0 - 1, 4)
                             : t / 2 - 1 + floor_div(x + 1, 4) - floor_div(x0 - 1, 4);
    BigInt denom = BigInt(1) << static_cast<unsigned>(t + 1);
    return Rational(binomial(t - 1, k), denom);
}

inline double endpoint_distribution(int64_t t, int64_t from, int64_t to) {
    return static_cast<double>(endpoint_distribution_exact(t, from, to));
}

/// Support [lo, hi] of the endpoint distribution (inclusive, 0-based points).
inline std::pair<int64_t, int64_t> endpoint_support(int64_t t, int64_t from) {
    if (t == 0) return {from, from};
    int64_t bin = floor_div(from, 4);
    int64_t reach = 4 * ((t + 1) / 2);
    return {4 * bin - reach, 4 * bin + 3 + reach};
}

/// Leading-order mean half-chain entropy of the unitary Gaussian circuit.
inline double mean_entropy_unitary(double t) {
    require(t >= 0, "time must be nonnegative");
    return std::sqrt(t / std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Clifford-Gaussian Page curve.

/// Number of perfect pairings of 2n points, (2n)! / (n! 2^n).
inline BigInt pairing_count(int64_t n) {
    require(n >= 0, "pairing count needs n >= 0");
    return factorial(2 * n) / (factorial(n) << static_cast<unsigned>(n));
}

/// Number of pairings of 2n points with exactly 2j arcs between the first 2i
/// points and the rest.
inline BigInt pairings_with_crossings(int64_t n, int64_t i, int64_t j) {
    if (j < 0 || j > i || j > n - i) return 0;
    return binomial(2 * i, 2 * j) * binomial(2 * n - 2 * i, 2 * j) * factorial(2 * j) * pairing_count(i - j) *
           pairing_count(n - i - j);
}

/// Average entropy (bits) of the block of i qubits over uniform Gaussian stabilizer states.
inline Rational page_curve_cg_exact(int64_t n, int64_t i) {
    require(n >= 2 && i >= 1 && i <= n - 1, "page curve needs 1 <= i <= n-1");
    BigInt total = 0;
    for (int64_t j = 0; j <= std::min(i, n - i); ++j) {
        total += 2 * j * pairings_with_crossings(n, i, j);
    }
    return Rational(total, 2 * pairing_count(n));
}

inline double page_curve_cg(int64_t n, int64_t i) { return static_cast<double>(page_curve_cg_exact(n, i)); }

/// Large-n half-chain asymptote n/4 + 1/8.
inline double page_curve_cg_half_asymptote(double n) { return n / 4 + 0.125; }

// ---------------------------------------------------------------------------
// Monitored Gaussian dynamics: arc-length master equation.

/// Probability mass function over signed arc lengths l in [-L, L] (physical sites).
class LengthDistribution {
   public:
    LengthDistribution() = default;
    explicit LengthDistribution(int64_t half_width)
        : half_width_(half_width), pmf_(static_cast<size_t>(2 * half_width + 1), 0.0) {
        require(half_width >= 1, "half width must be positive");
    }

    LengthDistribution(int64_t half_width, std::vector<double> values)
        : half_width_(half_width), pmf_(std::move(values)) {
        require(half_width >= 1 && pmf_.size() == static_cast<size_t>(2 * half_width + 1),
                "length distribution needs 2L + 1 values");
    }

    static LengthDistribution delta(int64_t half_width) {
        LengthDistribution out(half_width);
        out[0] = 1.0;
        return out;
    }

    int64_t half_width() const { return half_width_; }
    size_t size() const { return pmf_.size(); }
    double& operator[](int64_t l) { return pmf_[static_cast<size_t>(l + half_width_)]; }
    double operator[](int64_t l) const { return pmf_[static_cast<size_t>(l + half_width_)]; }
    const std::vector<double>& values() const { return pmf_; }

    double total() const {
        double s = 0;
        for (double v : pmf_) s += v;
        return s;
    }

    /// Set by the fixed-point solver once the iteration met its tolerance.
    bool steady() const { return steady_; }
    void mark_steady(bool value) { steady_ = value; }

   private:
    int64_t half_width_ = 0;
    std::vector<double> pmf_;
    bool steady_ = false;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Real-to-complex and back on a periodic lattice of size m, with owned buffers.
class PeriodicFft {
   public:
    explicit PeriodicFft(size_t m) : m_(m) {
        real_ = fftw_alloc_real(m);
        spec_ = fftw_alloc_complex(m / 2 + 1);
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(m), real_, spec_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec_, real_, FFTW_ESTIMATE);
    }
    PeriodicFft(const PeriodicFft&) = delete;
    PeriodicFft& operator=(const PeriodicFft&) = delete;
    ~PeriodicFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    size_t size() const { return m_; }
    double* real() { return real_; }
    std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }
    void forward() { fftw_execute(forward_); }
    /// Inverse transform including the 1/m normalization.
    void backward() {
        fftw_execute(backward_);
        double scale = 1.0 / static_cast<double>(m_);
        for (size_t i = 0; i < m_; ++i) real_[i] *= scale;
    }

   private:
    size_t m_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// argmin_gamma |f - sum_j gamma_j cols[j]|_2 by modified Gram-Schmidt.
/// Nearly dependent columns get a zero coefficient.
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& cols, const std::vector<double>& f) {
    const size_t k = cols.size();
    std::vector<double> gamma(k, 0.0);
    if (k == 0) return gamma;
    const size_t m = f.size();
    std::vector<std::vector<double>> q;
    std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
    std::vector<bool> kept(k, false);
    for (size_t j = 0; j < k; ++j) {
        std::vector<double> v = cols[j];
        double original = 0;
        for (double e : v) original += e * e;
        for (size_t i = 0; i < j; ++i) {
            if (!kept[i]) continue;
            double dot = 0;
            for (size_t t = 0; t < m; ++t) dot += q[i][t] * v[t];
            r[i][j] = dot;
            for (size_t t = 0; t < m; ++t) v[t] -= dot * q[i][t];
        }
        double norm = 0;
        for (double e : v) norm += e * e;
        q.emplace_back(m, 0.0);
        if (norm > 1e-20 * original && norm > 0) {
            norm = std::sqrt(norm);
            r[j][j] = norm;
            for (size_t t = 0; t < m; ++t) q[j][t] = v[t] / norm;
            kept[j] = true;
        }
    }
    std::vector<double> rhs(k, 0.0);
    for (size_t j = 0; j < k; ++j) {
        if (!kept[j]) continue;
        for (size_t t = 0; t < m; ++t) rhs[j] += q[j][t] * f[t];
    }
    for (size_t jj = k; jj-- > 0;) {
        if (!kept[jj]) continue;
        double acc = rhs[jj];
        for (size_t c = jj + 1; c < k; ++c) acc -= r[jj][c] * gamma[c];
        gamma[jj] = acc / r[jj][jj];
    }
    return gamma;
}

}  // namespace detail

/// Mass at |l| > L/2, a diagnostic for a lattice that is too small.
inline double boundary_mass(const LengthDistribution& d) {
    double s = 0;
    for (int64_t l = d.half_width() / 2 + 1; l <= d.half_width(); ++l) {
        s += d[l] + d[-l];
    }
    return s;
}

/// Closed-form steady state in momentum space: the root in [0, 1] of
/// p P^2 + (1 - 2p - cos^-4(k/2)) P + p = 0, written in a form that stays
/// accurate as cos(k/2) -> 0.
inline double steady_state_momentum(double k, double p) {
    require(p > 0 && p < 0.5, "steady state needs 0 < p < 1/2");
    double c = std::cos(k / 2);
    double c4 = c * c * c * c;
    double one_minus = 1 - c4;
    if (one_minus < 0) one_minus = 0;
    double disc = one_minus * (one_minus + 4 * p * c4);
    return 2 * p * c4 / (one_minus + 2 * p * c4 + std::sqrt(disc));
}

/// Iterates the arc-length master equation
///   P' = (1 - 2p) f*f*P + p f*f + p f*f*(P*P),  f = (d_{-1} + 2 d_0 + d_1) / 4,
/// on a periodic lattice of 2L + 1 lengths.
class MasterEquation {
   public:
    struct Result {
        LengthDistribution steady;
        size_t iterations = 0;
        /// Sup-norm change of the momentum-space iterate in the last step.
        double last_change = 0;
        /// Mass at |l| > L/2 of the final iterate.
        double boundary_mass = 0;
        bool converged = false;
    };

    MasterEquation(double p, int64_t half_width)
        : p_(p), half_width_(half_width), fft_(static_cast<size_t>(2 * half_width + 1)) {
        require(p >= 0 && p < 0.5, "master equation needs 0 <= p < 1/2");
        require(half_width >= 2, "half width must be at least 2");
    }

    double p() const { return p_; }
    int64_t half_width() const { return half_width_; }

    LengthDistribution step(const LengthDistribution& in) {
        require(in.half_width() == half_width_, "distribution has the wrong half width");
        const int64_t m = 2 * half_width_ + 1;
        std::vector<double> mixed(static_cast<size_t>(m));
        // Wrapped order: index (l mod m).
        double* buf = fft_.real();
        for (int64_t l = -half_width_; l <= half_width_; ++l) {
            buf[wrap(l)] = in[l];
        }
        fft_.forward();
        auto* spec = fft_.spectrum();
        size_t modes = static_cast<size_t>(m / 2 + 1);
        input_spectrum_.assign(spec, spec + modes);
        for (size_t k = 0; k < modes; ++k) {
            spec[k] = spec[k] * spec[k];
        }
        fft_.backward();
        for (int64_t l = -half_width_; l <= half_width_; ++l) {
            mixed[wrap(l)] = (1 - 2 * p_) * in[l] + p_ * buf[wrap(l)];
        }
        mixed[0] += p_;
        LengthDistribution out(half_width_);
        // Two passes of f, i.e. the kernel (1, 4, 6, 4, 1) / 16.
        static constexpr double kKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
        for (int64_t l = -half_width_; l <= half_width_; ++l) {
            double acc = 0;
            for (int64_t d = -2; d <= 2; ++d) {
                acc += kKernel[d + 2] * mixed[wrap(l - d)];
            }
            out[l] = acc;
        }
        return out;
    }

    /// Fixed-point iteration from a delta at l = 0, accelerated by Anderson
    /// mixing over the last `depth` residuals (depth 0 is the plain
    /// iteration). Stops once the l1 norm of the residual step(x) - x, which
    /// bounds the residual of every momentum mode, drops below `tolerance`.
    Result solve(double tolerance = 1e-12, size_t max_iterations = 100000, size_t depth = 12) {
        const size_t m = static_cast<size_t>(2 * half_width_ + 1);
        Result r;
        std::vector<double> x = LengthDistribution::delta(half_width_).values();
        std::vector<double> g, f, f_prev, g_prev;
        std::vector<std::vector<double>> dF, dG;
        double best = std::numeric_limits<double>::infinity();
        for (size_t it = 1; it <= max_iterations; ++it) {
            g = step(LengthDistribution(half_width_, x)).values();
            f.resize(m);
            double res = 0;
            for (size_t i = 0; i < m; ++i) {
                f[i] = g[i] - x[i];
                res += std::abs(f[i]);
            }
            r.iterations = it;
            r.last_change = res;
            if (res < tolerance) {
                r.converged = true;
                break;
            }
            if (res > 1e3 * best) {
                dF.clear();
                dG.clear();
            }
            best = std::min(best, res);
            if (depth > 0 && !f_prev.empty()) {
                std::vector<double> df(m), dg(m);
                for (size_t i = 0; i < m; ++i) {
                    df[i] = f[i] - f_prev[i];
                    dg[i] = g[i] - g_prev[i];
                }
                dF.push_back(std::move(df));
                dG.push_back(std::move(dg));
                if (dF.size() > depth) {
                    dF.erase(dF.begin());
                    dG.erase(dG.begin());
                }
            }
            f_prev = f;
            g_prev = g;
            std::vector<double> gamma = detail::least_squares(dF, f);
            x = g;
            for (size_t j = 0; j < gamma.size(); ++j) {
                for (size_t i = 0; i < m; ++i) x[i] -= gamma[j] * dG[j][i];
            }
            if (!gamma.empty()) {
                double total = 0;
                for (double v : x) total += v;
                for (double& v : x) v /= total;
            }
        }
        LengthDistribution current(half_width_, r.converged ? g : x);
        double mass = current.total();
        ensure(std::abs(mass - 1) < 1e-10, "master equation lost normalization");
        r.boundary_mass = boundary_mass(current);
        require(r.boundary_mass < 0.05, "length lattice too small for this p; increase the half width");
        current.mark_steady(r.converged);
        r.steady = std::move(current);
        return r;
    }

   private:
    size_t wrap(int64_t l) const {
        int64_t m = 2 * half_width_ + 1;
        return static_cast<size_t>(((l % m) + m) % m);
    }

    double p_;
    int64_t half_width_;
    detail::PeriodicFft fft_;
    std::vector<std::complex<double>> input_spectrum_;
};

/// One application of the master-equation kernel.
inline LengthDistribution master_eq_step(const LengthDistribution& in, double p) {
    MasterEquation eq(p, in.half_width());
    return eq.step(in);
}

/// Lattice momenta k_m = 2 pi m / (2L + 1), m = 0..L.
inline std::vector<double> lattice_momenta(int64_t half_width) {
    std::vector<double> out;
    double m = static_cast<double>(2 * half_width + 1);
    for (int64_t j = 0; j <= half_width; ++j) {
        out.push_back(2 * std::numbers::pi * static_cast<double>(j) / m);
    }
    return out;
}

/// Sum_l e^{-i k l} P(l) at the lattice momenta (real part; P is symmetric).
inline std::vector<double> momentum_transform(const LengthDistribution& d) {
    int64_t L = d.half_width();
    int64_t m = 2 * L + 1;
    detail::PeriodicFft fft(static_cast<size_t>(m));
    for (int64_t l = -L; l <= L; ++l) {
        fft.real()[((l % m) + m) % m] = d[l];
    }
    fft.forward();
    std::vector<double> out(static_cast<size_t>(L + 1));
    for (int64_t j = 0; j <= L; ++j) {
        out[static_cast<size_t>(j)] = fft.spectrum()[j].real();
    }
    return out;
}

/// Largest |transform - closed form| over the lattice momenta.
inline double fourier_mismatch(const LengthDistribution& d, double p) {
    auto ks = lattice_momenta(d.half_width());
    auto ft = momentum_transform(d);
    double worst = 0;
    for (size_t j = 0; j < ks.size(); ++j) {
        worst = std::max(worst, std::abs(ft[j] - steady_state_momentum(ks[j], p)));
    }
    return worst;
}

/// Predicted tail coefficient c in P(l) ~ c / l^2.
inline double predicted_tail_coefficient(double p) { return 1.0 / (std::numbers::pi * std::sqrt(2 * p)); }

/// Least-squares c in P(l) = c g(l) over L/8 <= |l| <= L/2, where
/// g(l) = (pi/m)^2 / sin^2(pi l / m) is 1/l^2 summed over periodic images.
inline double tail_coefficient(const LengthDistribution& d) {
    require(d.steady(), "tail coefficient needs a converged steady state");
    int64_t L = d.half_width();
    double m = static_cast<double>(2 * L + 1);
    double num = 0, den = 0;
    for (int64_t l = std::max<int64_t>(1, L / 8); l <= L / 2; ++l) {
        double s = std::sin(std::numbers::pi * static_cast<double>(l) / m);
        double g = (std::numbers::pi / m) * (std::numbers::pi / m) / (s * s);
        double v = 0.5 * (d[l] + d[-l]);
        num += v * g;
        den += g * g;
    }
    return num / den;
}

/// Half-chain entropy of an n-site chain whose arcs have translation-invariant
/// length distribution P: sum over x <= n/2 < y <= n of [P(y-x) + P(x-y)] / 2.
inline double entropy_from_lengths(const LengthDistribution& d, int64_t n) {
    require(n >= 2, "entropy from lengths needs n >= 2");
    require(n - 1 <= d.half_width(), "chain longer than the length lattice");
    int64_t h = n / 2;
    double s = 0;
    for (int64_t l = 1; l < n; ++l) {
        int64_t pairs = std::min(h, n - l) - std::max<int64_t>(1, h + 1 - l) + 1;
        if (pairs > 0) {
            s += 0.5 * static_cast<double>(pairs) * (d[l] + d[-l]);
        }
    }
    return s;
}

}  // namespace matchdope
