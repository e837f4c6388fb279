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
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matchdope/ensemble.hpp"
#include "matchdope/errors.hpp"
#include "matchdope/rng.hpp"

namespace matchdope {

/// Raised when a grid search lands on the edge of its grid.
struct GridBoundaryFault : NonConvergence {
    using NonConvergence::NonConvergence;
};

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double slope_error = 0;
    double intercept_error = 0;
    size_t points = 0;
};

/// Ordinary (or weighted, when `weights` is nonempty) least squares y = a + b x.
/// Errors are the usual residual-scaled standard errors.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                            std::span<const double> weights = {}) {
    require(x.size() == y.size() && x.size() >= 2, "linear fit needs at least two points");
    require(weights.empty() || weights.size() == x.size(), "weights do not match points");
    size_t n = x.size();
    auto w = [&](size_t i) { return weights.empty() ? 1.0 : weights[i]; };
    double sw = 0, sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sw += w(i);
        sx += w(i) * x[i];
        sy += w(i) * y[i];
    }
    double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += w(i) * (x[i] - mx) * (x[i] - mx);
        sxy += w(i) * (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0, "linear fit needs at least two distinct abscissae");
    LinearFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double rss = 0;
        for (size_t i = 0; i < n; ++i) {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += w(i) * r * r;
        }
        double s2 = rss / static_cast<double>(n - 2);
        fit.slope_error = std::sqrt(s2 / sxx);
        fit.intercept_error = std::sqrt(s2 * (1.0 / sw + mx * mx / sxx));
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Power laws.

struct ExponentFit {
    double exponent = 0;
    double error = 0;
    double prefactor = 0;
    size_t points = 0;
    double lo = 0;
    double hi = 0;
};

/// Slope of log y against log x over the points with lo <= x <= hi. The error
/// is the standard deviation of the slope over `bootstrap` pair resamplings.
inline ExponentFit fit_exponent(std::span<const double> x, std::span<const double> y, double lo, double hi,
                                size_t bootstrap = 400, uint64_t seed = 0x5EED) {
    require(x.size() == y.size(), "abscissae and values differ in length");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= lo && x[i] <= hi) {
            require(x[i] > 0 && y[i] > 0, "power-law fit window contains nonpositive values");
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    require(lx.size() >= 8, "power-law fit window needs at least 8 points");
    LinearFit base = linear_fit(lx, ly);
    ExponentFit out;
    out.exponent = base.slope;
    out.prefactor = std::exp(base.intercept);
    out.points = lx.size();
    out.lo = lo;
    out.hi = hi;
    if (bootstrap >= 2) {
        RandomStream rng(seed, StreamId::Auxiliary);
        std::vector<double> slopes;
        std::vector<double> bx(lx.size()), by(lx.size());
        for (size_t b = 0; b < bootstrap; ++b) {
            for (size_t i = 0; i < lx.size(); ++i) {
                size_t k = rng.below(lx.size());
                bx[i] = lx[k];
                by[i] = ly[k];
            }
            auto [mn, mx] = std::minmax_element(bx.begin(), bx.end());
            if (*mn == *mx) continue;
            slopes.push_back(linear_fit(bx, by).slope);
        }
        double m = std::accumulate(slopes.begin(), slopes.end(), 0.0) / static_cast<double>(slopes.size());
        double v = 0;
        for (double s : slopes) v += (s - m) * (s - m);
        out.error = std::sqrt(v / static_cast<double>(slopes.size() - 1));
    }
    return out;
}

/// Which ensemble statistic a fit reads.
enum class SeriesStatistic { Mean, StdDev };

/// Exponent of the mean entropy (or its fluctuation) at cut index `ci` against time.
inline ExponentFit fit_exponent(const EnsembleSeries& series, size_t ci, SeriesStatistic stat, double lo, double hi,
                                size_t bootstrap = 400, uint64_t seed = 0x5EED) {
    std::vector<double> t, y;
    for (size_t ti = 0; ti < series.times().size(); ++ti) {
        t.push_back(static_cast<double>(series.times()[ti]));
        y.push_back(stat == SeriesStatistic::Mean ? series.mean(ti, ci) : series.std_dev(ti, ci));
    }
    return fit_exponent(t, y, lo, hi, bootstrap, seed);
}

/// Power law with an additive logarithm, y = A x^alpha + b ln x. alpha is
/// scanned on [alpha_lo, alpha_hi]; A and b are linear least squares.
struct LogCorrectedPowerLaw {
    double alpha = 0;
    double amplitude = 0;
    double log_coefficient = 0;
    double rss = 0;
};

inline LogCorrectedPowerLaw fit_power_law_log_corrected(std::span<const double> x, std::span<const double> y,
                                                        double alpha_lo = 0.0, double alpha_hi = 2.0,
                                                        size_t steps = 2001) {
    require(x.size() == y.size() && x.size() >= 3, "log-corrected fit needs at least three points");
    for (double v : x) require(v > 1, "log-corrected fit needs x > 1");
    LogCorrectedPowerLaw best;
    best.rss = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < steps; ++s) {
        double alpha = alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(s) / static_cast<double>(steps - 1);
        double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            double u = std::pow(x[i], alpha), v = std::log(x[i]);
            a11 += u * u;
            a12 += u * v;
            a22 += v * v;
            b1 += u * y[i];
            b2 += v * y[i];
        }
        double det = a11 * a22 - a12 * a12;
        if (std::abs(det) < 1e-12 * a11 * a22) continue;
        double amp = (b1 * a22 - b2 * a12) / det;
        double lc = (a11 * b2 - a12 * b1) / det;
        double rss = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            double r = y[i] - amp * std::pow(x[i], alpha) - lc * std::log(x[i]);
            rss += r * r;
        }
        if (rss < best.rss) best = {alpha, amp, lc, rss};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Logarithmic prefactor.

struct LogPrefactorFit {
    double c_eff = 0;
    double error = 0;
    double intercept = 0;
    size_t sizes = 0;
};

/// c_eff = 3 dS/d(ln N) for entropies in bits. Entropies in nats are ln 2 times
/// larger, so c_eff(nats) = ln 2 * c_eff(bits).
inline LogPrefactorFit fit_log_prefactor(std::span<const double> sizes, std::span<const double> values,
                                         std::span<const double> errors = {}) {
    require(sizes.size() == values.size(), "sizes and values differ in length");
    require(sizes.size() >= 3, "logarithmic prefactor needs at least 3 system sizes");
    std::vector<double> lx, w;
    for (size_t i = 0; i < sizes.size(); ++i) {
        require(sizes[i] > 0, "system sizes must be positive");
        lx.push_back(std::log(sizes[i]));
        if (!errors.empty()) w.push_back(1.0 / std::max(errors[i] * errors[i], 1e-300));
    }
    LinearFit fit = linear_fit(lx, values, w);
    LogPrefactorFit out;
    out.c_eff = 3 * fit.slope;
    out.intercept = fit.intercept;
    out.sizes = sizes.size();
    if (!errors.empty()) {
        double sw = 0, sx = 0, sxx = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sw += w[i];
            sx += w[i] * lx[i];
            sxx += w[i] * lx[i] * lx[i];
        }
        out.error = 3 * std::sqrt(sw / (sw * sxx - sx * sx));
    } else {
        out.error = 3 * fit.slope_error;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Page-curve deviation.

struct PageDeviation {
    std::vector<double> doping;  ///< N_NG / N per level
    std::vector<double> delta;   ///< reference minus value
    std::vector<double> delta_error;
    double rate = 0;
    double rate_error = 0;
    bool monotone = true;
    size_t fitted_points = 0;
};

/// Deviation of half-chain Page values from a Clifford reference, and the rate a
/// in delta ~ exp(-a N_NG / N) from a weighted fit over the positive deviations.
inline PageDeviation page_deviation(double reference, double reference_error, std::span<const double> doping,
                                    std::span<const double> values, std::span<const double> errors) {
    require(doping.size() == values.size() && values.size() == errors.size(), "deviation inputs differ in length");
    require(doping.size() >= 2, "deviation needs at least two doping levels");
    PageDeviation out;
    std::vector<double> fx, fy, fw;
    for (size_t i = 0; i < doping.size(); ++i) {
        double d = reference - values[i];
        double e = std::hypot(reference_error, errors[i]);
        out.doping.push_back(doping[i]);
        out.delta.push_back(d);
        out.delta_error.push_back(e);
        if (i > 0 && doping[i] > doping[i - 1] && d > out.delta[i - 1]) out.monotone = false;
        if (d > 2 * e && d > 0) {
            fx.push_back(doping[i]);
            fy.push_back(std::log(d));
            fw.push_back(d * d / std::max(e * e, 1e-300));
        }
    }
    out.fitted_points = fx.size();
    if (fx.size() >= 2) {
        LinearFit fit = linear_fit(fx, fy, fw);
        out.rate = -fit.slope;
        double sw = 0, sx = 0, sxx = 0;
        for (size_t i = 0; i < fx.size(); ++i) {
            sw += fw[i];
            sx += fw[i] * fx[i];
            sxx += fw[i] * fx[i] * fx[i];
        }
        out.rate_error = std::sqrt(sw / (sw * sxx - sx * sx));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite-size scaling collapse.

struct CollapsePoint {
    double p = 0;
    double n = 0;
    double value = 0;
    double error = 0;
};

struct GridAxis {
    double lo = 0;
    double hi = 0;
    size_t steps = 2;
    double at(size_t i) const { return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1); }
    double spacing() const { return (hi - lo) / static_cast<double>(steps - 1); }
};

struct CollapseOptions {
    GridAxis pc{0.05, 0.6, 56};
    GridAxis nu{0.4, 4.0, 37};
    GridAxis a{-0.5, 2.0, 51};
    size_t bootstrap = 100;
    uint64_t seed = 0xC011A95E;
    size_t workers = 1;
};

struct Interval {
    double lo = 0;
    double hi = 0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

struct CollapseResult {
    double pc = 0;
    double nu = 0;
    double a = 0;
    double cost = 0;
    Interval pc_interval;
    Interval nu_interval;
    Interval a_interval;
    size_t bootstrap_used = 0;
    size_t bootstrap_failed = 0;
    bool local_optimum = false;
};

namespace detail {

/// Solves min |A d - b|^2 subject to d >= 0, given the Gram matrix G = A^T A
/// and h = A^T b (Lawson-Hanson active set).
inline std::vector<double> nnls_gram(const std::vector<std::vector<double>>& G, const std::vector<double>& h) {
    const size_t k = h.size();
    std::vector<double> d(k, 0.0);
    std::vector<bool> active(k, false);
    auto solve_active = [&]() {
        std::vector<size_t> idx;
        for (size_t j = 0; j < k; ++j) {
            if (active[j]) idx.push_back(j);
        }
        size_t n = idx.size();
        std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < n; ++c) m[r][c] = G[idx[r]][idx[c]];
            m[r][n] = h[idx[r]];
        }
        for (size_t c = 0; c < n; ++c) {
            size_t piv = c;
            for (size_t r = c + 1; r < n; ++r) {
                if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
            }
            std::swap(m[c], m[piv]);
            if (std::abs(m[c][c]) < 1e-300) continue;
            for (size_t r = c + 1; r < n; ++r) {
                double f = m[r][c] / m[c][c];
                for (size_t cc = c; cc <= n; ++cc) m[r][cc] -= f * m[c][cc];
            }
        }
        std::vector<double> z(k, 0.0);
        for (size_t r = n; r-- > 0;) {
            double acc = m[r][n];
            for (size_t c = r + 1; c < n; ++c) acc -= m[r][c] * z[idx[c]];
            z[idx[r]] = std::abs(m[r][r]) < 1e-300 ? 0.0 : acc / m[r][r];
        }
        return z;
    };
    double scale = 0;
    for (size_t j = 0; j < k; ++j) scale = std::max(scale, std::abs(h[j]));
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (size_t outer = 0; outer < 3 * k + 3; ++outer) {
        size_t pick = k;
        double best = tol;
        for (size_t j = 0; j < k; ++j) {
            if (active[j]) continue;
            double grad = h[j];
            for (size_t c = 0; c < k; ++c) grad -= G[j][c] * d[c];
            if (grad > best) {
                best = grad;
                pick = j;
            }
        }
        if (pick == k) break;
        active[pick] = true;
        for (size_t inner = 0; inner <= k; ++inner) {
            std::vector<double> z = solve_active();
            bool feasible = true;
            double alpha = 1.0;
            for (size_t j = 0; j < k; ++j) {
                if (active[j] && z[j] <= 0) {
                    feasible = false;
                    alpha = std::min(alpha, d[j] / (d[j] - z[j]));
                }
            }
            if (feasible) {
                d = z;
                break;
            }
            for (size_t j = 0; j < k; ++j) {
                if (!active[j]) continue;
                d[j] += alpha * (z[j] - d[j]);
                if (d[j] <= 1e-15) {
                    d[j] = 0;
                    active[j] = false;
                }
            }
        }
    }
    return d;
}

/// Weighted least-squares nonincreasing piecewise-linear fit of y against x,
/// with breakpoints at evenly spaced order statistics of x. The fit moves
/// continuously with the x values.
inline std::vector<double> monotone_spline_fit(const std::vector<double>& x, const std::vector<double>& y,
                                               const std::vector<double>& w, size_t segments) {
    const size_t m = x.size();
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> knots;
    for (size_t j = 0; j <= segments; ++j) {
        double pos = static_cast<double>(j) * static_cast<double>(m - 1) / static_cast<double>(segments);
        auto i = static_cast<size_t>(pos);
        double f = pos - static_cast<double>(i);
        knots.push_back(i + 1 < m ? sorted[i] * (1 - f) + sorted[i + 1] * f : sorted[i]);
    }
    // Ramps r_j rise from 0 to 1 across segment j; f = c - sum_j d_j r_j with d >= 0.
    std::vector<std::vector<double>> ramp;
    for (size_t j = 1; j <= segments; ++j) {
        double width = knots[j] - knots[j - 1];
        if (!(width > 0)) continue;
        std::vector<double> col(m);
        for (size_t i = 0; i < m; ++i) col[i] = std::clamp((x[i] - knots[j - 1]) / width, 0.0, 1.0);
        ramp.push_back(std::move(col));
    }
    double sw = 0, swy = 0;
    for (size_t i = 0; i < m; ++i) {
        sw += w[i];
        swy += w[i] * y[i];
    }
    // The free constant is eliminated by weighted centering; columns enter as -r_j.
    const size_t k = ramp.size();
    std::vector<double> mean(k, 0.0);
    for (size_t j = 0; j < k; ++j) {
        for (size_t i = 0; i < m; ++i) mean[j] += w[i] * ramp[j][i];
        mean[j] /= sw;
    }
    double ybar = swy / sw;
    std::vector<std::vector<double>> G(k, std::vector<double>(k, 0.0));
    std::vector<double> h(k, 0.0);
    for (size_t i = 0; i < m; ++i) {
        for (size_t a = 0; a < k; ++a) {
            double ua = -(ramp[a][i] - mean[a]);
            h[a] += w[i] * ua * (y[i] - ybar);
            for (size_t b = a; b < k; ++b) G[a][b] += w[i] * ua * -(ramp[b][i] - mean[b]);
        }
    }
    for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < a; ++b) G[a][b] = G[b][a];
    }
    std::vector<double> d = nnls_gram(G, h);
    std::vector<double> fitted(m, ybar);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < k; ++j) fitted[i] -= d[j] * (ramp[j][i] - mean[j]);
    }
    return fitted;
}

}  // namespace detail

/// Mean squared scatter, in units of the point errors, of the rescaled points
/// (x, y) = ((p - pc) N^(1/nu), S - a ln N) about a nonincreasing
/// piecewise-linear spline fitted to the pooled cloud. Only points whose x
/// lies inside the x-range of at least one other size contribute; fewer than
/// half of the points overlapping yields +infinity.
inline double collapse_cost(std::span<const CollapsePoint> pts, double pc, double nu, double a) {
    size_t m = pts.size();
    std::vector<double> x(m), y(m), w(m);
    for (size_t i = 0; i < m; ++i) {
        x[i] = (pts[i].p - pc) * std::pow(pts[i].n, 1.0 / nu);
        y[i] = pts[i].value - a * std::log(pts[i].n);
        w[i] = 1.0 / std::max(pts[i].error * pts[i].error, 1e-12);
    }
    size_t segments = std::clamp<size_t>(m / 4, 1, 12);
    std::vector<double> fitted = detail::monotone_spline_fit(x, y, w, segments);

    // x-range of every size.
    std::vector<double> sizes;
    for (const auto& pt : pts) sizes.push_back(pt.n);
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    std::vector<double> xmin(sizes.size(), std::numeric_limits<double>::infinity());
    std::vector<double> xmax(sizes.size(), -std::numeric_limits<double>::infinity());
    std::vector<size_t> size_of(m);
    for (size_t i = 0; i < m; ++i) {
        size_of[i] = static_cast<size_t>(std::lower_bound(sizes.begin(), sizes.end(), pts[i].n) - sizes.begin());
        xmin[size_of[i]] = std::min(xmin[size_of[i]], x[i]);
        xmax[size_of[i]] = std::max(xmax[size_of[i]], x[i]);
    }
    double sum = 0;
    size_t used = 0;
    for (size_t i = 0; i < m; ++i) {
        bool overlaps = false;
        for (size_t s = 0; s < sizes.size(); ++s) {
            if (s != size_of[i] && x[i] >= xmin[s] && x[i] <= xmax[s]) overlaps = true;
        }
        if (!overlaps) continue;
        double r = y[i] - fitted[i];
        sum += w[i] * r * r;
        ++used;
    }
    if (2 * used < m) return std::numeric_limits<double>::infinity();
    return sum / static_cast<double>(used);
}

namespace detail {

struct CollapseOptimum {
    double pc, nu, a, cost;
    bool on_boundary;
};

inline CollapseOptimum optimize_collapse(std::span<const CollapsePoint> pts, const CollapseOptions& opt) {
    CollapseOptimum best{0, 0, 0, std::numeric_limits<double>::infinity(), false};
    size_t bi = 0, bj = 0, bk = 0;
    for (size_t i = 0; i < opt.pc.steps; ++i) {
        for (size_t j = 0; j < opt.nu.steps; ++j) {
            for (size_t k = 0; k < opt.a.steps; ++k) {
                double c = collapse_cost(pts, opt.pc.at(i), opt.nu.at(j), opt.a.at(k));
                if (c < best.cost) {
                    best = {opt.pc.at(i), opt.nu.at(j), opt.a.at(k), c, false};
                    bi = i;
                    bj = j;
                    bk = k;
                }
            }
        }
    }
    best.on_boundary = bi == 0 || bi + 1 == opt.pc.steps || bj == 0 || bj + 1 == opt.nu.steps || bk == 0 ||
                       bk + 1 == opt.a.steps;
    // Compass search inside one grid cell around the grid optimum.
    std::array<double, 3> step{opt.pc.spacing() / 2, opt.nu.spacing() / 2, opt.a.spacing() / 2};
    std::array<double, 3> lo{opt.pc.lo, opt.nu.lo, opt.a.lo}, hi{opt.pc.hi, opt.nu.hi, opt.a.hi};
    std::array<double, 3> cur{best.pc, best.nu, best.a};
    for (int round = 0; round < 40; ++round) {
        bool moved = false;
        for (int d = 0; d < 3; ++d) {
            for (double sign : {-1.0, 1.0}) {
                auto trial = cur;
                trial[d] = std::clamp(trial[d] + sign * step[d], lo[d], hi[d]);
                double c = collapse_cost(pts, trial[0], trial[1], trial[2]);
                if (c < best.cost) {
                    best.cost = c;
                    cur = trial;
                    moved = true;
                }
            }
        }
        if (!moved) {
            for (auto& s : step) s /= 2;
        }
    }
    best.pc = cur[0];
    best.nu = cur[1];
    best.a = cur[2];
    return best;
}

inline Interval percentile_interval(std::vector<double> v, double coverage) {
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    std::sort(v.begin(), v.end());
    double tail = (1 - coverage) / 2;
    auto at = [&](double q) {
        double pos = q * static_cast<double>(v.size() - 1);
        auto i = static_cast<size_t>(pos);
        double f = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
    };
    return {at(tail), at(1 - tail)};
}

}  // namespace detail

/// Collapse optimum over (pc, nu, a): full grid, then compass refinement.
/// Intervals are 95% percentile intervals over parametric bootstrap replicas
/// that redraw each point from a normal with its standard error.
inline CollapseResult scaling_collapse(std::span<const CollapsePoint> pts, const CollapseOptions& opt = {}) {
    std::vector<double> sizes, rates;
    for (const auto& pt : pts) {
        require(pt.n > 1 && pt.error >= 0, "collapse points need N > 1 and nonnegative errors");
        sizes.push_back(pt.n);
        rates.push_back(pt.p);
    }
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    std::sort(rates.begin(), rates.end());
    rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
    require(sizes.size() >= 4, "scaling collapse needs at least 4 system sizes");
    require(rates.size() >= 7, "scaling collapse needs at least 7 measurement rates");
    require(opt.pc.steps >= 3 && opt.nu.steps >= 3 && opt.a.steps >= 3, "collapse grids need at least 3 steps");
    require(opt.nu.lo > 0, "nu grid must be positive");

    auto best = detail::optimize_collapse(pts, opt);
    if (best.on_boundary) {
        throw GridBoundaryFault("collapse optimum lies on the grid boundary; widen the grid");
    }
    CollapseResult out;
    out.pc = best.pc;
    out.nu = best.nu;
    out.a = best.a;
    out.cost = best.cost;

    out.local_optimum = true;
    for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
            for (int dk = -1; dk <= 1; ++dk) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                double c = collapse_cost(pts, best.pc + di * opt.pc.spacing(), best.nu + dj * opt.nu.spacing(),
                                         best.a + dk * opt.a.spacing());
                if (c < best.cost) out.local_optimum = false;
            }
        }
    }

    std::vector<std::optional<detail::CollapseOptimum>> reps(opt.bootstrap);
    parallel_for(opt.bootstrap, opt.workers, [&](size_t b, size_t) {
        RandomStream rng(opt.seed, b + 1);
        std::vector<CollapsePoint> resampled(pts.begin(), pts.end());
        for (auto& pt : resampled) pt.value += pt.error * rng.normal();
        auto r = detail::optimize_collapse(resampled, opt);
        if (!r.on_boundary) reps[b] = r;
    });
    std::vector<double> pcs, nus, as;
    for (const auto& r : reps) {
        if (!r) {
            ++out.bootstrap_failed;
            continue;
        }
        pcs.push_back(r->pc);
        nus.push_back(r->nu);
        as.push_back(r->a);
    }
    out.bootstrap_used = pcs.size();
    out.pc_interval = detail::percentile_interval(pcs, 0.95);
    out.nu_interval = detail::percentile_interval(nus, 0.95);
    out.a_interval = detail::percentile_interval(as, 0.95);
    return out;
}

}  // namespace matchdope
