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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "matchdope/circuit.hpp"
#include "matchdope/errors.hpp"
#include "matchdope/rng.hpp"

namespace matchdope {

/// Ensemble statistics of recorded entropies.
///
/// Entropies are integers (bits), so the ensemble keeps exact integer sums of
/// S and S^2. Merging shards is then exactly associative and the result does
/// not depend on how trajectories were split across workers.
class EnsembleSeries {
   public:
    EnsembleSeries() = default;
    EnsembleSeries(uint64_t config_hash, std::vector<size_t> times, std::vector<size_t> cuts)
        : config_hash_(config_hash),
          times_(std::move(times)),
          cuts_(std::move(cuts)),
          sum_(times_.size() * cuts_.size(), 0),
          sum_sq_(times_.size() * cuts_.size(), 0),
          n_ng_sum_(times_.size(), 0) {}

    static EnsembleSeries for_config(const CircuitConfig& cfg) {
        return EnsembleSeries(cfg.fingerprint_hash(), cfg.times(), cfg.cuts);
    }

    void add(const TrajectoryRecord& rec) {
        if (count_ == 0 && times_.empty() && cuts_.empty()) {
            *this = EnsembleSeries(rec.config_hash, rec.times, rec.cuts);
        }
        require(rec.config_hash == config_hash_ && rec.times == times_ && rec.cuts == cuts_,
                "trajectory record does not belong to this ensemble");
        for (size_t k = 0; k < sum_.size(); ++k) {
            int64_t s = rec.entropies[k];
            sum_[k] += s;
            sum_sq_[k] += s * s;
        }
        for (size_t ti = 0; ti < times_.size(); ++ti) {
            n_ng_sum_[ti] += rec.n_ng[ti];
        }
        gates_ += rec.gates_applied;
        measurements_ += rec.measurements;
        ++count_;
    }

    void merge(const EnsembleSeries& other) {
        if (other.count_ == 0) {
            return;
        }
        if (count_ == 0 && times_.empty() && cuts_.empty()) {
            *this = other;
            return;
        }
        require(other.config_hash_ == config_hash_ && other.times_ == times_ && other.cuts_ == cuts_,
                "cannot merge ensembles of different configurations");
        for (size_t k = 0; k < sum_.size(); ++k) {
            sum_[k] += other.sum_[k];
            sum_sq_[k] += other.sum_sq_[k];
        }
        for (size_t ti = 0; ti < times_.size(); ++ti) {
            n_ng_sum_[ti] += other.n_ng_sum_[ti];
        }
        gates_ += other.gates_;
        measurements_ += other.measurements_;
        count_ += other.count_;
    }

    uint64_t config_hash() const { return config_hash_; }
    uint64_t count() const { return count_; }
    const std::vector<size_t>& times() const { return times_; }
    const std::vector<size_t>& cuts() const { return cuts_; }
    uint64_t gates_applied() const { return gates_; }
    uint64_t measurements() const { return measurements_; }

    int64_t sum(size_t ti, size_t ci) const { return sum_[ti * cuts_.size() + ci]; }
    int64_t sum_sq(size_t ti, size_t ci) const { return sum_sq_[ti * cuts_.size() + ci]; }

    double mean(size_t ti, size_t ci) const {
        return count_ == 0 ? 0.0 : static_cast<double>(sum(ti, ci)) / static_cast<double>(count_);
    }

    /// Across-realization standard deviation (n - 1 normalization); 0 for one record.
    double std_dev(size_t ti, size_t ci) const {
        if (count_ < 2) {
            return 0.0;
        }
        auto n = static_cast<double>(count_);
        // n * sum_sq - sum^2 is an exact integer before the division.
        auto s = static_cast<__int128>(sum(ti, ci));
        __int128 numer = static_cast<__int128>(count_) * sum_sq(ti, ci) - s * s;
        return std::sqrt(static_cast<double>(numer) / (n * (n - 1)));
    }

    double std_error(size_t ti, size_t ci) const {
        return count_ == 0 ? 0.0 : std_dev(ti, ci) / std::sqrt(static_cast<double>(count_));
    }

    double n_ng_mean(size_t ti) const {
        return count_ == 0 ? 0.0 : static_cast<double>(n_ng_sum_[ti]) / static_cast<double>(count_);
    }

    /// Mean time series at one cut.
    std::vector<double> mean_series(size_t ci) const {
        std::vector<double> out(times_.size());
        for (size_t ti = 0; ti < times_.size(); ++ti) out[ti] = mean(ti, ci);
        return out;
    }
    std::vector<double> std_series(size_t ci) const {
        std::vector<double> out(times_.size());
        for (size_t ti = 0; ti < times_.size(); ++ti) out[ti] = std_dev(ti, ci);
        return out;
    }

    bool operator==(const EnsembleSeries&) const = default;

   private:
    uint64_t config_hash_ = 0;
    std::vector<size_t> times_;
    std::vector<size_t> cuts_;
    std::vector<int64_t> sum_;
    std::vector<int64_t> sum_sq_;
    std::vector<uint64_t> n_ng_sum_;
    uint64_t gates_ = 0;
    uint64_t measurements_ = 0;
    uint64_t count_ = 0;
};

inline EnsembleSeries aggregate(std::span<const TrajectoryRecord> records) {
    EnsembleSeries out;
    for (const auto& rec : records) {
        out.add(rec);
    }
    return out;
}

/// Calls fn(index) for every index in [0, count) on `workers` threads.
/// Exceptions from any worker are rethrown on the calling thread.
template <class Fn>
void parallel_for(size_t count, size_t workers, Fn&& fn) {
    workers = std::max<size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (size_t i = 0; i < count; ++i) fn(i, size_t{0});
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    fn(i, w);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// All trajectories of an ensemble, in trajectory-index order.
inline std::vector<TrajectoryRecord> run_ensemble(const CircuitConfig& cfg, uint64_t master_seed, size_t shots,
                                                  size_t workers = 1) {
    cfg.validate();
    std::vector<TrajectoryRecord> out(shots);
    parallel_for(shots, workers, [&](size_t i, size_t) { out[i] = run_trajectory(cfg, trajectory_seed(master_seed, i)); });
    return out;
}

/// Aggregated ensemble without keeping individual records: one shard per worker,
/// merged at the end.
inline EnsembleSeries simulate_series(const CircuitConfig& cfg, uint64_t master_seed, size_t shots,
                                      size_t workers = 1) {
    cfg.validate();
    workers = std::max<size_t>(1, std::min(workers, shots));
    std::vector<EnsembleSeries> shards(workers, EnsembleSeries::for_config(cfg));
    parallel_for(shots, workers,
                 [&](size_t i, size_t w) { shards[w].add(run_trajectory(cfg, trajectory_seed(master_seed, i))); });
    EnsembleSeries out = EnsembleSeries::for_config(cfg);
    for (const auto& s : shards) out.merge(s);
    return out;
}

}  // namespace matchdope
