#pragma once

#include "parkcrit/arrival_law.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace parkcrit {

/// Inverse-CDF sampler on 64-bit uniforms. Atoms are cut where the remaining
/// mass drops below 1e-18 (or after 4096 atoms); the cut mass goes to the last
/// kept atom and is reported in `truncated_mass`.
class ArrivalSampler {
public:
    explicit ArrivalSampler(const ArrivalLaw& law);

    std::uint32_t operator()(std::uint64_t u) const {
        if (u < thresholds_[0]) return 0;
        std::uint32_t k = 1;
        while (k < last_ && u >= thresholds_[k]) ++k;
        return k;
    }

    double truncated_mass() const noexcept { return truncated_mass_; }
    std::size_t atoms() const noexcept { return static_cast<std::size_t>(last_) + 1; }

private:
    // thresholds_[k] = floor(2^64 P(A <= k)); thresholds_[last_] is 2^64 - 1.
    std::uint32_t last_ = 0;
    std::vector<std::uint64_t> thresholds_;
    double truncated_mass_ = 0.0;
};

/// Uniform 64-bit word for a node. Heap numbering (root 1, children 2i and
/// 2i + 1) keys the node, so truncations at different depths share arrivals.
std::uint64_t node_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t heap_index) noexcept;

/// X(root) on the tree truncated at `depth` (depth 0 is the root alone), by
/// post-order recursion with O(depth) memory.
std::uint64_t sample_root_count(const ArrivalSampler& sampler, int depth, std::uint64_t seed, std::uint64_t sample);

struct SimulationConfig {
    int depth = 18;
    std::uint64_t samples = 20000;
    std::uint64_t seed = 1;
    /// 0 = all available workers (still capped by PARKCRIT_THREADS).
    unsigned threads = 0;
    /// Upper bound on samples * (2^{depth+1} - 1).
    double budget = 1e11;
};

struct ClusterBin {
    std::uint64_t count = 0;
    std::uint64_t censored = 0;
};

struct SimulationStats {
    int depth = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double p_hat_circ = 0.0;
    double ci_half_width = 0.0;
    /// Empirical mean of X(root) and its standard error.
    double mean_visits = 0.0;
    double mean_stderr = 0.0;
    /// k -> number of samples with X(root) = k.
    std::map<std::uint64_t, std::uint64_t> visit_histogram;
    /// Root black-cluster sizes (size 0 when the root stays empty); present
    /// only for cluster runs. Clusters reaching the truncation level count as
    /// censored.
    std::optional<std::map<std::uint64_t, ClusterBin>> cluster_sizes;
    double wall_time = 0.0;

    double censored_fraction() const;
    double probability(std::uint64_t k) const;
};

SimulationStats estimate_p_circ(const ArrivalLaw& law, const SimulationConfig& config);

/// Materializes the truncated tree per sample (depth <= 22, else
/// BudgetExceeded) and records the root's black cluster.
SimulationStats root_cluster_stats(const ArrivalLaw& law, const SimulationConfig& config);

} // namespace parkcrit
