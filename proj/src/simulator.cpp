#include "parkcrit/simulator.hpp"

#include "parkcrit/error.hpp"
#include "parkcrit/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace parkcrit {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t max_u64 = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t fmix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t sample_key(std::uint64_t seed, std::uint64_t sample) noexcept {
    return fmix(fmix(seed + golden) ^ (sample * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

// wyrand step with the heap index as counter: one 64x64 -> 128 multiply.
inline std::uint64_t node_word(std::uint64_t key, std::uint64_t heap_index) noexcept {
    const std::uint64_t s = key + heap_index * 0xA0761D6478BD642FULL;
    const u128 m = static_cast<u128>(s) * (s ^ 0xE7037ED1A0B428DBULL);
    return static_cast<std::uint64_t>(m) ^ static_cast<std::uint64_t>(m >> 64);
}

inline std::uint64_t overflow(std::uint64_t x) noexcept { return x > 1 ? x - 1 : 0; }

struct Walker {
    const ArrivalSampler& sampler;
    std::uint64_t key;

    std::uint64_t arrival(std::uint64_t i) const { return sampler(node_word(key, i)); }

    template <int H>
    std::uint64_t fixed(std::uint64_t i) const {
        if constexpr (H == 0) {
            return arrival(i);
        } else {
            const std::uint64_t l = fixed<H - 1>(2 * i);
            const std::uint64_t r = fixed<H - 1>(2 * i + 1);
            return arrival(i) + overflow(l) + overflow(r);
        }
    }

    std::uint64_t walk(std::uint64_t i, int h) const {
        switch (h) {
        case 0: return fixed<0>(i);
        case 1: return fixed<1>(i);
        case 2: return fixed<2>(i);
        case 3: return fixed<3>(i);
        case 4: return fixed<4>(i);
        case 5: return fixed<5>(i);
        default: break;
        }
        const std::uint64_t l = walk(2 * i, h - 1);
        const std::uint64_t r = walk(2 * i + 1, h - 1);
        return arrival(i) + overflow(l) + overflow(r);
    }
};

void check_config(const SimulationConfig& c, int max_depth) {
    if (c.depth < 0 || c.depth > 40) throw Error(ErrorCode::InvalidParameter, "depth must be in 0..40");
    if (c.samples == 0) throw Error(ErrorCode::InvalidParameter, "samples must be positive");
    if (c.depth > max_depth)
        throw Error(ErrorCode::BudgetExceeded, "cluster extraction materializes the tree, depth <= " +
                                                   std::to_string(max_depth));
    const double visits = static_cast<double>(c.samples) * (std::ldexp(1.0, c.depth + 1) - 1.0);
    if (visits > c.budget)
        throw Error(ErrorCode::BudgetExceeded, "samples * nodes = " + std::to_string(visits) +
                                                   " exceeds the budget " + std::to_string(c.budget));
}

using Histogram = std::map<std::uint64_t, std::uint64_t>;
using ClusterHistogram = std::map<std::uint64_t, ClusterBin>;

void finish(SimulationStats& s, const SimulationConfig& c, std::chrono::steady_clock::time_point start) {
    s.depth = c.depth;
    s.samples = c.samples;
    s.seed = c.seed;
    const double n = static_cast<double>(c.samples);
    const double zeros = s.visit_histogram.contains(0) ? static_cast<double>(s.visit_histogram.at(0)) : 0.0;
    s.p_hat_circ = zeros / n;
    s.ci_half_width = 1.96 * std::sqrt(s.p_hat_circ * (1.0 - s.p_hat_circ) / n);
    double m1 = 0.0;
    double m2 = 0.0;
    for (const auto& [k, count] : s.visit_histogram) {
        const double x = static_cast<double>(k);
        m1 += x * static_cast<double>(count);
        m2 += x * x * static_cast<double>(count);
    }
    m1 /= n;
    m2 /= n;
    s.mean_visits = m1;
    s.mean_stderr = std::sqrt(std::max(m2 - m1 * m1, 0.0) / n);
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

ArrivalSampler::ArrivalSampler(const ArrivalLaw& law) {
    constexpr std::size_t max_atoms = 4096;
    std::vector<double> mu;
    if (auto exact = law.exact_probs()) mu = law.g_series(static_cast<int>(exact->size()) - 1);
    else mu = law.g_series(static_cast<int>(max_atoms) - 1);

    const long double scale = 18446744073709551616.0L; // 2^64
    long double cum = 0.0L;
    for (std::size_t k = 0; k < mu.size(); ++k) {
        cum += static_cast<long double>(mu[k]);
        const long double t = cum * scale;
        thresholds_.push_back(t >= scale ? max_u64 : static_cast<std::uint64_t>(t));
        if (1.0L - cum < 1e-18L) break;
    }
    truncated_mass_ = static_cast<double>(std::max(1.0L - cum, 0.0L));
    thresholds_.back() = max_u64;
    last_ = static_cast<std::uint32_t>(thresholds_.size() - 1);
}

std::uint64_t node_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t heap_index) noexcept {
    return node_word(sample_key(seed, sample), heap_index);
}

std::uint64_t sample_root_count(const ArrivalSampler& sampler, int depth, std::uint64_t seed, std::uint64_t sample) {
    return Walker{sampler, sample_key(seed, sample)}.walk(1, depth);
}

double SimulationStats::censored_fraction() const {
    if (!cluster_sizes || samples == 0) return 0.0;
    std::uint64_t c = 0;
    for (const auto& [size, bin] : *cluster_sizes) c += bin.censored;
    return static_cast<double>(c) / static_cast<double>(samples);
}

double SimulationStats::probability(std::uint64_t k) const {
    auto it = visit_histogram.find(k);
    return it == visit_histogram.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
}

SimulationStats estimate_p_circ(const ArrivalLaw& law, const SimulationConfig& config) {
    check_config(config, 40);
    const auto start = std::chrono::steady_clock::now();
    const ArrivalSampler sampler(law);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(config.threads), config.samples));
    std::vector<Histogram> partial(workers);
    parallel_chunks(config.samples, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        Histogram& h = partial[w];
        for (std::size_t s = begin; s < end; ++s) ++h[sample_root_count(sampler, config.depth, config.seed, s)];
    });
    SimulationStats stats;
    for (const auto& h : partial)
        for (const auto& [k, c] : h) stats.visit_histogram[k] += c;
    finish(stats, config, start);
    return stats;
}

SimulationStats root_cluster_stats(const ArrivalLaw& law, const SimulationConfig& config) {
    check_config(config, 22);
    const auto start = std::chrono::steady_clock::now();
    const ArrivalSampler sampler(law);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(config.threads), config.samples));
    const std::uint64_t first_leaf = std::uint64_t{1} << config.depth;
    const std::uint64_t end_index = first_leaf << 1;

    std::vector<Histogram> partial(workers);
    std::vector<ClusterHistogram> partial_clusters(workers);
    parallel_chunks(config.samples, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> X(end_index, 0);
        std::vector<std::uint64_t> stack;
        for (std::size_t s = begin; s < end; ++s) {
            const std::uint64_t key = sample_key(config.seed, s);
            for (std::uint64_t i = end_index - 1; i >= 1; --i) {
                std::uint64_t x = sampler(node_word(key, i));
                if (i < first_leaf) x += overflow(X[2 * i]) + overflow(X[2 * i + 1]);
                X[i] = static_cast<std::uint32_t>(x);
            }
            ++partial[w][X[1]];

            std::uint64_t size = 0;
            bool censored = false;
            if (X[1] >= 1) {
                stack.assign(1, 1);
                while (!stack.empty()) {
                    const std::uint64_t i = stack.back();
                    stack.pop_back();
                    ++size;
                    if (i >= first_leaf) {
                        censored = true;
                        continue;
                    }
                    for (std::uint64_t c : {2 * i, 2 * i + 1})
                        if (X[c] >= 1) stack.push_back(c);
                }
            }
            ClusterBin& bin = partial_clusters[w][size];
            ++bin.count;
            if (censored) ++bin.censored;
        }
    });

    SimulationStats stats;
    stats.cluster_sizes.emplace();
    for (unsigned w = 0; w < workers; ++w) {
        for (const auto& [k, c] : partial[w]) stats.visit_histogram[k] += c;
        for (const auto& [k, bin] : partial_clusters[w]) {
            ClusterBin& b = (*stats.cluster_sizes)[k];
            b.count += bin.count;
            b.censored += bin.censored;
        }
    }
    finish(stats, config, start);
    return stats;
}

} // namespace parkcrit
