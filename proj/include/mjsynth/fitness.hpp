#pragma once

#include <cmath>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "mjsynth/grid.hpp"

namespace mjsynth {

/// Normalized occurrence frequencies of the n-by-n patterns of one grid.
/// Raw counts are kept so divergence smoothing can re-normalize over a
/// union support. Iteration order is first-seen, deterministic.
struct PatternDistribution {
    int window = 0;
    std::vector<std::pair<Pattern, std::size_t>> counts;
    std::size_t total = 0;

    std::size_t count_of(const Pattern& p) const {
        auto it = index_.find(p);
        return it == index_.end() ? 0 : counts[it->second].second;
    }
    bool contains(const Pattern& p) const { return index_.count(p) != 0; }

    double prob(const Pattern& p) const {
        return static_cast<double>(count_of(p)) / static_cast<double>(total);
    }

    static PatternDistribution from_counts(int window,
                                           std::vector<std::pair<Pattern, std::size_t>> counts) {
        PatternDistribution d;
        d.window = window;
        d.counts = std::move(counts);
        for (std::size_t i = 0; i < d.counts.size(); ++i) {
            d.total += d.counts[i].second;
            d.index_.emplace(d.counts[i].first, i);
        }
        return d;
    }

  private:
    std::unordered_map<Pattern, std::size_t, PatternHasher> index_;
};

inline PatternDistribution pattern_distribution(const Grid& g, int window) {
    std::vector<std::pair<Pattern, std::size_t>> counts;
    for (auto& po : scan_patterns(g, window))
        counts.emplace_back(std::move(po.pattern), po.occurrences.size());
    return PatternDistribution::from_counts(window, std::move(counts));
}

/// Kullback-Leibler divergence D(P||Q) in nats over the union support of
/// both distributions. Every raw count is incremented by epsilon before
/// normalization, so zero-count patterns never divide.
inline double kl_divergence(const PatternDistribution& p, const PatternDistribution& q,
                            double epsilon) {
    if (p.window != q.window) throw std::invalid_argument("window size mismatch");
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");

    std::size_t union_size = p.counts.size();
    for (const auto& [pat, cnt] : q.counts)
        if (!p.contains(pat)) ++union_size;

    const double p_total = static_cast<double>(p.total) + epsilon * union_size;
    const double q_total = static_cast<double>(q.total) + epsilon * union_size;

    double sum = 0.0;
    auto add_term = [&](const Pattern& pat) {
        const double px = (static_cast<double>(p.count_of(pat)) + epsilon) / p_total;
        const double qx = (static_cast<double>(q.count_of(pat)) + epsilon) / q_total;
        sum += px * std::log(px / qx);
    };
    for (const auto& [pat, cnt] : p.counts) add_term(pat);
    for (const auto& [pat, cnt] : q.counts)
        if (!p.contains(pat)) add_term(pat);
    return sum;
}

struct FitnessConfig {
    std::vector<int> windows{2, 3, 4};
    double w = 0.9; // novelty weight on D(sample || output)
    double epsilon = 1e-6;
};

/// Thread-safe memo of pattern distributions keyed by grid content and
/// window size; safe for concurrent readers.
class DistributionCache {
  public:
    std::shared_ptr<const PatternDistribution> get(const Grid& g, int window) {
        const Key key{grid_hash(g), g.width, g.height, window};
        {
            std::shared_lock lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        }
        auto dist = std::make_shared<const PatternDistribution>(pattern_distribution(g, window));
        std::unique_lock lock(mutex_);
        return entries_.emplace(key, std::move(dist)).first->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

  private:
    struct Key {
        std::uint64_t hash;
        int width, height, window;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHasher {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = k.hash;
            h ^= (static_cast<std::uint64_t>(k.width) << 40) ^
                 (static_cast<std::uint64_t>(k.height) << 20) ^
                 static_cast<std::uint64_t>(k.window);
            return static_cast<std::size_t>(h * 0x9e3779b97f4a7c15ULL);
        }
    };

    mutable std::shared_mutex mutex_;
    std::unordered_map<Key, std::shared_ptr<const PatternDistribution>, KeyHasher> entries_;
};

/// Weighted bidirectional divergence score, averaged over the configured
/// window sizes. Zero is the maximum, reached when the smoothed pattern
/// distributions coincide at every window.
inline double fitness(const Grid& sample, const Grid& output, const FitnessConfig& cfg,
                      DistributionCache* cache = nullptr) {
    if (cfg.windows.empty()) throw std::invalid_argument("fitness needs at least one window");
    if (cfg.w < 0.0 || cfg.w > 1.0) throw std::invalid_argument("w must lie in [0,1]");
    double sum = 0.0;
    for (int n : cfg.windows) {
        std::shared_ptr<const PatternDistribution> ps, qs;
        const PatternDistribution* p;
        const PatternDistribution* q;
        if (cache) {
            ps = cache->get(sample, n);
            qs = cache->get(output, n);
            p = ps.get();
            q = qs.get();
        } else {
            ps = std::make_shared<const PatternDistribution>(pattern_distribution(sample, n));
            qs = std::make_shared<const PatternDistribution>(pattern_distribution(output, n));
            p = ps.get();
            q = qs.get();
        }
        sum += -(cfg.w * kl_divergence(*p, *q, cfg.epsilon) +
                 (1.0 - cfg.w) * kl_divergence(*q, *p, cfg.epsilon));
    }
    return sum / static_cast<double>(cfg.windows.size()) + 0.0; // normalize -0.0
}

/// Precomputes the sample-side distributions once; evaluate() is then a
/// pure const function safe to call from concurrent workers.
class FitnessEvaluator {
  public:
    FitnessEvaluator(Grid sample, FitnessConfig cfg)
        : sample_(std::move(sample)), cfg_(std::move(cfg)) {
        for (int n : cfg_.windows) sample_dists_.push_back(cache_.get(sample_, n));
    }

    double evaluate(const Grid& output) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < cfg_.windows.size(); ++i) {
            const auto q = pattern_distribution(output, cfg_.windows[i]);
            const auto& p = *sample_dists_[i];
            sum += -(cfg_.w * kl_divergence(p, q, cfg_.epsilon) +
                     (1.0 - cfg_.w) * kl_divergence(q, p, cfg_.epsilon));
        }
        return sum / static_cast<double>(cfg_.windows.size()) + 0.0;
    }

    const FitnessConfig& config() const { return cfg_; }
    const Grid& sample() const { return sample_; }

  private:
    Grid sample_;
    FitnessConfig cfg_;
    DistributionCache cache_;
    std::vector<std::shared_ptr<const PatternDistribution>> sample_dists_;
};

} // namespace mjsynth
