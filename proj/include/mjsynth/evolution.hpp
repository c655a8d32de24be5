#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "mjsynth/fitness.hpp"
#include "mjsynth/grammar.hpp"
#include "mjsynth/interpreter.hpp"
#include "mjsynth/rng.hpp"
#include "mjsynth/rule_synth.hpp"
#include "mjsynth/threads.hpp"

namespace mjsynth {

struct Individual {
    GrammarNode tree;
    std::optional<double> fitness;
    std::uint64_t eval_seed = 0;
    std::uint64_t id = 0; // creation order; breaks survivor ties deterministically
};

using Population = std::vector<Individual>;

struct GenerationStats {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
};

struct EvolutionConfig {
    int population_size = 32;   // mu
    int offspring_pairs = 16;   // pairs per generation, two children each
    int max_generations = 200;
    double target_fitness = -0.05;
    double elitism_threshold = 0.8;
    std::array<double, 3> mutation_weights{1.0, 1.0, 1.0}; // replace, delete, add-sibling
    std::uint64_t master_seed = 0;
    int eval_repeats = 1; // phenotype executions averaged per evaluation
    int max_steps = 10000;
    int threads = 1;
    std::function<void(const GenerationStats&)> on_generation;
};

struct RunResult {
    Individual best;
    std::vector<GenerationStats> history; // entry per evaluated generation, including generation 0
    Population population;
};

/// Min-max rescaling of population fitnesses to [0,1]; a flat population
/// maps everyone to 0.5.
inline std::vector<double> relative_fitness(const Population& pop) {
    std::vector<double> out(pop.size(), 0.5);
    if (pop.empty()) return out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& ind : pop) {
        if (!ind.fitness) throw std::logic_error("relative_fitness on unevaluated population");
        lo = std::min(lo, *ind.fitness);
        hi = std::max(hi, *ind.fitness);
    }
    if (hi == lo) return out;
    for (std::size_t i = 0; i < pop.size(); ++i)
        out[i] = (*pop[i].fitness - lo) / (hi - lo);
    return out;
}

/// The genetic-programming loop: biased roulette selection with an elitism
/// rule, first-level one-point crossover, node-level mutation, mu+lambda
/// survivor selection.
class GrammarEvolver {
  public:
    GrammarEvolver(const Grid& sample, Grid init_env, const RulePool& pool, FitnessConfig fcfg,
                   EvolutionConfig ecfg, SamplerParams sampler = {})
        : evaluator_(sample, std::move(fcfg)),
          init_env_(std::move(init_env)),
          pool_(pool),
          cfg_(std::move(ecfg)),
          sampler_(sampler) {
        if (cfg_.population_size < 2)
            throw std::invalid_argument("population size must be at least 2");
        if (cfg_.elitism_threshold <= 0.0 || cfg_.elitism_threshold >= 1.0)
            throw std::invalid_argument("elitism threshold must lie in (0,1)");
    }

    Population init_population(Engine& rng) {
        Population pop;
        pop.reserve(cfg_.population_size);
        for (int i = 0; i < cfg_.population_size; ++i) {
            Individual ind;
            const int n_children = std::uniform_int_distribution<int>(1, kMaxChildren)(rng);
            std::vector<GrammarNode> children;
            children.reserve(n_children);
            for (int c = 0; c < n_children; ++c)
                children.push_back(sample_child_node(pool_, rng, true, 2, sampler_));
            ind.tree = GrammarNode::make_sequence(
                std::uniform_int_distribution<int>(kMinIterations, kMaxIterations)(rng),
                std::move(children));
            ind.id = next_id_++;
            pop.push_back(std::move(ind));
        }
        return pop;
    }

    /// Elite individuals (relative fitness above the threshold) each head at
    /// least one pair with a roulette-drawn mate; the rest of the pairs draw
    /// both slots by roulette. Self-pairs are re-drawn up to 10 times.
    std::vector<std::pair<int, int>> select_parents(const Population& pop,
                                                    const std::vector<double>& rel, Engine& rng) {
        std::vector<double> weights(rel.size());
        for (std::size_t i = 0; i < rel.size(); ++i)
            weights[i] = rel[i] > 0.0 ? rel[i] : 1e-9;
        std::discrete_distribution<int> roulette(weights.begin(), weights.end());

        auto draw_mate = [&](int other) {
            int mate = roulette(rng);
            for (int retry = 0; retry < 10 && mate == other; ++retry) mate = roulette(rng);
            return mate;
        };

        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(cfg_.offspring_pairs);
        for (std::size_t i = 0; i < rel.size(); ++i) {
            if (static_cast<int>(pairs.size()) >= cfg_.offspring_pairs) break;
            if (rel[i] > cfg_.elitism_threshold)
                pairs.emplace_back(static_cast<int>(i), draw_mate(static_cast<int>(i)));
        }
        while (static_cast<int>(pairs.size()) < cfg_.offspring_pairs) {
            const int a = roulette(rng);
            pairs.emplace_back(a, draw_mate(a));
        }
        return pairs;
    }

    /// One-point crossover restricted to the first tree level. Child lists
    /// longer than the maximum are truncated; empty lists are repaired with
    /// one freshly sampled rule node.
    std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                                Engine& rng) {
        const auto& ca = a.tree.children;
        const auto& cb = b.tree.children;
        const int cut_a = std::uniform_int_distribution<int>(0, static_cast<int>(ca.size()))(rng);
        const int cut_b = std::uniform_int_distribution<int>(0, static_cast<int>(cb.size()))(rng);

        auto splice = [&](const std::vector<GrammarNode>& head, int n_head,
                          const std::vector<GrammarNode>& tail, int from_tail) {
            std::vector<GrammarNode> out(head.begin(), head.begin() + n_head);
            out.insert(out.end(), tail.begin() + from_tail, tail.end());
            if (static_cast<int>(out.size()) > kMaxChildren) out.resize(kMaxChildren);
            if (out.empty()) out.push_back(sample_rule_node(pool_, rng));
            return out;
        };

        Individual c1, c2;
        c1.tree = GrammarNode::make_sequence(a.tree.iterations, splice(ca, cut_a, cb, cut_b));
        c2.tree = GrammarNode::make_sequence(b.tree.iterations, splice(cb, cut_b, ca, cut_a));
        c1.id = next_id_++;
        c2.id = next_id_++;
        return {std::move(c1), std::move(c2)};
    }

    /// Applies one of replace / delete / add-sibling to a random first-level
    /// node. Deleting the last child and adding a sixth both fall back to
    /// replace so the result stays valid.
    Individual mutate(Individual ind, Engine& rng) {
        auto& children = ind.tree.children;
        std::discrete_distribution<int> op_dist(cfg_.mutation_weights.begin(),
                                                cfg_.mutation_weights.end());
        int op = op_dist(rng);
        const int target =
            std::uniform_int_distribution<int>(0, static_cast<int>(children.size()) - 1)(rng);
        if (op == 1 && children.size() <= 1) op = 0;
        if (op == 2 && static_cast<int>(children.size()) >= kMaxChildren) op = 0;
        switch (op) {
            case 0:
                children[target] = sample_child_node(pool_, rng, true, 2, sampler_);
                break;
            case 1:
                children.erase(children.begin() + target);
                break;
            case 2:
                children.insert(children.begin() + target + 1,
                                sample_child_node(pool_, rng, true, 2, sampler_));
                break;
        }
        ind.fitness.reset();
        ind.id = next_id_++;
        return ind;
    }

    /// Executes the individual's grammar and scores the output against the
    /// sample; seeds derive from (master_seed, generation, index) so results
    /// do not depend on evaluation order or thread count.
    void evaluate(Individual& ind, int generation, int index) const {
        ind.eval_seed = derive_seed(cfg_.master_seed, 0xE7A1u, static_cast<std::uint64_t>(generation),
                                    static_cast<std::uint64_t>(index));
        double sum = 0.0;
        for (int rep = 0; rep < cfg_.eval_repeats; ++rep) {
            const ExecutionBudget budget{cfg_.max_steps,
                                         derive_seed(ind.eval_seed, static_cast<std::uint64_t>(rep))};
            const Grid output = execute_grammar(init_env_, ind.tree, budget);
            sum += evaluator_.evaluate(output);
        }
        ind.fitness = sum / cfg_.eval_repeats;
    }

    void evaluate_all(Population& pop, int generation) const {
        parallel_for(pop.size(), cfg_.threads,
                     [&](std::size_t i) { evaluate(pop[i], generation, static_cast<int>(i)); });
    }

    /// Crossover and mutation over selected pairs, then mu+lambda survivor
    /// selection from parents plus children. Ties break toward lower id.
    Population step_generation(const Population& pop, int generation, Engine& rng) {
        const auto rel = relative_fitness(pop);
        const auto pairs = select_parents(pop, rel, rng);

        Population children;
        children.reserve(pairs.size() * 2);
        for (const auto& [ia, ib] : pairs) {
            auto [c1, c2] = crossover(pop[ia], pop[ib], rng);
            children.push_back(mutate(std::move(c1), rng));
            children.push_back(mutate(std::move(c2), rng));
        }
        parallel_for(children.size(), cfg_.threads, [&](std::size_t i) {
            evaluate(children[i], generation, static_cast<int>(pop.size() + i));
        });

        Population merged;
        merged.reserve(pop.size() + children.size());
        merged.insert(merged.end(), pop.begin(), pop.end());
        for (auto& c : children) merged.push_back(std::move(c));
        std::sort(merged.begin(), merged.end(), [](const Individual& a, const Individual& b) {
            if (*a.fitness != *b.fitness) return *a.fitness > *b.fitness;
            return a.id < b.id;
        });
        merged.resize(cfg_.population_size);
        return merged;
    }

    RunResult run() {
        Engine init_rng(derive_seed(cfg_.master_seed, 0xA11Cu));
        Engine var_rng(derive_seed(cfg_.master_seed, 0xBEEFu));

        Population pop = init_population(init_rng);
        evaluate_all(pop, 0);

        RunResult result;
        auto record = [&](int gen) {
            GenerationStats stats{gen, -std::numeric_limits<double>::infinity(), 0.0};
            for (const auto& ind : pop) {
                stats.best = std::max(stats.best, *ind.fitness);
                stats.mean += *ind.fitness;
            }
            stats.mean /= static_cast<double>(pop.size());
            result.history.push_back(stats);
            if (cfg_.on_generation) cfg_.on_generation(stats);
            return stats.best;
        };

        double best = record(0);
        int gen = 0;
        while (best < cfg_.target_fitness && gen < cfg_.max_generations) {
            ++gen;
            pop = step_generation(pop, gen, var_rng);
            best = record(gen);
        }

        auto best_it = std::max_element(pop.begin(), pop.end(),
                                        [](const Individual& a, const Individual& b) {
                                            if (*a.fitness != *b.fitness)
                                                return *a.fitness < *b.fitness;
                                            return a.id > b.id;
                                        });
        result.best = *best_it;
        result.population = std::move(pop);
        return result;
    }

    const FitnessEvaluator& evaluator() const { return evaluator_; }
    const Grid& init_env() const { return init_env_; }

  private:
    FitnessEvaluator evaluator_;
    Grid init_env_;
    const RulePool& pool_;
    EvolutionConfig cfg_;
    SamplerParams sampler_;
    std::uint64_t next_id_ = 0;
};

} // namespace mjsynth
