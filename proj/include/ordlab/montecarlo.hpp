#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ordlab/core.hpp"
#include "ordlab/geometry.hpp"
#include "ordlab/potentials.hpp"

namespace ordlab {

/// Particle positions in fractional coordinates of the box.
struct Configuration {
    SimulationBox box;
    std::vector<Vec2> frac;

    int size() const { return static_cast<int>(frac.size()); }
    Vec2 cart(int i) const { return box.frac_to_cart(frac[static_cast<size_t>(i)]); }
};

/// n particles per cell on the ideal Bravais sites, optionally jittered by a
/// Gaussian of width `jitter` (cartesian units).
inline Configuration initial_lattice_configuration(const SimulationBox& box, int per_cell = 1,
                                                   double jitter = 0.0, uint64_t seed = 0) {
    if (per_cell < 1) throw InvalidRange("particles per cell must be >= 1");
    const auto& s = box.spec();
    Configuration cfg{box, {}};
    cfg.frac.reserve(static_cast<size_t>(per_cell) * s.n1 * s.n2);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < s.n1; ++i) {
        for (int j = 0; j < s.n2; ++j) {
            for (int p = 0; p < per_cell; ++p) {
                const double off = static_cast<double>(p) / per_cell;
                Vec2 f{(i + off) / s.n1, s.dimension == 1 ? 0.0 : (j + off) / s.n2};
                if (jitter > 0.0) {
                    Vec2 d{jitter * gauss(rng), s.dimension == 1 ? 0.0 : jitter * gauss(rng)};
                    f += box.cart_to_frac(d);
                }
                cfg.frac.push_back(SimulationBox::wrap_frac(f));
            }
        }
    }
    return cfg;
}

struct ChainParams {
    double beta = 1.0;
    long total_sweeps = 1000;
    long equilibration_sweeps = 200;
    long thinning = 10;
    double initial_step = 0.3;
    uint64_t seed = 1;
    double jitter = 0.0;
    /// Remove center-of-mass drift after each sweep. Only valid for local
    /// (translation-invariant) potentials; keeps reciprocal-lattice phases
    /// pinned to the initial frame.
    bool anchor_com = false;
};

struct Sample {
    std::vector<Vec2> frac;
    double energy = 0.0;
    long sweep = 0;
    uint64_t chain_seed = 0;
};

struct ChainMeta {
    uint64_t seed = 0;
    double beta = 0.0;
    double acceptance_rate = 0.0;  // production phase
    double final_step = 0.0;
    long total_sweeps = 0;
    long equilibration_sweeps = 0;
    long thinning = 0;
};

struct SampleSet {
    SimulationBox box;
    std::vector<Sample> samples;
    std::vector<ChainMeta> chains;

    size_t size() const { return samples.size(); }
};

/// U = (1/2) sum_{i != j} Phi(r_i, r_j); equals the unordered-pair sum for
/// symmetric potentials but is accumulated over ordered pairs as defined.
inline double total_energy(const Configuration& cfg, const PairPotential& phi) {
    const int n = cfg.size();
    std::vector<Vec2> carts(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) carts[static_cast<size_t>(i)] = cfg.cart(i);
    double u = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            u += 0.5 * phi.evaluate(carts[static_cast<size_t>(i)], carts[static_cast<size_t>(j)],
                                    cfg.box);
        }
    if (!std::isfinite(u)) throw NonFiniteValue("total energy is not finite");
    return u;
}

/// Metropolis acceptance for an energy change at inverse temperature beta.
inline double acceptance_probability(double delta_u, double beta) {
    const double arg = -beta * delta_u;
    return arg >= 0.0 ? 1.0 : std::exp(arg);
}

/// Single-particle Gaussian-displacement Metropolis chain. The step size is
/// adapted toward 40% acceptance during equilibration only and then frozen.
inline SampleSet metropolis_chain(const Configuration& init, const PairPotential& phi,
                                  const ChainParams& params) {
    if (params.beta < 0.0) throw InvalidRange("beta must be >= 0");
    if (params.equilibration_sweeps >= params.total_sweeps)
        throw InvalidRange("equilibration_sweeps must be < total_sweeps");
    if (params.thinning < 1) throw InvalidRange("thinning must be >= 1");
    if (params.anchor_com && phi.kind() != PotentialKind::Local)
        throw KindMismatch("anchor_com requires a translation-invariant potential");

    const SimulationBox& box = init.box;
    const int dim = box.dimension();
    const int n = init.size();

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Configuration cfg = init;
    if (params.jitter > 0.0) {
        for (auto& f : cfg.frac) {
            Vec2 d{params.jitter * gauss(rng), dim == 2 ? params.jitter * gauss(rng) : 0.0};
            f = SimulationBox::wrap_frac(f + box.cart_to_frac(d));
        }
    }
    std::vector<Vec2> carts(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) carts[static_cast<size_t>(i)] = cfg.cart(i);

    double energy = total_energy(cfg, phi);
    double step = params.initial_step;
    Vec2 com_drift{};  // accumulated true displacement of the center of mass

    SampleSet out{box, {}, {}};
    long prod_accepted = 0, prod_proposed = 0;

    for (long sweep = 1; sweep <= params.total_sweeps; ++sweep) {
        long acc_sweep = 0;
        for (int move = 0; move < n; ++move) {
            const int i = static_cast<int>(rng() % static_cast<uint64_t>(n));
            Vec2 d{step * gauss(rng), dim == 2 ? step * gauss(rng) : 0.0};
            Vec2 new_frac = SimulationBox::wrap_frac(cfg.frac[static_cast<size_t>(i)] +
                                                     box.cart_to_frac(d));
            const Vec2 new_cart = box.frac_to_cart(new_frac);
            const Vec2 old_cart = carts[static_cast<size_t>(i)];
            double delta = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const Vec2& rj = carts[static_cast<size_t>(j)];
                delta += phi.evaluate(new_cart, rj, box) - phi.evaluate(old_cart, rj, box);
            }
            if (unif(rng) < acceptance_probability(delta, params.beta)) {
                cfg.frac[static_cast<size_t>(i)] = new_frac;
                carts[static_cast<size_t>(i)] = new_cart;
                energy += delta;
                com_drift += box.cart_to_frac(d) * (1.0 / n);
                ++acc_sweep;
            }
        }

        const bool equilibrating = sweep <= params.equilibration_sweeps;
        if (equilibrating) {
            const double rate = static_cast<double>(acc_sweep) / n;
            if (rate > 0.45) step *= 1.05;
            else if (rate < 0.35) step /= 1.05;
            // keep proposals on the scale of the box; beyond that acceptance
            // is flat and the wrap arithmetic would lose precision
            const double cap = 2.0 * std::max(box.edge1().norm(), box.edge2().norm());
            step = std::clamp(step, 1e-9 * cap, cap);
        } else {
            prod_accepted += acc_sweep;
            prod_proposed += n;
        }

        if (params.anchor_com) {
            // rigid back-translation by the accumulated drift; U is invariant
            // for local potentials, so the stationary density is untouched
            for (auto& f : cfg.frac) f = SimulationBox::wrap_frac(f - com_drift);
            for (int i = 0; i < n; ++i) carts[static_cast<size_t>(i)] = cfg.cart(i);
            com_drift = {};
        }

        if (!equilibrating && (sweep - params.equilibration_sweeps) % params.thinning == 0)
            out.samples.push_back({cfg.frac, energy, sweep, params.seed});
    }

    ChainMeta meta;
    meta.seed = params.seed;
    meta.beta = params.beta;
    meta.acceptance_rate = prod_proposed ? static_cast<double>(prod_accepted) / prod_proposed : 0.0;
    meta.final_step = step;
    meta.total_sweeps = params.total_sweeps;
    meta.equilibration_sweeps = params.equilibration_sweeps;
    meta.thinning = params.thinning;
    out.chains.push_back(meta);
    return out;
}

/// Blocking stderr: block sizes double until at most 16 blocks remain; the
/// largest level estimate is reported as the plateau value.
inline double blocking_stderr(std::span<const double> series) {
    const size_t n = series.size();
    if (n < 2) return 0.0;
    std::vector<double> x(series.begin(), series.end());
    double best = 0.0;
    while (x.size() >= 16) {
        const size_t m = x.size();
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(m - 1);
        best = std::max(best, std::sqrt(var / static_cast<double>(m)));
        std::vector<double> half(m / 2);
        for (size_t i = 0; i < half.size(); ++i) half[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
        x.swap(half);
    }
    if (best == 0.0 && n >= 2) {
        double mean = 0.0;
        for (size_t i = 0; i < n; ++i) mean += series[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (size_t i = 0; i < n; ++i) var += (series[i] - mean) * (series[i] - mean);
        var /= static_cast<double>(n - 1);
        best = std::sqrt(var / static_cast<double>(n));
    }
    return best;
}

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
    size_t count = 0;
};

constexpr size_t min_samples = 64;

/// Sample mean and blocking stderr of an observable over a sample set.
inline MeanErr ensemble_average(const SampleSet& set,
                                const std::function<double(const Sample&, const SimulationBox&)>& f) {
    if (set.size() < min_samples) throw TooFewSamples("need at least 64 samples");
    std::vector<double> series;
    series.reserve(set.size());
    for (const auto& s : set.samples) series.push_back(f(s, set.box));
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    return {mean, blocking_stderr(series), series.size()};
}

/// Order-stable merge keyed by chain seed.
inline SampleSet merge(const SampleSet& a, const SampleSet& b) {
    SampleSet out{a.box, {}, {}};
    out.samples.reserve(a.samples.size() + b.samples.size());
    out.chains = a.chains;
    out.chains.insert(out.chains.end(), b.chains.begin(), b.chains.end());
    std::stable_sort(out.chains.begin(), out.chains.end(),
                     [](const ChainMeta& x, const ChainMeta& y) { return x.seed < y.seed; });
    for (const auto& c : out.chains) {
        for (const auto& src : {&a, &b})
            for (const auto& s : src->samples)
                if (s.chain_seed == c.seed) out.samples.push_back(s);
    }
    return out;
}

}  // namespace ordlab
