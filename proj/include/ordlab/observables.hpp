#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ordlab/core.hpp"
#include "ordlab/geometry.hpp"
#include "ordlab/montecarlo.hpp"
#include "ordlab/potentials.hpp"

namespace ordlab {

/// rho_k = sum_i exp(-i k . r_i). For grid-indexed wavevectors the phase is
/// computed from fractional coordinates, which keeps reciprocal-lattice
/// phases exact on perfect lattices.
inline Cplx fourier_density(const std::vector<Vec2>& frac, const SimulationBox& box,
                            const WaveVector& k) {
    Cplx acc{0.0, 0.0};
    if (k.on_grid) {
        // k.r = 2 pi (m1 x1 + m2 x2) for r = x1 edge1 + x2 edge2
        for (const auto& f : frac) {
            const double phase = -two_pi * (k.m1 * f.x + k.m2 * f.y);
            acc += std::polar(1.0, phase);
        }
    } else {
        for (const auto& f : frac) {
            const Vec2 r = box.frac_to_cart(f);
            acc += std::polar(1.0, -k.v.dot(r));
        }
    }
    return acc;
}

inline Cplx fourier_density(const Configuration& cfg, const WaveVector& k) {
    return fourier_density(cfg.frac, cfg.box, k);
}

namespace detail {

inline Cplx mean_complex(const std::vector<Cplx>& z, double* stderr_out) {
    Cplx m{0.0, 0.0};
    for (const auto& v : z) m += v;
    m /= static_cast<double>(z.size());
    if (stderr_out) {
        std::vector<double> re(z.size()), im(z.size());
        for (size_t i = 0; i < z.size(); ++i) re[i] = z[i].real(), im[i] = z[i].imag();
        *stderr_out = std::hypot(blocking_stderr(re), blocking_stderr(im));
    }
    return m;
}

}  // namespace detail

struct OrderParameterReport {
    WaveVector k;
    Cplx rho{0.0, 0.0};
    double stderr_ = 0.0;
    size_t samples = 0;
};

/// rho_k = <rho_hat_k> / N with blocking error.
inline OrderParameterReport order_parameter(const SampleSet& set, const WaveVector& k) {
    if (set.size() < min_samples) throw TooFewSamples("need at least 64 samples");
    const double n = static_cast<double>(set.samples.front().frac.size());
    std::vector<Cplx> z;
    z.reserve(set.size());
    for (const auto& s : set.samples) z.push_back(fourier_density(s.frac, set.box, k) / n);
    OrderParameterReport rep;
    rep.k = k;
    rep.rho = detail::mean_complex(z, &rep.stderr_);
    rep.samples = set.size();
    return rep;
}

/// S(k) = <|rho_hat_k|^2> / N.
inline MeanErr structure_factor(const SampleSet& set, const WaveVector& k) {
    return ensemble_average(set, [&k](const Sample& s, const SimulationBox& box) {
        const Cplx z = fourier_density(s.frac, box, k);
        return std::norm(z) / static_cast<double>(s.frac.size());
    });
}

struct CrystallinityRow {
    WaveVector k;
    Cplx rho{0.0, 0.0};
    double stderr_ = 0.0;
};

struct CrystallinityReport {
    std::vector<CrystallinityRow> rows;
    double threshold = 0.1;
    bool ordered = false;
};

/// Flags "ordered" when some nonzero reciprocal K exceeds the threshold while
/// every sampled nonreciprocal k stays below it. A finite-size diagnostic,
/// not a statement about the thermodynamic limit.
inline CrystallinityReport crystallinity_report(const SampleSet& set,
                                                const std::vector<WaveVector>& kset,
                                                double threshold = 0.1) {
    CrystallinityReport rep;
    rep.threshold = threshold;
    bool reciprocal_above = false;
    bool nonreciprocal_below = true;
    for (const auto& k : kset) {
        auto r = order_parameter(set, k);
        rep.rows.push_back({k, r.rho, r.stderr_});
        const double mag = std::abs(r.rho);
        const bool zero_vector = k.on_grid && k.m1 == 0 && k.m2 == 0;
        if (k.cls == WaveClass::Reciprocal && !zero_vector && mag > threshold)
            reciprocal_above = true;
        if (k.cls == WaveClass::AllowedNonreciprocal && mag > threshold)
            nonreciprocal_below = false;
    }
    rep.ordered = reciprocal_above && nonreciprocal_below;
    return rep;
}

struct BogoliubovClassicalReport {
    WaveVector k, K;
    double lhs = 0.0, lhs_stderr = 0.0;
    double rhs = 0.0, rhs_stderr = 0.0;
    double slack = 0.0, slack_stderr = 0.0;
    double kinetic_per_particle = 0.0;
    double pair_sum_mean = 0.0;
    size_t samples = 0;
};

/// Precomputed per-sample pair-derivative sums, reusable across wavevectors.
class ClassicalPairSums {
  public:
    ClassicalPairSums(const SampleSet& set, const PairPotential& phi) {
        const SimulationBox& box = set.box;
        series_.reserve(set.size());
        for (const auto& smp : set.samples) {
            double pair = 0.0;
            const int np = static_cast<int>(smp.frac.size());
            for (int i = 0; i < np; ++i) {
                const Vec2 ri = box.frac_to_cart(smp.frac[static_cast<size_t>(i)]);
                for (int j = 0; j < np; ++j) {
                    if (i == j) continue;
                    const Vec2 rj = box.frac_to_cart(smp.frac[static_cast<size_t>(j)]);
                    const Vec2 rij = box.min_image(ri - rj);
                    auto b = phi.derivatives(ri, rj, box);
                    pair += 0.25 * rij.norm() * b.grad1.norm() +
                            2.0 * rij.norm2() * std::abs(b.lap1);
                }
            }
            series_.push_back(pair / static_cast<double>(np));
        }
    }
    const std::vector<double>& per_sample() const { return series_; }

  private:
    std::vector<double> series_;
};

/// Classical assembly of the Bogoliubov bound at wavevectors (k, K):
///   S(k+K)  >=  T (k+K)^2 |rho_{2k+K} - rho_K|^2
///              / (4 k^2 [4t + k^2/4 + (1/N) sum_{i!=j} (|r_ij||grad Phi|/4
///                                                       + 2|r_ij|^2|lap Phi|)])
/// with t = (d/2) T from equipartition and hbar = m = k_B = 1. Errors come
/// from a block jackknife over the sample stream.
inline BogoliubovClassicalReport bogoliubov_check_classical(const SampleSet& set,
                                                            const ClassicalPairSums& pair_sums,
                                                            const WaveVector& k,
                                                            const WaveVector& K,
                                                            double temperature) {
    if (set.size() < min_samples) throw TooFewSamples("need at least 64 samples");
    if (!k.on_grid || !K.on_grid)
        throw InvalidRange("k and K must be box-commensurate grid wavevectors");
    if (k.m1 == 0 && k.m2 == 0) throw InvalidRange("k must be nonzero");
    if (k.cls != WaveClass::AllowedNonreciprocal)
        throw InvalidRange("k must not be a reciprocal-lattice vector");
    if (K.cls != WaveClass::Reciprocal) throw InvalidRange("K must be reciprocal");

    const SimulationBox& box = set.box;
    const auto kK = box_wavevector(box, k.m1 + K.m1, k.m2 + K.m2);
    const auto k2K = box_wavevector(box, 2 * k.m1 + K.m1, 2 * k.m2 + K.m2);
    const double n = static_cast<double>(set.samples.front().frac.size());
    const int d = box.dimension();

    const size_t ns = set.size();
    std::vector<double> lhs_series(ns);
    std::vector<Cplx> z2(ns), zK(ns);
    const std::vector<double>& pair_series = pair_sums.per_sample();
    for (size_t s = 0; s < ns; ++s) {
        const auto& smp = set.samples[s];
        lhs_series[s] = std::norm(fourier_density(smp.frac, box, kK)) / n;
        z2[s] = fourier_density(smp.frac, box, k2K) / n;
        zK[s] = fourier_density(smp.frac, box, K) / n;
    }

    const double t_kin = 0.5 * d * temperature;
    const double kk2 = kK.norm2();
    const double kscale2 = k.norm2();

    auto assemble = [&](double lhs_m, Cplx z2_m, Cplx zK_m, double pair_m) {
        const double num = temperature * kk2 * std::norm(z2_m - zK_m);
        const double den = 4.0 * kscale2 * (4.0 * t_kin + kscale2 / 4.0 + pair_m);
        return std::make_pair(lhs_m, num / den);
    };

    // full-sample estimate
    double lhs_m = 0.0, pair_m = 0.0;
    Cplx z2_m{}, zK_m{};
    for (size_t s = 0; s < ns; ++s) {
        lhs_m += lhs_series[s];
        pair_m += pair_series[s];
        z2_m += z2[s];
        zK_m += zK[s];
    }
    lhs_m /= ns;
    pair_m /= ns;
    z2_m /= static_cast<double>(ns);
    zK_m /= static_cast<double>(ns);
    auto [lhs_full, rhs_full] = assemble(lhs_m, z2_m, zK_m, pair_m);

    // block jackknife
    const size_t nblocks = 16;
    const size_t bs = ns / nblocks;
    std::vector<double> lhs_rep, rhs_rep, slack_rep;
    for (size_t b = 0; b < nblocks; ++b) {
        double l = 0.0, p = 0.0;
        Cplx a2{}, aK{};
        size_t cnt = 0;
        for (size_t s = 0; s < nblocks * bs; ++s) {
            if (s / bs == b) continue;
            l += lhs_series[s];
            p += pair_series[s];
            a2 += z2[s];
            aK += zK[s];
            ++cnt;
        }
        auto [lr, rr] = assemble(l / cnt, a2 / static_cast<double>(cnt),
                                 aK / static_cast<double>(cnt), p / cnt);
        lhs_rep.push_back(lr);
        rhs_rep.push_back(rr);
        slack_rep.push_back(lr - rr);
    }
    auto jk_err = [&](const std::vector<double>& rep) {
        double m = 0.0;
        for (double v : rep) m += v;
        m /= rep.size();
        double var = 0.0;
        for (double v : rep) var += (v - m) * (v - m);
        return std::sqrt(var * (rep.size() - 1) / rep.size());
    };

    BogoliubovClassicalReport rep;
    rep.k = k;
    rep.K = K;
    rep.lhs = lhs_full;
    rep.rhs = rhs_full;
    rep.slack = lhs_full - rhs_full;
    rep.lhs_stderr = jk_err(lhs_rep);
    rep.rhs_stderr = jk_err(rhs_rep);
    rep.slack_stderr = jk_err(slack_rep);
    rep.kinetic_per_particle = t_kin;
    rep.pair_sum_mean = pair_m;
    rep.samples = ns;
    return rep;
}

inline BogoliubovClassicalReport bogoliubov_check_classical(const SampleSet& set,
                                                            const PairPotential& phi,
                                                            const WaveVector& k,
                                                            const WaveVector& K,
                                                            double temperature) {
    return bogoliubov_check_classical(set, ClassicalPairSums(set, phi), k, K, temperature);
}

}  // namespace ordlab
