#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ordlab/core.hpp"
#include "ordlab/montecarlo.hpp"
#include "ordlab/observables.hpp"
#include "ordlab/quantum.hpp"

namespace ordlab {

/// One verified upper bound: left <= right within roundoff slack.
struct BoundReport {
    std::string id;  // "kinetic" | "local_pair" | "nonlocal_pair"
    std::string side = "quantum";
    double left = 0.0;
    double right = 0.0;
    double slack = 0.0;  // right - left
    double k = 0.0;
    double beta = 0.0;
    bool pass = false;

    void finish() {
        slack = right - left;
        pass = slack >= -1e-9 * std::abs(right);
    }
};

/// Kinetic double commutator against hbar^2 k^2 N (4t + hbar^2 k^2 / 4m)
/// with t the measured kinetic energy per particle in the same state.
inline BoundReport kinetic_bound_check(const ManyBodySpace& space, const PairPotential* phi,
                                       const Vec2& k, double beta) {
    const auto& spec = space.spec();
    if (std::max(std::abs(space.mode_index(k.x)),
                 spec.dimension == 2 ? std::abs(space.mode_index(k.y)) : 0) > spec.grid_points / 4)
        throw BandLimitViolated("bound checks require |k| L / 2 pi <= M/4");

    auto ops = theorem_operators(space, phi, k, Vec2{});
    const ThermalState st = ThermalState::solve(ops.h, beta);
    const Mat t = space.kinetic();

    BoundReport rep;
    rep.id = "kinetic";
    rep.k = std::sqrt(k.norm2());
    rep.beta = beta;
    for (const auto& c : ops.c) rep.left += st.double_commutator_with(c, t).real();
    const double tkin = st.average(t).real() / spec.particles;
    const double h2k2 = spec.hbar * spec.hbar * k.norm2();
    rep.right = h2k2 * spec.particles * (4.0 * tkin + h2k2 / (4.0 * spec.mass));
    rep.finish();
    return rep;
}

/// Pointwise derivative-magnitude bound on the potential double commutator.
/// local:    hbar^2 k^2 sum_{i!=j} [ |r_ij||grad Phi|/4 + 2|r_ij|^2|lap Phi| ]
/// nonlocal: (hbar^2/2) sum_{i!=j} [ |lap1| + |lap2| + 2|cross|
///                                   + k (|grad1| + |grad2|) ]
namespace detail {

inline double bound_integrand(const PairPotential& phi, const SimulationBox& box, const Vec2& ri,
                              const Vec2& rj, double kmag, double hbar, bool local_form) {
    const auto b = phi.derivatives(ri, rj, box);
    if (local_form) {
        const Vec2 rij = box.min_image(ri - rj);
        return hbar * hbar * kmag * kmag *
               (0.25 * rij.norm() * b.grad1.norm() + 2.0 * rij.norm2() * std::abs(b.lap1));
    }
    return 0.5 * hbar * hbar *
           (std::abs(b.lap1) + std::abs(b.lap2) + 2.0 * std::abs(b.cross) +
            kmag * (b.grad1.norm() + b.grad2.norm()));
}

}  // namespace detail

inline BoundReport potential_bound_check(const ManyBodySpace& space, const PairPotential& phi,
                                         const Vec2& k, double beta) {
    const bool local = phi.kind() == PotentialKind::Local;
    const auto& spec = space.spec();
    auto ops = theorem_operators(space, &phi, k, Vec2{});
    const ThermalState st = ThermalState::solve(ops.h, beta);

    const RVec u = space.potential_diagonal(phi);
    const Mat ud = u.cast<Cplx>().asDiagonal();

    BoundReport rep;
    rep.id = local ? "local_pair" : "nonlocal_pair";
    rep.k = std::sqrt(k.norm2());
    rep.beta = beta;
    for (const auto& c : ops.c) rep.left += st.double_commutator_with(c, ud).real();

    const SimulationBox box = space.box();
    const double kmag = rep.k;
    RVec bound = RVec::Zero(space.dim());
    for (long s = 0; s < space.dim(); ++s) {
        double acc = 0.0;
        for (int i = 0; i < spec.particles; ++i)
            for (int j = 0; j < spec.particles; ++j) {
                if (i == j) continue;
                acc += detail::bound_integrand(phi, box, space.position(s, i),
                                               space.position(s, j), kmag, spec.hbar, local);
            }
        bound(s) = acc;
    }
    rep.right = st.average_diag_real(bound);
    rep.finish();
    return rep;
}

/// Classical counterpart: both sides averaged over Monte Carlo samples. The
/// left side is the local-difference bracket for local potentials and the
/// general two-point bracket otherwise (hbar = 1 units).
inline BoundReport potential_bound_check_classical(const SampleSet& set, const PairPotential& phi,
                                                   const WaveVector& k) {
    if (set.size() < min_samples) throw TooFewSamples("need at least 64 samples");
    const bool local = phi.kind() == PotentialKind::Local;
    const SimulationBox& box = set.box;
    const Vec2 kv = k.v;
    const double kmag = std::sqrt(kv.norm2());

    double left = 0.0, right = 0.0;
    for (const auto& smp : set.samples) {
        const int n = static_cast<int>(smp.frac.size());
        double l = 0.0, r = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vec2 ri = box.frac_to_cart(smp.frac[size_t(i)]);
            const double si = std::sin(kv.dot(ri)), ci = std::cos(kv.dot(ri));
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const Vec2 rj = box.frac_to_cart(smp.frac[size_t(j)]);
                const auto b = phi.derivatives(ri, rj, box);
                const double sj = std::sin(kv.dot(rj)), cj = std::cos(kv.dot(rj));
                if (local) {
                    const double s2i = std::sin(2.0 * kv.dot(ri)),
                                 s2j = std::sin(2.0 * kv.dot(rj));
                    l += 0.5 * (0.5 * (s2i - s2j) * kv.dot(b.grad1) +
                                (si - sj) * (si - sj) * b.lap1);
                } else {
                    l += 0.5 * (si * ci * kv.dot(b.grad1) + sj * cj * kv.dot(b.grad2) +
                                si * si * b.lap1 + sj * sj * b.lap2 + 2.0 * si * sj * b.cross);
                }
                r += detail::bound_integrand(phi, box, ri, rj, kmag, 1.0, local);
            }
        }
        left += l;
        right += r;
    }
    BoundReport rep;
    rep.id = local ? "local_pair" : "nonlocal_pair";
    rep.side = "classical";
    rep.k = kmag;
    rep.left = left / double(set.size());
    rep.right = right / double(set.size());
    rep.finish();
    return rep;
}

/// max over sampled pairs of |sin x +- sin y| - |x +- y|; never positive.
inline double sin_difference_inequality_excess(long samples, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    double worst = -1e300;
    for (long i = 0; i < samples; ++i) {
        const double x = u(rng), y = u(rng);
        worst = std::max(worst, std::abs(std::sin(x) - std::sin(y)) - std::abs(x - y));
        worst = std::max(worst, std::abs(std::sin(x) + std::sin(y)) - std::abs(x + y));
    }
    return worst;
}

struct ScalingReport {
    double alpha = 0.0;
    double alpha_stderr = 0.0;
    double r_squared = 0.0;
    double threshold = 1.5;
    std::string classification;  // "k-squared" | "sub-quadratic"
    size_t points = 0;
};

/// Log-log least-squares exponent of value(k). Points within ten machine
/// epsilons of zero are dropped before fitting.
inline ScalingReport k_scaling_exponent(const std::vector<std::pair<double, double>>& curve,
                                        double threshold = 1.5) {
    std::vector<std::pair<double, double>> pts;
    double vmax = 0.0;
    for (const auto& [k, v] : curve) vmax = std::max(vmax, std::abs(v));
    for (const auto& [k, v] : curve) {
        if (v < 0.0) throw NonPositiveValue("scaling curve has a negative value");
        if (v <= 10.0 * std::numeric_limits<double>::epsilon() * vmax) continue;
        pts.emplace_back(k, v);
    }
    if (pts.size() < 8) throw InsufficientPoints("need at least 8 usable points");
    double kmin = pts.front().first, kmax = pts.front().first;
    for (const auto& [k, v] : pts) {
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    if (kmax < 10.0 * kmin * (1.0 - 1e-12))
        throw InsufficientPoints("points must span at least a decade in k");

    const size_t n = pts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [k, v] : pts) {
        const double x = std::log(k), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double ymean = sy / n;
    for (const auto& [k, v] : pts) {
        const double x = std::log(k), y = std::log(v);
        const double fit = intercept + slope * x;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - ymean) * (y - ymean);
    }
    ScalingReport rep;
    rep.alpha = slope;
    rep.points = n;
    rep.threshold = threshold;
    rep.alpha_stderr =
        n > 2 ? std::sqrt(ss_res / double(n - 2) / (sxx - sx * sx / n)) : 0.0;
    rep.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    rep.classification = slope >= threshold ? "k-squared" : "sub-quadratic";
    return rep;
}

struct DivergenceResult {
    double numeric = 0.0;
    double analytic = 0.0;
    double relative_error = 0.0;
};

/// Integral of the 1/k^2 weight over [k0, eps] with the d-dimensional volume
/// element: Omega_d Int k^{d-1} k^{-2} dk. Composite Simpson in log k.
inline DivergenceResult divergence_probe(int d, double k0, double eps) {
    if (!(0.0 < k0 && k0 < eps)) throw InvalidRange("need 0 < k0 < eps");
    if (d < 1 || d > 3) throw InvalidRange("dimension must be 1, 2 or 3");
    const double omega = d == 1 ? 2.0 : (d == 2 ? two_pi : 2.0 * two_pi);

    // substitute u = log k: integrand becomes omega * exp((d-2) u)
    const int intervals = 4096;  // even
    const double a = std::log(k0), b = std::log(eps);
    const double h = (b - a) / intervals;
    auto f = [&](double u) { return omega * std::exp((d - 2) * u); };
    double acc = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    DivergenceResult res;
    res.numeric = acc * h / 3.0;
    res.analytic = d == 1   ? 2.0 * (1.0 / k0 - 1.0 / eps)
                   : d == 2 ? two_pi * std::log(eps / k0)
                            : 2.0 * two_pi * (eps - k0);
    res.relative_error = std::abs(res.numeric - res.analytic) / std::abs(res.analytic);
    return res;
}

struct DivergenceRow {
    double k0 = 0.0;
    double numeric = 0.0;
    double analytic = 0.0;
};

/// Tabulates the integral as the cutoff halves: logarithmic growth in d=2,
/// 1/k0 growth in d=1, convergence in d=3.
inline std::vector<DivergenceRow> divergence_growth_table(int d, double eps, double k0_start,
                                                          int halvings) {
    if (halvings < 1) throw InvalidRange("halvings must be >= 1");
    std::vector<DivergenceRow> rows;
    double k0 = k0_start;
    for (int i = 0; i <= halvings; ++i) {
        const auto r = divergence_probe(d, k0, eps);
        rows.push_back({k0, r.numeric, r.analytic});
        k0 *= 0.5;
    }
    return rows;
}

}  // namespace ordlab
