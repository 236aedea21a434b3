#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "ordlab/core.hpp"
#include "ordlab/geometry.hpp"

namespace ordlab {

enum class PotentialKind { Local, NonlocalTwoPoint };

/// First and second derivatives of a pair potential with respect to both
/// arguments. `cross` is the contraction grad_1 . grad_2 over the active
/// dimensions.
struct DerivativeBundle {
    Vec2 grad1{};
    Vec2 grad2{};
    double lap1 = 0.0;
    double lap2 = 0.0;
    double cross = 0.0;
};

/// Two-point interaction energy Phi(r1, r2). Evaluation is pure and the
/// objects are immutable, so instances can be shared across threads.
///
/// Separation-dependent terms use the minimal image by default. A positive
/// `images` count at construction replaces the minimal image with a sum over
/// that many periodic copies per axis, which makes the function smooth across
/// the wrap seam (needed when the potential is sampled on spectral grids).
class PairPotential {
  public:
    virtual ~PairPotential() = default;
    virtual PotentialKind kind() const = 0;
    virtual std::string name() const = 0;
    virtual double evaluate(const Vec2& r1, const Vec2& r2, const SimulationBox& box) const = 0;
    virtual DerivativeBundle derivatives(const Vec2& r1, const Vec2& r2,
                                         const SimulationBox& box) const = 0;
};

namespace detail {

// Gaussian profile e0*exp(-|u|^2/s^2) and its gradient/Laplacian in d dims,
// accumulated over periodic images of u.
struct GaussTerm {
    double value = 0.0;
    Vec2 grad{};     // with respect to u
    double lap = 0.0;
    Vec2 weighted_u{};  // sum of E_w * u_w, used for mixed substrate terms
};

inline GaussTerm gauss_images(Vec2 u, double e0, double sigma, const SimulationBox& box,
                              int images, int dim) {
    GaussTerm t;
    const double s2 = sigma * sigma;
    const int w1 = images, w2 = (dim == 2 ? images : 0);
    if (images == 0) u = box.min_image(u);
    for (int i = -w1; i <= w1; ++i) {
        for (int j = -w2; j <= w2; ++j) {
            Vec2 uw = u + box.edge1() * double(i) + box.edge2() * double(j);
            if (dim == 1) uw.y = 0.0;
            const double r2 = (dim == 1) ? uw.x * uw.x : uw.norm2();
            const double e = e0 * std::exp(-r2 / s2);
            t.value += e;
            t.grad += uw * (-2.0 / s2 * e);
            t.lap += e * (4.0 * r2 / (s2 * s2) - 2.0 * dim / s2);
            t.weighted_u += uw * e;
        }
    }
    return t;
}

}  // namespace detail

/// phi(r) = e0 * exp(-r^2 / sigma^2); smooth, bounded, purely local.
class GaussianCore final : public PairPotential {
  public:
    GaussianCore(double epsilon0, double sigma, int dim = 2, int images = 0)
        : eps0_(epsilon0), sigma_(sigma), dim_(dim), images_(images) {}

    PotentialKind kind() const override { return PotentialKind::Local; }
    std::string name() const override { return "gaussian_core"; }
    double epsilon0() const { return eps0_; }
    double sigma() const { return sigma_; }

    double evaluate(const Vec2& r1, const Vec2& r2, const SimulationBox& box) const override {
        const auto t = detail::gauss_images(r1 - r2, eps0_, sigma_, box, images_, dim_);
        if (!std::isfinite(t.value)) throw NonFiniteValue("gaussian_core overflow");
        return t.value;
    }

    DerivativeBundle derivatives(const Vec2& r1, const Vec2& r2,
                                 const SimulationBox& box) const override {
        const auto t = detail::gauss_images(r1 - r2, eps0_, sigma_, box, images_, dim_);
        DerivativeBundle b;
        b.grad1 = t.grad;
        b.grad2 = -t.grad;
        b.lap1 = b.lap2 = t.lap;
        b.cross = -t.lap;
        return b;
    }

  private:
    double eps0_, sigma_;
    int dim_, images_;
};

/// phi(r) = kappa r^2 / 2; unbounded, used for analytic oracles only.
class HarmonicPair final : public PairPotential {
  public:
    explicit HarmonicPair(double kappa, int dim = 2) : kappa_(kappa), dim_(dim) {}

    PotentialKind kind() const override { return PotentialKind::Local; }
    std::string name() const override { return "harmonic_pair"; }
    double kappa() const { return kappa_; }

    double evaluate(const Vec2& r1, const Vec2& r2, const SimulationBox& box) const override {
        Vec2 u = box.min_image(r1 - r2);
        if (dim_ == 1) u.y = 0.0;
        return 0.5 * kappa_ * (dim_ == 1 ? u.x * u.x : u.norm2());
    }

    DerivativeBundle derivatives(const Vec2& r1, const Vec2& r2,
                                 const SimulationBox& box) const override {
        Vec2 u = box.min_image(r1 - r2);
        if (dim_ == 1) u.y = 0.0;
        DerivativeBundle b;
        b.grad1 = u * kappa_;
        b.grad2 = u * (-kappa_);
        b.lap1 = b.lap2 = kappa_ * dim_;
        b.cross = -kappa_ * dim_;
        return b;
    }

  private:
    double kappa_;
    int dim_;
};

/// Gaussian core plus a substrate-coupled term
///   g * cos(G.(r1 + r2)) * exp(-|r1 - r2|^2 / sigma^2)
/// with G a reciprocal-class wavevector, so the potential stays single-valued
/// under periodic wrapping. The center-of-mass dependence makes this a genuine
/// two-point (nonlocal) interaction: it is not a function of r1 - r2 alone.
class SubstrateCoupled final : public PairPotential {
  public:
    SubstrateCoupled(double epsilon0, double sigma, double g, int g_index1, int g_index2 = 0,
                     int dim = 2, int images = 0)
        : eps0_(epsilon0), sigma_(sigma), g_(g), gm1_(g_index1), gm2_(g_index2), dim_(dim),
          images_(images) {}

    PotentialKind kind() const override { return PotentialKind::NonlocalTwoPoint; }
    std::string name() const override { return "substrate_coupled"; }
    double coupling() const { return g_; }
    double epsilon0() const { return eps0_; }
    double sigma() const { return sigma_; }

    Vec2 substrate_wavevector(const SimulationBox& box) const {
        auto [b1, b2] = reciprocal_basis(box.spec());
        Vec2 G = b1.v * double(gm1_) + b2.v * double(gm2_);
        if (dim_ == 1) G.y = 0.0;
        return G;
    }

    double evaluate(const Vec2& r1, const Vec2& r2, const SimulationBox& box) const override {
        const auto core = detail::gauss_images(r1 - r2, eps0_, sigma_, box, images_, dim_);
        const auto env = detail::gauss_images(r1 - r2, 1.0, sigma_, box, images_, dim_);
        const Vec2 G = substrate_wavevector(box);
        const double v = core.value + g_ * std::cos(G.dot(r1 + r2)) * env.value;
        if (!std::isfinite(v)) throw NonFiniteValue("substrate_coupled overflow");
        return v;
    }

    DerivativeBundle derivatives(const Vec2& r1, const Vec2& r2,
                                 const SimulationBox& box) const override {
        const auto core = detail::gauss_images(r1 - r2, eps0_, sigma_, box, images_, dim_);
        const auto env = detail::gauss_images(r1 - r2, 1.0, sigma_, box, images_, dim_);
        const Vec2 G = substrate_wavevector(box);
        const double G2 = (dim_ == 1) ? G.x * G.x : G.norm2();
        const double cs = std::cos(G.dot(r1 + r2));
        const double sn = std::sin(G.dot(r1 + r2));

        // grad/lap with respect to u = r1 - r2 and s = r1 + r2:
        //   grad_1 = grad_u + grad_s,   grad_2 = -grad_u + grad_s
        //   lap_1  = lap_u + 2 mix + lap_s,  lap_2 = lap_u - 2 mix + lap_s
        //   cross  = -lap_u + lap_s
        const Vec2 grad_u = env.grad * (g_ * cs);
        const Vec2 grad_s = G * (-g_ * sn * env.value);
        const double lap_u = g_ * cs * env.lap;
        const double lap_s = -g_ * cs * G2 * env.value;
        const double mix = (2.0 * g_ / (sigma_ * sigma_)) * sn * G.dot(env.weighted_u);

        DerivativeBundle b;
        b.grad1 = core.grad + grad_u + grad_s;
        b.grad2 = -1.0 * core.grad - 1.0 * grad_u + grad_s;
        b.lap1 = core.lap + lap_u + 2.0 * mix + lap_s;
        b.lap2 = core.lap + lap_u - 2.0 * mix + lap_s;
        b.cross = -core.lap - lap_u + lap_s;
        return b;
    }

  private:
    double eps0_, sigma_, g_;
    int gm1_, gm2_;
    int dim_, images_;
};

}  // namespace ordlab
