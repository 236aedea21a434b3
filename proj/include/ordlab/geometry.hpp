#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ordlab/core.hpp"

namespace ordlab {

/// Bravais cell vectors plus repetition counts. `dimension == 1` constrains
/// particles to the a1 axis; a2 then only fixes the transverse box extent.
struct LatticeSpec {
    Vec2 a1{1.0, 0.0};
    Vec2 a2{0.0, 1.0};
    int n1 = 1;
    int n2 = 1;
    int dimension = 2;
};

/// Periodic box spanned by n1*a1 and n2*a2. Positions are handled as
/// fractional coordinates of the box edges so wrapping is exact.
class SimulationBox {
  public:
    explicit SimulationBox(const LatticeSpec& spec) : spec_(spec) {
        if (spec.n1 < 1 || spec.n2 < 1)
            throw DegenerateCell("repetition counts must be >= 1");
        if (spec.dimension != 1 && spec.dimension != 2)
            throw DegenerateCell("dimension must be 1 or 2");
        const double cell = spec.a1.cross(spec.a2);
        if (std::abs(cell) < 1e-14 * (spec.a1.norm() * spec.a2.norm() + 1e-300))
            throw DegenerateCell("cell vectors a1, a2 are collinear");
        edge1_ = spec.a1 * static_cast<double>(spec.n1);
        edge2_ = spec.a2 * static_cast<double>(spec.n2);
        area_ = std::abs(edge1_.cross(edge2_));
        const double det = edge1_.cross(edge2_);
        // inverse of the column matrix [edge1 edge2]
        inv00_ = edge2_.y / det;
        inv01_ = -edge2_.x / det;
        inv10_ = -edge1_.y / det;
        inv11_ = edge1_.x / det;
    }

    const LatticeSpec& spec() const { return spec_; }
    Vec2 edge1() const { return edge1_; }
    Vec2 edge2() const { return edge2_; }
    double area() const { return area_; }
    int dimension() const { return spec_.dimension; }

    Vec2 frac_to_cart(const Vec2& f) const {
        return {f.x * edge1_.x + f.y * edge2_.x, f.x * edge1_.y + f.y * edge2_.y};
    }
    Vec2 cart_to_frac(const Vec2& r) const {
        return {inv00_ * r.x + inv01_ * r.y, inv10_ * r.x + inv11_ * r.y};
    }

    /// Wrap fractional coordinates into [0, 1).
    static Vec2 wrap_frac(Vec2 f) {
        f.x -= std::floor(f.x);
        f.y -= std::floor(f.y);
        if (f.x >= 1.0) f.x -= 1.0;
        if (f.y >= 1.0) f.y -= 1.0;
        return f;
    }

    /// Minimal-image displacement: fractional components wrapped to [-1/2, 1/2).
    /// Computed in fractional coordinates, which is exact for the mildly skewed
    /// cells used here (not for extreme skew).
    Vec2 min_image(const Vec2& dr_cart) const {
        Vec2 f = cart_to_frac(dr_cart);
        f.x -= std::floor(f.x + 0.5);
        f.y -= std::floor(f.y + 0.5);
        return frac_to_cart(f);
    }

  private:
    LatticeSpec spec_;
    Vec2 edge1_, edge2_;
    double area_ = 0.0;
    double inv00_ = 0, inv01_ = 0, inv10_ = 0, inv11_ = 0;
};

inline SimulationBox build_box(const LatticeSpec& spec) { return SimulationBox(spec); }

enum class WaveClass { Reciprocal, AllowedNonreciprocal, Generic };

inline std::string to_string(WaveClass c) {
    switch (c) {
        case WaveClass::Reciprocal: return "reciprocal";
        case WaveClass::AllowedNonreciprocal: return "nonreciprocal";
        default: return "generic";
    }
}

/// A wavevector, optionally tagged with its box-grid indices (m1, m2) so that
/// k = (m1/n1) b1 + (m2/n2) b2. Index-tagged wavevectors allow exact phase
/// arithmetic against fractional coordinates.
struct WaveVector {
    Vec2 v{};
    WaveClass cls = WaveClass::Generic;
    bool on_grid = false;
    int m1 = 0;
    int m2 = 0;

    double norm() const { return v.norm(); }
    double norm2() const { return v.norm2(); }
};

/// Reciprocal basis of the Bravais cell: a_i . b_j = 2*pi*delta_ij.
inline std::pair<WaveVector, WaveVector> reciprocal_basis(const LatticeSpec& spec) {
    const double cell = spec.a1.cross(spec.a2);
    if (std::abs(cell) < 1e-14 * (spec.a1.norm() * spec.a2.norm() + 1e-300))
        throw DegenerateCell("cell vectors a1, a2 are collinear");
    const double c = two_pi / cell;
    WaveVector b1, b2;
    b1.v = {c * spec.a2.y, -c * spec.a2.x};
    b2.v = {-c * spec.a1.y, c * spec.a1.x};
    b1.cls = b2.cls = WaveClass::Reciprocal;
    b1.on_grid = b2.on_grid = true;
    b1.m1 = spec.n1;
    b1.m2 = 0;
    b2.m1 = 0;
    b2.m2 = spec.n2;
    return {b1, b2};
}

/// Box-commensurate wavevector from integer grid indices, classified by
/// whether it is also a reciprocal vector of the underlying Bravais lattice.
inline WaveVector box_wavevector(const SimulationBox& box, int m1, int m2) {
    const auto& spec = box.spec();
    auto [b1, b2] = reciprocal_basis(spec);
    WaveVector k;
    k.v = b1.v * (static_cast<double>(m1) / spec.n1) + b2.v * (static_cast<double>(m2) / spec.n2);
    k.on_grid = true;
    k.m1 = m1;
    k.m2 = m2;
    const bool rec = (((m1 % spec.n1) + spec.n1) % spec.n1 == 0) &&
                     (((m2 % spec.n2) + spec.n2) % spec.n2 == 0);
    k.cls = rec ? WaveClass::Reciprocal : WaveClass::AllowedNonreciprocal;
    return k;
}

/// All box-commensurate wavevectors with |m_i| <= max_order * max(n1, n2).
/// For 1D boxes only the m2 = 0 row is emitted.
inline std::vector<WaveVector> wavevector_grid(const SimulationBox& box, int max_order) {
    if (max_order < 1) throw InvalidRange("max_order must be >= 1");
    const auto& spec = box.spec();
    const int extent = max_order * std::max(spec.n1, spec.n2);
    std::vector<WaveVector> out;
    const int lo2 = spec.dimension == 1 ? 0 : -extent;
    const int hi2 = spec.dimension == 1 ? 0 : extent;
    out.reserve(static_cast<size_t>(2 * extent + 1) * static_cast<size_t>(hi2 - lo2 + 1));
    for (int m1 = -extent; m1 <= extent; ++m1)
        for (int m2 = lo2; m2 <= hi2; ++m2) out.push_back(box_wavevector(box, m1, m2));
    return out;
}

/// Free-function form mirroring the box method.
inline Vec2 min_image(const SimulationBox& box, const Vec2& dr) { return box.min_image(dr); }

}  // namespace ordlab
