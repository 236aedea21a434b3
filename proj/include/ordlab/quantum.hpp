#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ordlab/core.hpp"
#include "ordlab/geometry.hpp"
#include "ordlab/potentials.hpp"

namespace ordlab {

using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

struct SpaceSpec {
    int dimension = 1;    // spatial dimension of the grid (1 or 2)
    int grid_points = 16; // M, even
    double length = two_pi;
    int particles = 1;    // distinguishable
    double hbar = 1.0;
    double mass = 1.0;
};

/// Finite periodic-grid Hilbert space for N distinguishable particles.
/// Momentum is spectral: diagonal in the discrete Fourier basis with
/// eigenvalues hbar 2 pi n / L, n in [-M/2, M/2). Total dimension is capped
/// so that dense eigendecomposition stays exact and affordable.
class ManyBodySpace {
  public:
    static constexpr long dimension_budget = 4096;

    explicit ManyBodySpace(const SpaceSpec& spec) : spec_(spec) {
        if (spec.dimension != 1 && spec.dimension != 2)
            throw InvalidRange("grid dimension must be 1 or 2");
        if (spec.grid_points < 2 || spec.grid_points % 2 != 0)
            throw InvalidRange("grid_points must be even and >= 2");
        if (spec.particles < 1) throw InvalidRange("particles must be >= 1");
        factors_ = spec.dimension * spec.particles;
        long d = 1;
        for (int f = 0; f < factors_; ++f) {
            d *= spec.grid_points;
            if (d > dimension_budget)
                throw DimensionBudgetExceeded("total dimension exceeds 4096");
        }
        dim_ = d;
        const int m = spec.grid_points;
        const double L = spec.length;
        axis_p_ = Mat::Zero(m, m);
        axis_p2_ = Mat::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            for (int l = 0; l < m; ++l) {
                Cplx p{0.0, 0.0}, p2{0.0, 0.0};
                for (int n = -m / 2; n < m / 2; ++n) {
                    const double pn = spec.hbar * two_pi * n / L;
                    const Cplx ph = std::polar(1.0 / m, two_pi * n * (j - l) / m);
                    p += ph * pn;
                    p2 += ph * pn * pn;
                }
                axis_p_(j, l) = p;
                axis_p2_(j, l) = p2;
            }
        }
    }

    const SpaceSpec& spec() const { return spec_; }
    long dim() const { return dim_; }
    int factors() const { return factors_; }
    double grid_spacing() const { return spec_.length / spec_.grid_points; }

    /// Square periodic box matching the grid, for potential evaluation.
    SimulationBox box() const {
        return build_box({{spec_.length, 0.0}, {0.0, spec_.length}, 1, 1, spec_.dimension});
    }

    int digit(long state, int factor) const {
        long s = state;
        for (int f = 0; f < factor; ++f) s /= spec_.grid_points;
        return static_cast<int>(s % spec_.grid_points);
    }

    double coordinate(long state, int particle, int axis) const {
        return grid_spacing() * digit(state, particle * spec_.dimension + axis);
    }

    Vec2 position(long state, int particle) const {
        return {coordinate(state, particle, 0),
                spec_.dimension == 2 ? coordinate(state, particle, 1) : 0.0};
    }

    /// Integer mode index of a wavevector component; throws if incommensurate.
    int mode_index(double k_component) const {
        const double q = k_component * spec_.length / two_pi;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-9)
            throw IncommensurateWavevector("wavevector not commensurate with the ring");
        return static_cast<int>(r);
    }

    void require_commensurate(const Vec2& k) const {
        mode_index(k.x);
        if (spec_.dimension == 2) mode_index(k.y);
        else if (std::abs(k.y) > 1e-12)
            throw IncommensurateWavevector("1D grid: wavevector must lie on the axis");
    }

    const Mat& axis_momentum() const { return axis_p_; }
    const Mat& axis_momentum_sq() const { return axis_p2_; }

    /// Embed a single-axis operator into the full space at the given factor.
    Mat embed(const Mat& op, int factor) const {
        const int m = spec_.grid_points;
        long stride = 1;
        for (int f = 0; f < factor; ++f) stride *= m;
        Mat out = Mat::Zero(dim_, dim_);
        for (long s = 0; s < dim_; ++s) {
            const int d = digit(s, factor);
            for (int dp = 0; dp < m; ++dp) out(s, s + (dp - d) * stride) = op(d, dp);
        }
        return out;
    }

    Mat momentum(int particle, int axis) const {
        return embed(axis_p_, particle * spec_.dimension + axis);
    }

    Mat kinetic() const {
        Mat out = Mat::Zero(dim_, dim_);
        for (int f = 0; f < factors_; ++f) out += embed(axis_p2_, f);
        return out / (2.0 * spec_.mass);
    }

    /// Diagonal of U = (1/2) sum_{i != j} Phi(r_i, r_j) in the position basis.
    RVec potential_diagonal(const PairPotential& phi) const {
        RVec out = RVec::Zero(dim_);
        if (spec_.particles < 2) return out;
        const SimulationBox b = box();
        for (long s = 0; s < dim_; ++s) {
            double u = 0.0;
            for (int i = 0; i < spec_.particles; ++i)
                for (int j = 0; j < spec_.particles; ++j) {
                    if (i == j) continue;
                    u += 0.5 * phi.evaluate(position(s, i), position(s, j), b);
                }
            out(s) = u;
        }
        return out;
    }

    /// Diagonal of sum_i exp(i q . r_i).
    CVec phase_sum_diagonal(const Vec2& q) const {
        require_commensurate(q);
        CVec out = CVec::Zero(dim_);
        for (long s = 0; s < dim_; ++s) {
            Cplx acc{0.0, 0.0};
            for (int i = 0; i < spec_.particles; ++i)
                acc += std::polar(1.0, q.dot(position(s, i)));
            out(s) = acc;
        }
        return out;
    }

    /// Diagonal of sin(q . r_i) / cos(q . r_i) for one particle.
    RVec sin_diagonal(int particle, const Vec2& q) const {
        require_commensurate(q);
        RVec out(dim_);
        for (long s = 0; s < dim_; ++s) out(s) = std::sin(q.dot(position(s, particle)));
        return out;
    }
    RVec cos_diagonal(int particle, const Vec2& q) const {
        require_commensurate(q);
        RVec out(dim_);
        for (long s = 0; s < dim_; ++s) out(s) = std::cos(q.dot(position(s, particle)));
        return out;
    }

    /// Full discrete Fourier transform (row = mode multi-index with each
    /// component ordered -M/2 .. M/2-1, column = position state).
    Mat dft() const {
        const int m = spec_.grid_points;
        Mat out(dim_, dim_);
        for (long r = 0; r < dim_; ++r) {
            for (long c = 0; c < dim_; ++c) {
                double phase = 0.0;
                double norm = 1.0;
                for (int f = 0; f < factors_; ++f) {
                    const int n = digit(r, f) - m / 2;
                    const int j = digit(c, f);
                    phase -= two_pi * n * j / m;
                    norm /= std::sqrt(double(m));
                }
                out(r, c) = std::polar(norm, phase);
            }
        }
        return out;
    }

    /// Mode-space indices whose Fourier content stays within |n| <= max_abs
    /// on every factor.
    std::vector<long> band_limited_modes(int max_abs) const {
        std::vector<long> keep;
        const int m = spec_.grid_points;
        for (long r = 0; r < dim_; ++r) {
            bool ok = true;
            for (int f = 0; f < factors_ && ok; ++f)
                ok = std::abs(digit(r, f) - m / 2) <= max_abs;
            if (ok) keep.push_back(r);
        }
        return keep;
    }

  private:
    SpaceSpec spec_;
    int factors_ = 0;
    long dim_ = 0;
    Mat axis_p_, axis_p2_;
};

inline ManyBodySpace build_space(const SpaceSpec& spec) { return ManyBodySpace(spec); }

/// Canonical Gibbs state from a dense Hermitian Hamiltonian. Weights below
/// 1e-18 of the total are dropped from trace sums; eigenvectors are kept in
/// full for operator transforms.
class ThermalState {
  public:
    static ThermalState solve(const Mat& h, double beta) {
        const double scale = h.cwiseAbs().maxCoeff();
        if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
            throw Error("hamiltonian is not hermitian");
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        ThermalState st;
        st.beta_ = beta;
        st.energies_ = es.eigenvalues();
        st.vectors_ = es.eigenvectors();
        const long d = st.energies_.size();
        st.weights_ = RVec(d);
        double z = 0.0;
        for (long n = 0; n < d; ++n) {
            st.weights_(n) = std::exp(-beta * (st.energies_(n) - st.energies_(0)));
            z += st.weights_(n);
        }
        st.weights_ /= z;
        st.occupied_ = d;
        for (long n = 0; n < d; ++n)
            if (st.weights_(n) < 1e-18) {
                st.occupied_ = n;
                break;
            }
        return st;
    }

    double beta() const { return beta_; }
    const RVec& energies() const { return energies_; }
    const Mat& eigenvectors() const { return vectors_; }
    long occupied() const { return occupied_; }
    double weight(long n) const { return weights_(n); }
    double partition_weight_sum() const { return weights_.sum(); }

    Cplx average(const Mat& op) const {
        if (op.rows() != vectors_.rows()) throw DimensionMismatch("operator dimension mismatch");
        Cplx acc{0.0, 0.0};
        for (long n = 0; n < occupied_; ++n) {
            const auto v = vectors_.col(n);
            acc += weights_(n) * v.dot(op * v);
        }
        return acc;
    }

    Cplx average_diag(const CVec& d) const {
        if (d.size() != vectors_.rows()) throw DimensionMismatch("diagonal dimension mismatch");
        Cplx acc{0.0, 0.0};
        for (long n = 0; n < occupied_; ++n) {
            const auto v = vectors_.col(n);
            Cplx t{0.0, 0.0};
            for (long j = 0; j < d.size(); ++j) t += std::norm(v(j)) * d(j);
            acc += weights_(n) * t;
        }
        return acc;
    }
    double average_diag_real(const RVec& d) const {
        CVec c = d.cast<Cplx>();
        return average_diag(c).real();
    }

    /// <[[C, H], C+]> for hermitian C via the spectral representation
    /// 2 sum_n w_n sum_m |C_nm|^2 (E_m - E_n).
    double double_commutator_average(const Mat& c) const {
        const long occ = occupied_;
        const Mat cv = c * vectors_.leftCols(occ);           // D x occ
        const Mat rows = cv.adjoint() * vectors_;            // occ x D
        double acc = 0.0;
        for (long n = 0; n < occ; ++n) {
            double t = 0.0;
            for (long m = 0; m < energies_.size(); ++m)
                t += std::norm(rows(n, m)) * (energies_(m) - energies_(n));
            acc += weights_(n) * 2.0 * t;
        }
        return acc;
    }

    /// <[[C, Op], C+]> with an arbitrary inner operator, by dense products.
    Cplx double_commutator_with(const Mat& c, const Mat& op) const {
        const Mat inner = c * op - op * c;
        const Mat outer = inner * c.adjoint() - c.adjoint() * inner;
        return average(outer);
    }

  private:
    double beta_ = 0.0;
    RVec energies_;
    Mat vectors_;
    RVec weights_;
    long occupied_ = 0;
};

inline Cplx thermal_average(const ThermalState& st, const Mat& op) { return st.average(op); }

/// Operators entering the Bogoliubov inequality at wavevectors (k, K):
/// A = sum_i exp(i (k+K).r_i) (diagonal), the displacement-current components
/// C_alpha = (1/2) sum_i (p_alpha sin(k.r_i) + sin(k.r_i) p_alpha), and H.
struct TheoremOperators {
    CVec a;
    std::vector<Mat> c;  // one entry per active axis
    Mat h;
};

inline TheoremOperators theorem_operators(const ManyBodySpace& space, const PairPotential* phi,
                                          const Vec2& k, const Vec2& kk) {
    space.require_commensurate(k);
    space.require_commensurate(kk);
    const auto& spec = space.spec();
    TheoremOperators ops;
    ops.a = space.phase_sum_diagonal(k + kk);
    for (int axis = 0; axis < spec.dimension; ++axis) {
        Mat c = Mat::Zero(space.dim(), space.dim());
        for (int i = 0; i < spec.particles; ++i) {
            const CVec s = space.sin_diagonal(i, k).cast<Cplx>();
            const Mat p = space.momentum(i, axis);
            c += 0.5 * (p * s.asDiagonal());
            c += 0.5 * (s.asDiagonal() * p);
        }
        ops.c.push_back(std::move(c));
    }
    ops.h = space.kinetic();
    if (phi) ops.h.diagonal() += space.potential_diagonal(*phi).cast<Cplx>();
    return ops;
}

enum class Contraction { AlongK, ComponentSum };

struct BogoliubovResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

/// Exact finite-dimensional evaluation of
///   (1/2) <A A+ + A+ A>  >=  k_B T |<[C, A]>|^2 / <[[C, H], C+]>.
/// `AlongK` contracts the vector operator C along the unit vector of k;
/// `ComponentSum` sums numerator and denominator over Cartesian components.
inline BogoliubovResult bogoliubov_slack(const ManyBodySpace& space, const PairPotential* phi,
                                         const Vec2& k, const Vec2& kk, double beta,
                                         Contraction mode = Contraction::AlongK) {
    if (beta <= 0.0) throw InvalidRange("beta must be positive");
    if (k.norm2() == 0.0) throw InvalidRange("k must be nonzero");
    auto ops = theorem_operators(space, phi, k, kk);
    const ThermalState st = ThermalState::solve(ops.h, beta);

    BogoliubovResult res;
    RVec a2(space.dim());
    for (long s = 0; s < space.dim(); ++s) a2(s) = std::norm(ops.a(s));
    res.lhs = st.average_diag_real(a2);

    auto commutator_avg = [&](const Mat& c) {
        Cplx acc{0.0, 0.0};
        for (long n = 0; n < st.occupied(); ++n) {
            const CVec v = st.eigenvectors().col(n);
            const CVec av = ops.a.cwiseProduct(v);
            const CVec cv = c * v;
            // <v| C diag(a) |v> - <v| diag(a) C |v>
            const Cplx t1 = v.dot(c * av);
            const Cplx t2 = (ops.a.conjugate().cwiseProduct(v)).dot(cv);
            acc += st.weight(n) * (t1 - t2);
        }
        return acc;
    };

    if (mode == Contraction::AlongK) {
        const double kn = std::sqrt(k.norm2());
        Mat ck = ops.c[0] * (k.x / kn);
        if (ops.c.size() > 1) ck += ops.c[1] * (k.y / kn);
        res.numerator = std::norm(commutator_avg(ck));
        res.denominator = st.double_commutator_average(ck);
    } else {
        for (const auto& c : ops.c) {
            res.numerator += std::norm(commutator_avg(c));
            res.denominator += st.double_commutator_average(c);
        }
    }
    if (res.numerator < 1e-24 * (1.0 + res.lhs * res.lhs)) {
        res.rhs = 0.0;  // commutator average vanishes; bound is trivially 0
    } else {
        if (res.denominator <= 0.0)
            throw NonPositiveDenominator("double-commutator average is not positive");
        res.rhs = res.numerator / (beta * res.denominator);
    }
    res.slack = res.lhs - res.rhs;
    return res;
}

namespace detail {

/// Rows of the DFT restricted to the kept band; projections F x F+ live on
/// the band-limited subspace where the spectral identities are exact.
inline Mat band_selector(const Mat& dft, const std::vector<long>& keep) {
    Mat out(static_cast<long>(keep.size()), dft.cols());
    for (size_t i = 0; i < keep.size(); ++i) out.row(static_cast<long>(i)) = dft.row(keep[i]);
    return out;
}

inline double band_projected_max(const Mat& fsel, const Mat& delta) {
    return (fsel * delta * fsel.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

struct IdentityResidual {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // normalized by max(1, |scale|)
};

struct KineticAuditReport {
    // Closed forms are fitted on the operator basis
    //   { (k.p)^2, k^2 p cos^2(k r) p, (hbar^2 k^4 / 4) sin^2(k r), (hbar^2 k^4/4) 1 }
    // (each times hbar^2/m). The reference reading uses coefficients (1,1,1,0).
    std::array<double, 4> reference_coeffs{1.0, 1.0, 1.0, 0.0};
    std::array<double, 4> fitted_coeffs{};
    double reference_residual = 0.0;
    double fitted_residual = 0.0;
    bool reference_matches = false;
};

struct ResidualReport {
    std::vector<IdentityResidual> identities;
    KineticAuditReport kinetic_audit;
    int band_mode_limit = 0;
    Vec2 k{}, kk{};
    double beta = 0.0;
};

namespace detail {

inline RVec potential_bracket_general(const ManyBodySpace& space, const PairPotential& phi,
                                      const Vec2& k) {
    // (hbar^2/2) sum_{i!=j} [ s_i c_i k.g1 + s_j c_j k.g2 + s_i^2 lap1
    //                         + s_j^2 lap2 + 2 s_i s_j cross ]
    const auto& spec = space.spec();
    const double h2 = spec.hbar * spec.hbar;
    const SimulationBox b = space.box();
    RVec out = RVec::Zero(space.dim());
    for (long s = 0; s < space.dim(); ++s) {
        double acc = 0.0;
        for (int i = 0; i < spec.particles; ++i) {
            const Vec2 ri = space.position(s, i);
            const double si = std::sin(k.dot(ri)), ci = std::cos(k.dot(ri));
            for (int j = 0; j < spec.particles; ++j) {
                if (i == j) continue;
                const Vec2 rj = space.position(s, j);
                const double sj = std::sin(k.dot(rj)), cj = std::cos(k.dot(rj));
                const auto bun = phi.derivatives(ri, rj, b);
                acc += si * ci * k.dot(bun.grad1) + sj * cj * k.dot(bun.grad2) +
                       si * si * bun.lap1 + sj * sj * bun.lap2 + 2.0 * si * sj * bun.cross;
            }
        }
        out(s) = 0.5 * h2 * acc;
    }
    return out;
}

inline RVec potential_bracket_local(const ManyBodySpace& space, const PairPotential& phi,
                                    const Vec2& k) {
    // (hbar^2/2) sum_{i!=j} [ (sin 2k.r_i - sin 2k.r_j)/2 k.g1 + (s_i-s_j)^2 lap1 ]
    const auto& spec = space.spec();
    const double h2 = spec.hbar * spec.hbar;
    const SimulationBox b = space.box();
    RVec out = RVec::Zero(space.dim());
    for (long s = 0; s < space.dim(); ++s) {
        double acc = 0.0;
        for (int i = 0; i < spec.particles; ++i) {
            const Vec2 ri = space.position(s, i);
            for (int j = 0; j < spec.particles; ++j) {
                if (i == j) continue;
                const Vec2 rj = space.position(s, j);
                const auto bun = phi.derivatives(ri, rj, b);
                const double si = std::sin(k.dot(ri)), sj = std::sin(k.dot(rj));
                const double s2i = std::sin(2.0 * k.dot(ri)), s2j = std::sin(2.0 * k.dot(rj));
                acc += 0.5 * (s2i - s2j) * k.dot(bun.grad1) + (si - sj) * (si - sj) * bun.lap1;
            }
        }
        out(s) = 0.5 * h2 * acc;
    }
    return out;
}

}  // namespace detail

/// Largest pointwise gap between the general two-point bracket and its
/// local-difference reduction. Near zero for local potentials; order-one for
/// genuinely nonlocal ones.
inline double local_reduction_gap(const ManyBodySpace& space, const PairPotential& phi,
                                  const Vec2& k) {
    const RVec general = detail::potential_bracket_general(space, phi, k);
    const RVec local = detail::potential_bracket_local(space, phi, k);
    const double scale = std::max(1.0, general.cwiseAbs().maxCoeff());
    return (general - local).cwiseAbs().maxCoeff() / scale;
}

/// Verifies the operator identities behind the inequality: the phase-product
/// identity, the phase-commutator identity, the kinetic double commutator
/// (audited against the closed-form reading), the potential double
/// commutator, and the local reduction. Residuals are max-entry norms on the
/// band-limited subspace, normalized by the larger side.
inline ResidualReport commutator_residuals(const ManyBodySpace& space, const PairPotential* phi,
                                           const Vec2& k, const Vec2& kk, double beta) {
    const auto& spec = space.spec();
    const int m = spec.grid_points;
    const int qx = space.mode_index(k.x);
    const int qy = spec.dimension == 2 ? space.mode_index(k.y) : 0;
    if (std::max(std::abs(qx), std::abs(qy)) > m / 4)
        throw BandLimitViolated("identity checks require |k| L / 2 pi <= M/4");
    space.require_commensurate(kk);

    ResidualReport rep;
    rep.k = k;
    rep.kk = kk;
    rep.beta = beta;
    rep.band_mode_limit = m / 4;

    auto ops = theorem_operators(space, phi, k, kk);
    const ThermalState st = ThermalState::solve(ops.h, beta);
    const Mat fsel = detail::band_selector(space.dft(), space.band_limited_modes(m / 4));
    const double hbar = spec.hbar, mass = spec.mass;
    const double k2 = k.norm2();

    // phase-product identity: <A A+ + A+ A> = 2 <rho_{k+K} rho_{-k-K}>
    {
        const Mat a = ops.a.asDiagonal();
        const double lhs = st.average(a * a.adjoint() + a.adjoint() * a).real();
        RVec prod(space.dim());
        for (long s = 0; s < space.dim(); ++s) prod(s) = std::norm(ops.a(s));
        const double rhs = 2.0 * st.average_diag_real(prod);
        rep.identities.push_back(
            {"phase_product", lhs, rhs, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs))});
    }

    // phase-commutator identity:
    //   sum_alpha |<[C_alpha, A]>|^2 = (hbar^2/4)(k+K)^2 |<rho_{2k+K} - rho_K>|^2
    {
        double lhs = 0.0;
        for (const auto& c : ops.c) {
            Cplx acc{0.0, 0.0};
            for (long n = 0; n < st.occupied(); ++n) {
                const CVec v = st.eigenvectors().col(n);
                const CVec av = ops.a.cwiseProduct(v);
                const Cplx t1 = v.dot(c * av);
                const Cplx t2 = (ops.a.conjugate().cwiseProduct(v)).dot(c * v);
                acc += st.weight(n) * (t1 - t2);
            }
            lhs += std::norm(acc);
        }
        const Vec2 k2K{2.0 * k.x + kk.x, 2.0 * k.y + kk.y};
        const CVec rho_2kK = space.phase_sum_diagonal({-k2K.x, -k2K.y});
        const CVec rho_K = space.phase_sum_diagonal({-kk.x, -kk.y});
        const Cplx diff = st.average_diag(rho_2kK) - st.average_diag(rho_K);
        const double kpk2 = (k + kk).norm2();
        const double rhs = hbar * hbar / 4.0 * kpk2 * std::norm(diff);
        rep.identities.push_back(
            {"phase_commutator", lhs, rhs, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs))});
    }

    // kinetic double commutator: direct matrices vs closed-form basis
    {
        const Mat t = space.kinetic();
        Mat direct = Mat::Zero(space.dim(), space.dim());
        for (const auto& c : ops.c) {
            const Mat inner = c * t - t * c;
            direct += inner * c.adjoint() - c.adjoint() * inner;
        }
        Mat b1 = Mat::Zero(space.dim(), space.dim());
        Mat b2 = Mat::Zero(space.dim(), space.dim());
        RVec b3d = RVec::Zero(space.dim());
        for (int i = 0; i < spec.particles; ++i) {
            Mat kp = space.momentum(i, 0) * k.x;
            if (spec.dimension == 2) kp += space.momentum(i, 1) * k.y;
            b1 += kp * kp;
            const CVec cos2 = space.cos_diagonal(i, k).cwiseAbs2().cast<Cplx>();
            for (int axis = 0; axis < spec.dimension; ++axis) {
                const Mat p = space.momentum(i, axis);
                b2 += (p * cos2.asDiagonal()) * p;
            }
            const RVec sinv = space.sin_diagonal(i, k);
            b3d += sinv.cwiseProduct(sinv);
        }
        const double pref = hbar * hbar / mass;
        b1 *= pref;
        b2 *= pref * k2;
        const double quart = hbar * hbar * hbar * hbar * k2 * k2 / (4.0 * mass);
        const Mat b3 = (b3d * quart).cast<Cplx>().asDiagonal();
        const Mat b4 =
            Mat::Identity(space.dim(), space.dim()) * (quart * double(spec.particles));

        // fit on the band-limited subspace; aliased edge entries would drag
        // the least squares otherwise
        const Mat pdirect = fsel * direct * fsel.adjoint();
        std::array<Mat, 4> pbasis{fsel * b1 * fsel.adjoint(), fsel * b2 * fsel.adjoint(),
                                  fsel * b3 * fsel.adjoint(), fsel * b4 * fsel.adjoint()};
        Eigen::Matrix4d gram;
        Eigen::Vector4d proj;
        auto fdot = [](const Mat& x, const Mat& y) {
            return x.conjugate().cwiseProduct(y).sum().real();
        };
        for (int i = 0; i < 4; ++i) {
            proj(i) = fdot(pbasis[size_t(i)], pdirect);
            for (int j = 0; j < 4; ++j) gram(i, j) = fdot(pbasis[size_t(i)], pbasis[size_t(j)]);
        }
        const Eigen::Vector4d fit = gram.ldlt().solve(proj);

        const double scale = std::max(1.0, pdirect.cwiseAbs().maxCoeff());
        auto residual_for = [&](const std::array<double, 4>& cs) {
            Mat delta = pdirect;
            for (int i = 0; i < 4; ++i) delta -= cs[i] * pbasis[size_t(i)];
            return delta.cwiseAbs().maxCoeff() / scale;
        };
        KineticAuditReport audit;
        audit.fitted_coeffs = {fit(0), fit(1), fit(2), fit(3)};
        audit.reference_residual = residual_for(audit.reference_coeffs);
        audit.fitted_residual = residual_for(audit.fitted_coeffs);
        audit.reference_matches = audit.reference_residual < 1e-9;
        rep.kinetic_audit = audit;
        rep.identities.push_back({"kinetic_double_commutator", audit.reference_residual,
                                  audit.fitted_residual, audit.fitted_residual});
    }

    // potential double commutator: direct matrices vs bracket function
    if (phi) {
        const RVec u = space.potential_diagonal(*phi);
        const Mat ud = u.cast<Cplx>().asDiagonal();
        Mat direct = Mat::Zero(space.dim(), space.dim());
        for (const auto& c : ops.c) {
            const Mat inner = c * ud - ud * c;
            direct += inner * c.adjoint() - c.adjoint() * inner;
        }
        const RVec bracket = detail::potential_bracket_general(space, *phi, k);
        const Mat delta = direct - Mat(bracket.cast<Cplx>().asDiagonal());
        const double scale = std::max(1.0, detail::band_projected_max(fsel, direct));
        rep.identities.push_back({"potential_double_commutator",
                                  direct.cwiseAbs().maxCoeff(), bracket.cwiseAbs().maxCoeff(),
                                  detail::band_projected_max(fsel, delta) / scale});

        if (phi->kind() == PotentialKind::Local)
            rep.identities.push_back({"local_reduction", 0.0, 0.0,
                                      local_reduction_gap(space, *phi, k)});
    }

    return rep;
}

/// Denominator <[[C, H], C+]> along a list of wavevectors, reusing one
/// eigendecomposition (H does not depend on k).
inline std::vector<std::pair<double, double>> quantum_denominator_curve(
    const ManyBodySpace& space, const PairPotential* phi, double beta,
    const std::vector<Vec2>& ks, Contraction mode = Contraction::AlongK) {
    Mat h = space.kinetic();
    if (phi) h.diagonal() += space.potential_diagonal(*phi).cast<Cplx>();
    const ThermalState st = ThermalState::solve(h, beta);
    const auto& spec = space.spec();

    std::vector<Mat> momenta;  // per (particle, axis), k-independent
    for (int i = 0; i < spec.particles; ++i)
        for (int axis = 0; axis < spec.dimension; ++axis)
            momenta.push_back(space.momentum(i, axis));

    std::vector<std::pair<double, double>> out;
    for (const auto& k : ks) {
        std::vector<Mat> cs;
        for (int axis = 0; axis < spec.dimension; ++axis) {
            Mat c = Mat::Zero(space.dim(), space.dim());
            for (int i = 0; i < spec.particles; ++i) {
                const CVec s = space.sin_diagonal(i, k).cast<Cplx>();
                const Mat& p = momenta[size_t(i * spec.dimension + axis)];
                c += 0.5 * (p * s.asDiagonal());
                c += 0.5 * (s.asDiagonal() * p);
            }
            cs.push_back(std::move(c));
        }
        double den = 0.0;
        if (mode == Contraction::AlongK) {
            const double kn = std::sqrt(k.norm2());
            Mat ck = cs[0] * (k.x / kn);
            if (cs.size() > 1) ck += cs[1] * (k.y / kn);
            den = st.double_commutator_average(ck);
        } else {
            for (const auto& c : cs) den += st.double_commutator_average(c);
        }
        out.emplace_back(std::sqrt(k.norm2()), den);
    }
    return out;
}

}  // namespace ordlab
