#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ordlab/core.hpp"
#include "ordlab/potentials.hpp"
#include "ordlab/quantum.hpp"

namespace ordlab {

/// One-dimensional periodic grid for the relative coordinate u = r1 - r2.
struct RelativeGrid {
    int points = 64;
    double length = 20.0;

    double h() const { return length / points; }
    double u(int j) const { return h() * j; }
    /// signed minimal-image value of the grid point
    double u_signed(int j) const {
        double v = u(((j % points) + points) % points);
        if (v >= 0.5 * length) v -= length;
        return v;
    }
    int wrap(int j) const { return ((j % points) + points) % points; }
    int parity_partner(int j) const { return wrap(points - j); }
};

/// Discretized relative-coordinate kernel <u|V|u'> including the trapezoidal
/// quadrature weight, so H_rel = K + W acts by plain matrix multiplication.
///
/// Two families:
///  * Separable: lambda g(u) g(u'), g(u) = exp(-u^2 / 2 sigma_g^2).
///  * DeltaLocal: a contact kernel built from a radial profile; the
///    center-of-mass constrained integral reduces it to multiplication by
///    half the profile. `local_pair` wraps a pair potential so that the
///    realized relative potential equals the pair energy itself.
class KernelOperator {
  public:
    enum class Family { Separable, DeltaLocal };

    static KernelOperator separable(const RelativeGrid& grid, double lambda, double sigma_g) {
        KernelOperator k;
        k.family_ = Family::Separable;
        k.grid_ = grid;
        const int m = grid.points;
        Eigen::VectorXd g(m);
        for (int j = 0; j < m; ++j) {
            const double u = grid.u_signed(j);
            g(j) = std::exp(-u * u / (2.0 * sigma_g * sigma_g));
        }
        k.w_ = lambda * grid.h() * (g * g.transpose());
        k.validate();
        return k;
    }

    /// Contact kernel from a radial profile f: the realized relative
    /// potential is f/2 (the factor comes from the center-of-mass constrained
    /// reduction of the two-particle integral).
    static KernelOperator delta_local_profile(const RelativeGrid& grid,
                                              const std::function<double(double)>& profile) {
        KernelOperator k;
        k.family_ = Family::DeltaLocal;
        k.grid_ = grid;
        k.w_ = Eigen::MatrixXd::Zero(grid.points, grid.points);
        k.profile_.resize(size_t(grid.points));
        for (int j = 0; j < grid.points; ++j) {
            const double f = profile(std::abs(grid.u_signed(j)));
            k.profile_[size_t(j)] = f;
            k.w_(j, j) = 0.5 * f;
        }
        k.validate();
        return k;
    }

    /// Contact kernel realizing a given pair potential: the relative
    /// Hamiltonian then carries exactly phi(|u|) on the diagonal.
    static KernelOperator local_pair(const RelativeGrid& grid, const PairPotential& phi) {
        const SimulationBox box =
            build_box({{grid.length, 0.0}, {0.0, grid.length}, 1, 1, 1});
        return delta_local_profile(grid, [&phi, &box](double r) {
            return 2.0 * phi.evaluate({r, 0.0}, {0.0, 0.0}, box);
        });
    }

    Family family() const { return family_; }
    const Eigen::MatrixXd& matrix() const { return w_; }
    const RelativeGrid& grid() const { return grid_; }
    const std::vector<double>& profile() const { return profile_; }

  private:
    void validate() const {
        const double scale = w_.cwiseAbs().maxCoeff();
        if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
            throw NonHermitianKernel("kernel matrix is not symmetric");
        for (int j = 0; j < grid_.points; ++j)
            for (int l = 0; l < grid_.points; ++l) {
                const int pj = grid_.parity_partner(j), pl = grid_.parity_partner(l);
                if (std::abs(w_(j, l) - w_(pj, pl)) > 1e-12 * (1.0 + scale))
                    throw NonHermitianKernel("kernel violates space-reflection symmetry");
            }
    }

    Family family_ = Family::DeltaLocal;
    RelativeGrid grid_;
    Eigen::MatrixXd w_;
    std::vector<double> profile_;
};

/// H_rel = -(hbar^2 / 2 mu) d^2/du^2 (spectral) + W, with mu = m/2 after the
/// analytic center-of-mass separation. `mass` is the single-particle mass.
inline Mat build_relative_hamiltonian(const KernelOperator& kernel, const RelativeGrid& grid,
                                      double mass, double hbar = 1.0) {
    if (kernel.grid().points != grid.points) throw GridMismatch("kernel grid mismatch");
    if (grid.points % 2 != 0) throw InvalidRange("grid points must be even");
    const double mu = 0.5 * mass;
    const int m = grid.points;
    Mat h = Mat::Zero(m, m);
    for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) {
            Cplx acc{0.0, 0.0};
            for (int n = -m / 2; n < m / 2; ++n) {
                const double p = hbar * two_pi * n / grid.length;
                acc += std::polar(1.0 / m, two_pi * n * double(j - l) / m) * (p * p / (2.0 * mu));
            }
            h(j, l) = acc;
        }
    h += kernel.matrix().cast<Cplx>();
    const double scale = h.cwiseAbs().maxCoeff();
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
        throw NonHermitianKernel("relative hamiltonian is not hermitian");
    return h;
}

struct EigenSolution {
    Eigen::VectorXd energies;
    Mat states;  // columns, orthonormal
};

inline EigenSolution solve_spectrum(const Mat& h, int n_states) {
    const double scale = h.cwiseAbs().maxCoeff();
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
        throw NonHermitianKernel("matrix is not hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const int keep = std::min<int>(n_states, int(h.rows()));
    EigenSolution sol;
    sol.energies = es.eigenvalues().head(keep);
    sol.states = es.eigenvectors().leftCols(keep);
    return sol;
}

/// Parity of an eigenstate under u -> -u: +1, -1, or 0 when mixed
/// (degenerate subspaces may come out in arbitrary combinations).
inline int parity_of(const Eigen::Ref<const CVec>& state, const RelativeGrid& grid,
                     double tol = 1e-8) {
    Cplx overlap{0.0, 0.0};
    for (int j = 0; j < grid.points; ++j)
        overlap += std::conj(state(grid.parity_partner(j))) * state(j);
    if (std::abs(overlap - 1.0) < tol) return +1;
    if (std::abs(overlap + 1.0) < tol) return -1;
    return 0;
}

/// Applies the two-particle interaction of a relative kernel to a wavefunction
/// on the (r1, r2) product grid (both coordinates on the same ring as the
/// relative grid). Returns the resulting grid function.
///
/// For contact kernels the center-of-mass constrained integral collapses to
/// pointwise multiplication by half the profile; the discrete sum cannot
/// represent the delta together with its 1/2 Jacobian, so that reduction is
/// applied in closed form.
inline Mat apply_nonlocal_phi(const KernelOperator& kernel, const Mat& psi,
                              const RelativeGrid& grid) {
    const int m = grid.points;
    if (psi.rows() != m || psi.cols() != m || kernel.grid().points != m)
        throw GridMismatch("wavefunction grid does not match the kernel grid");

    Mat out = Mat::Zero(m, m);
    if (kernel.family() == KernelOperator::Family::DeltaLocal) {
        for (int j1 = 0; j1 < m; ++j1)
            for (int j2 = 0; j2 < m; ++j2)
                out(j1, j2) = 0.5 * kernel.profile()[size_t(grid.wrap(j1 - j2))] * psi(j1, j2);
        return out;
    }
    // int <r1-r2|V|2 r3-r1-r2> psi(r3, r1+r2-r3) dr3, quadrature over r3
    const auto& w = kernel.matrix();  // includes h
    for (int j1 = 0; j1 < m; ++j1) {
        for (int j2 = 0; j2 < m; ++j2) {
            const int ju = grid.wrap(j1 - j2);
            Cplx acc{0.0, 0.0};
            for (int j3 = 0; j3 < m; ++j3) {
                const int jup = grid.wrap(2 * j3 - j1 - j2);
                acc += w(ju, jup) * psi(j3, grid.wrap(j1 + j2 - j3));
            }
            out(j1, j2) = acc;
        }
    }
    return out;
}

/// Spectrum from the contact-kernel path against direct diagonal addition of
/// the pair potential; returns the largest relative deviation over the lowest
/// ten states.
inline double local_reduction_check(const PairPotential& phi, const RelativeGrid& grid,
                                    double mass) {
    const auto kernel = KernelOperator::local_pair(grid, phi);
    const Mat via_kernel = build_relative_hamiltonian(kernel, grid, mass);

    // direct path: spectral kinetic energy plus diag(phi)
    KernelOperator zero = KernelOperator::delta_local_profile(grid, [](double) { return 0.0; });
    Mat direct = build_relative_hamiltonian(zero, grid, mass);
    const SimulationBox box = build_box({{grid.length, 0.0}, {0.0, grid.length}, 1, 1, 1});
    for (int j = 0; j < grid.points; ++j)
        direct(j, j) += phi.evaluate({std::abs(grid.u_signed(j)), 0.0}, {0.0, 0.0}, box);

    const auto a = solve_spectrum(via_kernel, 10);
    const auto b = solve_spectrum(direct, 10);
    double worst = 0.0;
    for (int i = 0; i < a.energies.size(); ++i) {
        const double scale = std::max({1.0, std::abs(a.energies(i)), std::abs(b.energies(i))});
        worst = std::max(worst, std::abs(a.energies(i) - b.energies(i)) / scale);
    }
    return worst;
}

/// Bound-state condition for the separable kernel on the same grid:
/// 1 = -lambda sum_p |g~(p)|^2 / (p^2/2mu - E), solved by bisection below the
/// free continuum. Returns the solution of the scalar equation.
inline double separable_bound_state_energy(const RelativeGrid& grid, double lambda,
                                           double sigma_g, double mass, double hbar = 1.0) {
    if (lambda >= 0.0) throw InvalidRange("bound state requires attractive lambda");
    const double mu = 0.5 * mass;
    const int m = grid.points;
    // plane waves |p_n> with <u_j|p_n> = e^{i p_n u_j} / sqrt(L); quadrature
    // weight h in every inner product
    std::vector<double> eps(static_cast<size_t>(m), 0.0);
    std::vector<double> g2(static_cast<size_t>(m), 0.0);
    for (int n = -m / 2; n < m / 2; ++n) {
        const double p = hbar * two_pi * n / grid.length;
        Cplx gt{0.0, 0.0};
        for (int j = 0; j < m; ++j) {
            const double u = grid.u_signed(j);
            gt += std::polar(grid.h() / std::sqrt(grid.length), -p * u / hbar) *
                  std::exp(-u * u / (2.0 * sigma_g * sigma_g));
        }
        eps[size_t(n + m / 2)] = p * p / (2.0 * mu);
        g2[size_t(n + m / 2)] = std::norm(gt);
    }
    auto f = [&](double e) {
        double acc = 0.0;
        for (size_t i = 0; i < eps.size(); ++i) acc += g2[i] / (eps[i] - e);
        return 1.0 + lambda * acc;  // root of f is the bound state
    };
    double lo = -1e3 * std::abs(lambda) - 1.0, hi = -1e-14;
    if (f(lo) < 0.0) throw NonPositiveValue("bound-state bracket failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// States strictly below the free continuum minimum (zero on the ring).
inline int bound_state_count(const Mat& h, double tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    int count = 0;
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < -tol) ++count;
    return count;
}

}  // namespace ordlab
