#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "ordlab/observables.hpp"

using namespace ordlab;

namespace {

SimulationBox square_box(double a, int cells) {
    return build_box({{a, 0.0}, {0.0, a}, cells, cells, 2});
}

SampleSet replicated_set(const Configuration& cfg, size_t copies = 64) {
    SampleSet set{cfg.box, {}, {}};
    for (size_t i = 0; i < copies; ++i) set.samples.push_back({cfg.frac, 0.0, long(i), 1});
    set.chains.push_back({1, 0.0, 0.0, 0.0, long(copies), 0, 1});
    return set;
}

SampleSet ideal_gas_set(const SimulationBox& box, int n, size_t count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SampleSet set{box, {}, {}};
    for (size_t s = 0; s < count; ++s) {
        Sample smp;
        smp.sweep = long(s);
        smp.chain_seed = seed;
        for (int i = 0; i < n; ++i) smp.frac.push_back({u(rng), u(rng)});
        set.samples.push_back(std::move(smp));
    }
    set.chains.push_back({seed, 0.0, 1.0, 0.0, long(count), 0, 1});
    return set;
}

}  // namespace

TEST_CASE("fourier_density exact values") {
    auto box = square_box(1.0, 4);

    SECTION("one particle at the origin gives 1 for any k") {
        std::vector<Vec2> frac{{0.0, 0.0}};
        for (int m1 = -3; m1 <= 3; ++m1)
            for (int m2 = -3; m2 <= 3; ++m2) {
                const Cplx z = fourier_density(frac, box, box_wavevector(box, m1, m2));
                CHECK(z.real() == Approx(1.0).margin(1e-12));
                CHECK(z.imag() == Approx(0.0).margin(1e-12));
            }
    }
    SECTION("perfect lattice: N on reciprocal K, 0 on fractional k") {
        auto cfg = initial_lattice_configuration(box);
        const double n = cfg.size();
        const Cplx at_K = fourier_density(cfg, box_wavevector(box, 4, 0));
        CHECK(at_K.real() == Approx(n).epsilon(1e-12));
        CHECK(at_K.imag() == Approx(0.0).margin(1e-10));
        // geometric series sums to zero when m1 mod n1 != 0
        for (int m1 : {1, 2, 3, 5, 6, 7}) {
            const Cplx z = fourier_density(cfg, box_wavevector(box, m1, 0));
            CHECK(std::abs(z) == Approx(0.0).margin(1e-10));
        }
    }
    SECTION("k = 0 returns N exactly") {
        auto cfg = initial_lattice_configuration(box);
        const Cplx z = fourier_density(cfg, box_wavevector(box, 0, 0));
        CHECK(z.real() == Approx(double(cfg.size())));
        CHECK(z.imag() == 0.0);
    }
    SECTION("conjugation: rho(-k) = conj(rho(k))") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Vec2> frac;
        for (int i = 0; i < 12; ++i) frac.push_back({u(rng), u(rng)});
        for (int m1 = -4; m1 <= 4; ++m1)
            for (int m2 = -4; m2 <= 4; ++m2) {
                const Cplx a = fourier_density(frac, box, box_wavevector(box, m1, m2));
                const Cplx b = fourier_density(frac, box, box_wavevector(box, -m1, -m2));
                CHECK(a.real() == Approx(b.real()).margin(1e-12));
                CHECK(a.imag() == Approx(-b.imag()).margin(1e-12));
            }
    }
    SECTION("lattice translations leave reciprocal rho invariant") {
        std::mt19937_64 rng(16);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Vec2> frac;
        for (int i = 0; i < 10; ++i) frac.push_back({u(rng), u(rng)});
        auto K = box_wavevector(box, 4, 8);
        const Cplx base = fourier_density(frac, box, K);
        // shift everyone by a1 (fractional step 1/n1 along edge1)
        std::vector<Vec2> shifted;
        for (const auto& f : frac)
            shifted.push_back(SimulationBox::wrap_frac({f.x + 0.25, f.y}));
        const Cplx moved = fourier_density(shifted, box, K);
        CHECK(std::abs(base - moved) < 1e-12 * (1.0 + std::abs(base)));
    }
}

TEST_CASE("order_parameter limits") {
    auto box = square_box(1.0, 4);

    SECTION("frozen perfect lattice has rho_K = 1") {
        auto set = replicated_set(initial_lattice_configuration(box));
        auto rep = order_parameter(set, box_wavevector(box, 4, 0));
        CHECK(std::abs(rep.rho) == Approx(1.0).epsilon(1e-12));
        CHECK(rep.stderr_ < 1e-15);
    }
    SECTION("rho_0 = 1 exactly for any sample set") {
        auto set = ideal_gas_set(box, 16, 80, 44);
        auto rep = order_parameter(set, box_wavevector(box, 0, 0));
        CHECK(rep.rho.real() == 1.0);
        CHECK(rep.rho.imag() == 0.0);
    }
    SECTION("ideal gas stays under the random-phase envelope") {
        const int n = 64;
        const size_t count = 256;
        auto gas_box = square_box(1.0, 8);
        auto set = ideal_gas_set(gas_box, n, count, 7);
        auto rep = order_parameter(set, box_wavevector(gas_box, 3, 1));
        CHECK(std::abs(rep.rho) < 3.0 / std::sqrt(double(n) * double(count)));
    }
}

TEST_CASE("structure_factor") {
    SECTION("ideal gas: S(k) = 1 within errors") {
        auto box = square_box(1.0, 8);
        auto set = ideal_gas_set(box, 64, 256, 13);
        auto [s, se] = [&] {
            auto r = structure_factor(set, box_wavevector(box, 3, 2));
            return std::make_pair(r.mean, r.stderr_);
        }();
        CHECK(s == Approx(1.0).margin(3.0 * se));
    }
    SECTION("frozen lattice: S(K) = N") {
        auto box = square_box(1.0, 4);
        auto cfg = initial_lattice_configuration(box);
        auto set = replicated_set(cfg);
        auto r = structure_factor(set, box_wavevector(box, 4, 0));
        CHECK(r.mean == Approx(double(cfg.size())).epsilon(1e-12));
    }
    SECTION("variance inequality S(k) >= N |rho_k|^2 - 3 se") {
        auto box = square_box(1.0, 8);
        auto set = ideal_gas_set(box, 32, 128, 3);
        const double n = 32.0;
        for (int m1 = 1; m1 <= 4; ++m1) {
            auto k = box_wavevector(box, m1, 1);
            auto s = structure_factor(set, k);
            auto rho = order_parameter(set, k);
            CHECK(s.mean >= n * std::norm(rho.rho) - 3.0 * (s.stderr_ + rho.stderr_) - 1e-12);
            CHECK(s.mean >= 0.0);
        }
    }
}

TEST_CASE("crystallinity_report flags") {
    auto box = square_box(1.0, 4);
    std::vector<WaveVector> kset;
    for (int m1 = 0; m1 <= 4; ++m1) kset.push_back(box_wavevector(box, m1, 0));

    SECTION("frozen lattice is ordered") {
        auto set = replicated_set(initial_lattice_configuration(box));
        auto rep = crystallinity_report(set, kset);
        CHECK(rep.ordered);
        bool saw_full_shell = false;
        for (const auto& row : rep.rows)
            if (row.k.cls == WaveClass::Reciprocal && row.k.m1 == 4)
                saw_full_shell = std::abs(row.rho) > 0.99;
        CHECK(saw_full_shell);
    }
    SECTION("ideal gas is not ordered") {
        auto set = ideal_gas_set(box, 16, 256, 21);
        auto rep = crystallinity_report(set, kset);
        CHECK_FALSE(rep.ordered);
    }
}

TEST_CASE("classical Bogoliubov check") {
    SECTION("disordered gas: rhs collapses, slack positive") {
        auto box = square_box(1.0, 8);
        auto set = ideal_gas_set(box, 64, 256, 31);
        GaussianCore phi(1.0, 0.3);
        auto k = box_wavevector(box, 1, 0);
        auto K = box_wavevector(box, 8, 0);
        auto rep = bogoliubov_check_classical(set, phi, k, K, 1.0);
        CHECK(rep.lhs > 0.0);
        CHECK(rep.rhs < 0.05);
        CHECK(rep.slack > -3.0 * rep.slack_stderr);
    }
    SECTION("wavevector class preconditions") {
        auto box = square_box(1.0, 4);
        auto set = ideal_gas_set(box, 16, 64, 5);
        GaussianCore phi(1.0, 0.3);
        CHECK_THROWS_AS(bogoliubov_check_classical(set, phi, box_wavevector(box, 0, 0),
                                                   box_wavevector(box, 4, 0), 1.0),
                        InvalidRange);
        CHECK_THROWS_AS(bogoliubov_check_classical(set, phi, box_wavevector(box, 4, 0),
                                                   box_wavevector(box, 4, 0), 1.0),
                        InvalidRange);
        CHECK_THROWS_AS(bogoliubov_check_classical(set, phi, box_wavevector(box, 1, 0),
                                                   box_wavevector(box, 1, 0), 1.0),
                        InvalidRange);
    }
    SECTION("frozen-lattice sanity: |rho_2k+K - rho_K| <= 2") {
        auto box = square_box(1.0, 4);
        auto set = replicated_set(initial_lattice_configuration(box));
        for (int m1 = 1; m1 < 4; ++m1) {
            auto z2 = order_parameter(set, box_wavevector(box, 2 * m1 + 4, 0));
            auto zK = order_parameter(set, box_wavevector(box, 4, 0));
            CHECK(std::abs(z2.rho - zK.rho) <= 2.0 + 1e-12);
        }
    }
}
