#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "ordlab/potentials.hpp"

using namespace ordlab;

namespace {

SimulationBox ring_box(double L, int dim = 2) {
    return build_box({{L, 0.0}, {0.0, L}, 1, 1, dim});
}

// Central finite differences with one Richardson step (h and h/2).
double fd_partial(const PairPotential& p, Vec2 r1, Vec2 r2, const SimulationBox& box, int arg,
                  int axis, double h) {
    auto eval = [&](double d1x, double d1y, double d2x, double d2y) {
        return p.evaluate({r1.x + d1x, r1.y + d1y}, {r2.x + d2x, r2.y + d2y}, box);
    };
    auto diff = [&](double step) {
        double plus, minus;
        if (arg == 1 && axis == 0) plus = eval(step, 0, 0, 0), minus = eval(-step, 0, 0, 0);
        else if (arg == 1) plus = eval(0, step, 0, 0), minus = eval(0, -step, 0, 0);
        else if (axis == 0) plus = eval(0, 0, step, 0), minus = eval(0, 0, -step, 0);
        else plus = eval(0, 0, 0, step), minus = eval(0, 0, 0, -step);
        return (plus - minus) / (2.0 * step);
    };
    const double d1 = diff(h), d2 = diff(h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

double fd_second(const PairPotential& p, Vec2 r1, Vec2 r2, const SimulationBox& box, int arg,
                 int axis, double h) {
    auto shifted = [&](double s) {
        Vec2 a = r1, b = r2;
        double& c = (arg == 1) ? (axis == 0 ? a.x : a.y) : (axis == 0 ? b.x : b.y);
        c += s;
        return p.evaluate(a, b, box);
    };
    auto diff = [&](double step) {
        return (shifted(step) - 2.0 * shifted(0.0) + shifted(-step)) / (step * step);
    };
    const double d1 = diff(h), d2 = diff(h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

double fd_cross(const PairPotential& p, Vec2 r1, Vec2 r2, const SimulationBox& box, int axis,
                double h) {
    auto shifted = [&](double s1, double s2) {
        Vec2 a = r1, b = r2;
        (axis == 0 ? a.x : a.y) += s1;
        (axis == 0 ? b.x : b.y) += s2;
        return p.evaluate(a, b, box);
    };
    auto diff = [&](double step) {
        return (shifted(step, step) - shifted(step, -step) - shifted(-step, step) +
                shifted(-step, -step)) /
               (4.0 * step * step);
    };
    const double d1 = diff(h), d2 = diff(h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

void check_bundle_against_fd(const PairPotential& p, Vec2 r1, Vec2 r2, const SimulationBox& box,
                             int dim, double scale, double tol = 1e-6) {
    const double h = 1e-3;  // with Richardson this gives ~1e-10 truncation
    auto b = p.derivatives(r1, r2, box);
    CHECK(b.grad1.x == Approx(fd_partial(p, r1, r2, box, 1, 0, h)).margin(tol * scale));
    CHECK(b.grad2.x == Approx(fd_partial(p, r1, r2, box, 2, 0, h)).margin(tol * scale));
    double lap1 = fd_second(p, r1, r2, box, 1, 0, h);
    double lap2 = fd_second(p, r1, r2, box, 2, 0, h);
    double cross = fd_cross(p, r1, r2, box, 0, h);
    if (dim == 2) {
        CHECK(b.grad1.y == Approx(fd_partial(p, r1, r2, box, 1, 1, h)).margin(tol * scale));
        CHECK(b.grad2.y == Approx(fd_partial(p, r1, r2, box, 2, 1, h)).margin(tol * scale));
        lap1 += fd_second(p, r1, r2, box, 1, 1, h);
        lap2 += fd_second(p, r1, r2, box, 2, 1, h);
        cross += fd_cross(p, r1, r2, box, 1, h);
    }
    CHECK(b.lap1 == Approx(lap1).margin(tol * scale));
    CHECK(b.lap2 == Approx(lap2).margin(tol * scale));
    CHECK(b.cross == Approx(cross).margin(tol * scale));
}

}  // namespace

TEST_CASE("gaussian core values") {
    auto box = ring_box(20.0);
    GaussianCore phi(1.0, 1.0);
    SECTION("zero separation") {
        CHECK(phi.evaluate({3.0, 3.0}, {3.0, 3.0}, box) == Approx(1.0));
    }
    SECTION("separation sigma") {
        CHECK(phi.evaluate({3.0, 3.0}, {4.0, 3.0}, box) == Approx(std::exp(-1.0)).epsilon(1e-12));
    }
    SECTION("bounded by epsilon0 and derivative bound") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 20.0);
        const double grad_max = 1.0 * std::sqrt(2.0 / std::exp(1.0)) / 1.0;
        for (int i = 0; i < 200; ++i) {
            Vec2 r1{u(rng), u(rng)}, r2{u(rng), u(rng)};
            const double v = phi.evaluate(r1, r2, box);
            CHECK(std::abs(v) <= 1.0 + 1e-12);
            auto b = phi.derivatives(r1, r2, box);
            CHECK(b.grad1.norm() <= grad_max + 1e-9);
        }
    }
}

TEST_CASE("substrate coupled value against an independent evaluation") {
    auto box = ring_box(8.0);
    SubstrateCoupled phi(0.7, 1.1, 0.4, 2, 1);
    const Vec2 r1{1.25, 2.5}, r2{2.0, 6.9};

    // Independent long-double evaluation of the defining formula.
    const long double L = 8.0L;
    const long double Gx = 2.0L * 3.14159265358979323846264338327950288L * 2.0L / L;
    const long double Gy = 2.0L * 3.14159265358979323846264338327950288L * 1.0L / L;
    long double ux = r1.x - r2.x, uy = r1.y - r2.y;
    // minimal image on the square ring
    ux -= L * std::floor(ux / L + 0.5L);
    uy -= L * std::floor(uy / L + 0.5L);
    const long double u2 = ux * ux + uy * uy;
    const long double core = 0.7L * std::exp(-u2 / (1.1L * 1.1L));
    const long double env = std::exp(-u2 / (1.1L * 1.1L));
    const long double sub =
        0.4L * std::cos(Gx * (r1.x + r2.x) + Gy * (r1.y + r2.y)) * env;
    CHECK(phi.evaluate(r1, r2, box) == Approx(double(core + sub)).epsilon(1e-12));
}

TEST_CASE("symmetry under argument exchange") {
    auto box = ring_box(9.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 9.0);
    GaussianCore g(1.3, 0.8);
    SubstrateCoupled s(0.5, 1.0, 0.8, 1, 0);
    HarmonicPair h(2.0);
    for (int i = 0; i < 100; ++i) {
        Vec2 r1{u(rng), u(rng)}, r2{u(rng), u(rng)};
        for (const PairPotential* p : {(const PairPotential*)&g, (const PairPotential*)&s,
                                       (const PairPotential*)&h}) {
            const double ab = p->evaluate(r1, r2, box);
            const double ba = p->evaluate(r2, r1, box);
            CHECK(ab == Approx(ba).margin(1e-12 * (1.0 + std::abs(ab))));
        }
    }
}

TEST_CASE("translation invariance separates local from nonlocal") {
    auto box = ring_box(10.0);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    GaussianCore g(1.0, 1.2);
    SubstrateCoupled s(1.0, 1.2, 0.6, 1, 0);
    SubstrateCoupled s0(1.0, 1.2, 0.0, 1, 0);  // g = 0 reduction

    double worst_local = 0.0, worst_reduced = 0.0, worst_nonlocal = 0.0;
    for (int i = 0; i < 200; ++i) {
        Vec2 r1{u(rng), u(rng)}, r2{u(rng), u(rng)}, shift{u(rng), u(rng)};
        auto moved = [&](const PairPotential& p) {
            return std::abs(p.evaluate(r1 + shift, r2 + shift, box) - p.evaluate(r1, r2, box));
        };
        worst_local = std::max(worst_local, moved(g));
        worst_reduced = std::max(worst_reduced, moved(s0));
        worst_nonlocal = std::max(worst_nonlocal, moved(s));
    }
    CHECK(worst_local < 1e-12);
    CHECK(worst_reduced < 1e-12);
    CHECK(worst_nonlocal > 0.1 * s.coupling());
}

TEST_CASE("local gradient identity grad2 = -grad1") {
    auto box = ring_box(12.0);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 12.0);
    GaussianCore g(0.9, 1.4);
    HarmonicPair h(1.7);
    for (int i = 0; i < 100; ++i) {
        Vec2 r1{u(rng), u(rng)}, r2{u(rng), u(rng)};
        for (const PairPotential* p : {(const PairPotential*)&g, (const PairPotential*)&h}) {
            auto b = p->derivatives(r1, r2, box);
            CHECK(b.grad2.x == Approx(-b.grad1.x).margin(1e-10));
            CHECK(b.grad2.y == Approx(-b.grad1.y).margin(1e-10));
            CHECK(b.lap2 == Approx(b.lap1).margin(1e-10));
            CHECK(b.cross == Approx(-b.lap1).margin(1e-10));
        }
    }
}

TEST_CASE("harmonic bundle is exact") {
    auto box = ring_box(100.0);
    HarmonicPair h(2.5);
    const Vec2 r1{3.0, 4.0}, r2{1.0, 1.0};
    auto b = h.derivatives(r1, r2, box);
    CHECK(b.grad1.x == Approx(2.5 * 2.0));
    CHECK(b.grad1.y == Approx(2.5 * 3.0));
    CHECK(b.lap1 == Approx(2.0 * 2.5));
    CHECK(b.cross == Approx(-2.0 * 2.5));
}

TEST_CASE("gaussian gradient vanishes at coincident points") {
    auto box = ring_box(6.0);
    GaussianCore g(1.0, 1.0);
    auto b = g.derivatives({2.0, 2.0}, {2.0, 2.0}, box);
    CHECK(b.grad1.x == Approx(0.0).margin(1e-14));
    CHECK(b.grad1.y == Approx(0.0).margin(1e-14));
}

TEST_CASE("derivative bundles agree with finite differences") {
    std::mt19937_64 rng(33);

    SECTION("gaussian core, 2D") {
        auto box = ring_box(10.0);
        GaussianCore g(1.1, 1.3);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        for (int i = 0; i < 100; ++i) {
            Vec2 r1{u(rng), u(rng)};
            // keep the separation away from the wrap seam
            std::uniform_real_distribution<double> d(-2.0, 2.0);
            Vec2 r2{r1.x + d(rng), r1.y + d(rng)};
            check_bundle_against_fd(g, r1, r2, box, 2, 1.1);
        }
    }
    SECTION("substrate coupled, 2D") {
        auto box = ring_box(10.0);
        SubstrateCoupled s(0.8, 1.2, 0.5, 1, 1);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        for (int i = 0; i < 100; ++i) {
            Vec2 r1{u(rng), u(rng)};
            Vec2 r2{r1.x + d(rng), r1.y + d(rng)};
            check_bundle_against_fd(s, r1, r2, box, 2, 1.0);
        }
    }
    SECTION("substrate coupled, 1D and with periodic images") {
        auto box = ring_box(6.0, 1);
        SubstrateCoupled s(0.8, 1.5, 0.5, 2, 0, 1, 3);
        std::uniform_real_distribution<double> u(0.0, 6.0);
        for (int i = 0; i < 50; ++i) {
            Vec2 r1{u(rng), 0.0}, r2{u(rng), 0.0};
            check_bundle_against_fd(s, r1, r2, box, 1, 1.0);
        }
    }
    SECTION("harmonic pair, 2D") {
        auto box = ring_box(50.0);
        HarmonicPair h(1.9);
        std::uniform_real_distribution<double> u(20.0, 30.0);
        for (int i = 0; i < 20; ++i) {
            Vec2 r1{u(rng), u(rng)}, r2{u(rng), u(rng)};
            check_bundle_against_fd(h, r1, r2, box, 2, 10.0);
        }
    }
}

TEST_CASE("periodic image sums are smooth across the box") {
    // With images the potential must be exactly periodic in each argument.
    auto box = ring_box(6.0);
    GaussianCore g(1.0, 1.5, 2, 3);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int i = 0; i < 50; ++i) {
        Vec2 r1{u(rng), u(rng)}, r2{u(rng), u(rng)};
        const double base = g.evaluate(r1, r2, box);
        const double shifted = g.evaluate(r1 + box.edge1(), r2, box);
        CHECK(base == Approx(shifted).epsilon(1e-12));
    }
}
