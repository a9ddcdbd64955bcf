#include <doctest.h>

#include <cmath>

#include "nkerr/semiclassical.hpp"
#include "test_support.hpp"

using namespace nkerr;

namespace {

ModelSpec make_spec(int n, std::vector<double> u, double gamma, double eta, double g = 0.0) {
    ModelSpec spec;
    spec.n = n;
    spec.u = std::move(u);
    spec.gamma = gamma;
    spec.eta_n = eta;
    spec.g_n = g;
    return spec;
}

ModelSpec fig3() { return make_spec(3, {-10.0, 10.0}, 1.0, 1.0); }
ModelSpec fig6() { return make_spec(4, {0.0, 10.0, 1.0}, 0.0, 1.0); }
ModelSpec fig7() { return make_spec(4, {10.0, -25.0, 3.0}, 1.0, 0.1); }

ModelSpec random_spec(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.05, 1.5);
    std::uniform_int_distribution<int> order(1, 4);
    const int n = order(rng);
    ModelSpec spec;
    spec.n = n;
    spec.u.assign(static_cast<std::size_t>(min_interaction_orders(n)) + 1, 0.0);
    for (double& u : spec.u) u = dist(rng);
    spec.gamma = pos(rng);
    spec.eta_n = pos(rng);
    spec.g_n = pos(rng);
    return spec;
}

}  // namespace

TEST_SUITE("semiclassical") {

TEST_CASE("flow field values") {
    SUBCASE("vacuum is stationary for n >= 2") {
        for (int n : {2, 3, 4}) {
            ModelSpec spec = make_spec(n, {1.0, -0.5, 0.25}, 0.8, 0.3, 1.2);
            CHECK(std::abs(gp_rhs(spec, Complex(0.0, 0.0))) == 0.0);
        }
    }
    SUBCASE("linear cavity without drive") {
        ModelSpec spec = make_spec(1, {0.7}, 0.4, 0.0, 0.0);
        const Complex rhs = gp_rhs(spec, Complex(1.0, 0.0));
        CHECK(rhs.real() == doctest::Approx(-0.2));
        CHECK(rhs.imag() == doctest::Approx(-0.7));
    }
}

TEST_CASE("inverse drive function") {
    SUBCASE("three-photon value at N = 1") {
        CHECK(drive_of_density(fig3(), 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("flat two-photon curve") {
        const ModelSpec spec = make_spec(2, {0.0, 0.0}, 1.0, 0.0);
        for (double density : {0.1, 1.0, 7.3}) {
            CHECK(drive_of_density(spec, density) == doctest::Approx(0.25).epsilon(1e-12));
        }
    }
    SUBCASE("four-photon limit toward zero density") {
        const ModelSpec spec = make_spec(4, {0.0, 10.0, 0.0}, 0.0, 1.0);
        CHECK(drive_of_density(spec, 1e-7) == doctest::Approx(2.5).epsilon(1e-6));
        const CriticalDrive crit = critical_drive(spec);
        CHECK(crit.kind == CriticalDrive::Kind::finite);
        CHECK(crit.value == doctest::Approx(2.5).epsilon(1e-14));
    }
    SUBCASE("non-positive density is rejected") {
        CHECK_THROWS_AS(drive_of_density(fig3(), 0.0), std::domain_error);
        CHECK_THROWS_AS(drive_of_density(fig3(), -1.0), std::domain_error);
    }
}

TEST_CASE("critical drive case table") {
    CHECK(critical_drive(make_spec(2, {0.0, 1.0}, 1.0, 0.5)).kind ==
          CriticalDrive::Kind::finite);
    CHECK(critical_drive(make_spec(2, {0.0, 1.0}, 1.0, 0.5)).value ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK(critical_drive(fig3()).kind == CriticalDrive::Kind::infinite);
    CHECK(critical_drive(make_spec(3, {0.0, 1.0}, 0.0, 1.0)).kind ==
          CriticalDrive::Kind::zero);
    CHECK(critical_drive(make_spec(1, {1.0}, 1.0, 0.0)).kind == CriticalDrive::Kind::zero);
    CHECK(critical_drive(make_spec(5, {0.0, 1.0, 0.0}, 0.0, 1.0)).kind ==
          CriticalDrive::Kind::infinite);
}

TEST_CASE("vacuum stability") {
    SUBCASE("n = 3 decays at gamma/2") {
        const VacuumStability vac = vacuum_stability(make_spec(3, {2.0, 1.0}, 2.0, 0.5, 5.0));
        CHECK(vac.eigenvalues[0].real() == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(vac.eigenvalues[1].real() == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(vac.verdict == Stability::stable);
    }
    SUBCASE("two-photon instability threshold") {
        const VacuumStability vac = vacuum_stability(make_spec(2, {0.0, 1.0}, 1.0, 0.0, 0.3));
        CHECK(vac.eigenvalues[0].real() == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(vac.verdict == Stability::unstable);
    }
    SUBCASE("strong symmetry is marginal") {
        const VacuumStability vac = vacuum_stability(make_spec(4, {0.0, 1.0, 0.1}, 0.0, 1.0, 0.5));
        CHECK(vac.verdict == Stability::marginal);
    }
    SUBCASE("matrix entries match the closed form") {
        const ModelSpec spec = make_spec(2, {0.7, 0.2}, 0.9, 0.1, 0.4);
        const VacuumStability vac = vacuum_stability(spec);
        CHECK(vac.matrix(0, 0) == doctest::Approx(-0.45));
        CHECK(vac.matrix(1, 1) == doctest::Approx(-0.45));
        CHECK(vac.matrix(0, 1) == doctest::Approx(-2.0 * 0.4 + 0.7));
        CHECK(vac.matrix(1, 0) == doctest::Approx(-2.0 * 0.4 - 0.7));
    }
    SUBCASE("verdict agrees with the numerically evaluated Jacobian") {
        std::mt19937 rng(61);
        for (int round = 0; round < 40; ++round) {
            ModelSpec spec = random_spec(rng);
            // The closed form describes the n >= 2 vacuum; n = 1 has no
            // vacuum solution once driven.
            if (spec.n == 1) continue;
            if (round % 5 == 0) spec.gamma = 0.0;
            const VacuumStability vac = vacuum_stability(spec);
            const auto eigs = gp_jacobian_eigs(spec, Complex(0.0, 0.0));
            const double max_re = std::max(eigs[0].real(), eigs[1].real());
            const double vac_re =
                std::max(vac.eigenvalues[0].real(), vac.eigenvalues[1].real());
            CHECK(max_re == doctest::Approx(vac_re).epsilon(1e-10));
        }
    }
}

TEST_CASE("fixed points") {
    SUBCASE("below every branch only the vacuum survives") {
        const SemiclassicalSolutionSet set = fixed_points(fig3(), 0.05);
        REQUIRE(set.points.size() == 1);
        CHECK(set.points[0].density == 0.0);
        CHECK(set.classification == TransitionClass::none);
    }
    SUBCASE("three-photon first-order regime") {
        // Above the branch minimum of G_3 but in the coexistence window.
        const SemiclassicalSolutionSet set = fixed_points(fig3(), 0.75);
        int stable_nonzero = 0;
        for (const FixedPoint& fp : set.points) {
            if (fp.density > 0.0) {
                CHECK(fp.multiplicity == 3);
                CHECK(fp.residual < 1e-9);
                CHECK(drive_of_density(fig3(), fp.density) ==
                      doctest::Approx(0.75).epsilon(1e-9));
                if (fp.stability == Stability::stable) ++stable_nonzero;
            } else {
                CHECK(fp.stability == Stability::stable);
            }
        }
        CHECK(stable_nonzero == 1);
        CHECK(set.classification == TransitionClass::first_order);
    }
    SUBCASE("second-order onset grows continuously from zero") {
        const double g_c = 2.5;  // |U_2| / 4 at the parameters of fig6
        const SemiclassicalSolutionSet just_above = fixed_points(fig6(), g_c * 1.02);
        double smallest = 1e9;
        for (const FixedPoint& fp : just_above.points) {
            if (fp.density > 0.0 && fp.stability == Stability::stable) {
                smallest = std::min(smallest, fp.density);
            }
        }
        CHECK(smallest < 0.5);
        CHECK(just_above.classification == TransitionClass::second_order);

        const SemiclassicalSolutionSet below = fixed_points(fig6(), g_c * 0.9);
        for (const FixedPoint& fp : below.points) CHECK(fp.density == 0.0);
    }
    SUBCASE("multistable window of the competing-nonlinearity model") {
        const SemiclassicalSolutionSet set = fixed_points(fig7(), 2.8);
        int stable_nonzero = 0;
        for (const FixedPoint& fp : set.points) {
            if (fp.density > 0.0 && fp.stability == Stability::stable) ++stable_nonzero;
        }
        CHECK(stable_nonzero >= 2);
        CHECK(set.classification == TransitionClass::multistable);
    }
}

TEST_CASE("stationary residual and inverse consistency for random models") {
    std::mt19937 rng(62);
    std::uniform_real_distribution<double> drive(0.05, 2.0);
    int checked = 0;
    for (int round = 0; round < 60; ++round) {
        const ModelSpec spec = random_spec(rng);
        const double g = drive(rng);
        const SemiclassicalSolutionSet set = fixed_points(spec, g);
        for (const FixedPoint& fp : set.points) {
            if (fp.density <= 0.0) continue;
            ModelSpec at_drive = spec;
            at_drive.g_n = g;
            CHECK(std::abs(gp_rhs(at_drive, fp.alpha)) < 1e-9);
            CHECK(drive_of_density(spec, fp.density) == doctest::Approx(g).epsilon(1e-9));
            ++checked;
        }
    }
    CHECK(checked > 30);  // the battery must actually exercise nonzero roots
}

TEST_CASE("Z_n equivariance of the flow") {
    std::mt19937 rng(63);
    std::uniform_real_distribution<double> dist(-1.2, 1.2);
    for (int round = 0; round < 40; ++round) {
        const ModelSpec spec = random_spec(rng);
        const Complex alpha(dist(rng), dist(rng));
        for (int j = 0; j < spec.n; ++j) {
            const Complex w = std::polar(1.0, 2.0 * M_PI * j / spec.n);
            const Complex lhs = gp_rhs(spec, alpha * w);
            const Complex rhs = w * gp_rhs(spec, alpha);
            CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("analytic Jacobian matches central finite differences") {
    std::mt19937 rng(64);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double h = 1e-6;
    for (int round = 0; round < 30; ++round) {
        const ModelSpec spec = random_spec(rng);
        const Complex alpha(dist(rng), dist(rng));
        const Eigen::Matrix2d jac = gp_jacobian(spec, alpha);

        auto field = [&](double x, double y) {
            const Complex f = gp_rhs(spec, Complex(x, y));
            return Eigen::Vector2d(f.real(), f.imag());
        };
        const double x = alpha.real(), y = alpha.imag();
        Eigen::Matrix2d fd;
        fd.col(0) = (field(x + h, y) - field(x - h, y)) / (2.0 * h);
        fd.col(1) = (field(x, y + h) - field(x, y - h)) / (2.0 * h);
        CHECK((jac - fd).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("classification is invariant under the thermodynamic rescaling") {
    std::mt19937 rng(65);
    std::uniform_real_distribution<double> drive(0.1, 1.5);
    for (int round = 0; round < 20; ++round) {
        ModelSpec spec = random_spec(rng);
        const double g = drive(rng);
        const double l = 0.5 + 7.0 * std::uniform_real_distribution<double>(0, 1)(rng);

        const TransitionReport base_report = classify_transition(spec);
        const TransitionReport scaled_report = classify_transition(rescale(spec, l).spec);
        CHECK(base_report.verdict == scaled_report.verdict);

        // Rescaled branch curves: N/L against G sqrt(L^(n-2)) is L-free.
        const SemiclassicalSolutionSet base_set = fixed_points(spec, g);
        const double g_scaled = g / std::sqrt(std::pow(l, spec.n - 2));
        const SemiclassicalSolutionSet scaled_set =
            fixed_points(rescale(spec, l).spec, g_scaled);
        REQUIRE(base_set.points.size() == scaled_set.points.size());
        for (std::size_t i = 0; i < base_set.points.size(); ++i) {
            CHECK(scaled_set.points[i].density / l ==
                  doctest::Approx(base_set.points[i].density).epsilon(1e-9));
            CHECK(to_string(scaled_set.points[i].stability) ==
                  to_string(base_set.points[i].stability));
        }
    }
}

TEST_CASE("transition classification table") {
    SUBCASE("odd n never second order") {
        CHECK(classify_transition(fig3()).verdict == TransitionClass::first_order);
        CHECK(classify_transition(make_spec(5, {1.0, 1.0, 0.5}, 1.0, 1.0)).verdict !=
              TransitionClass::second_order);
        CHECK(classify_transition(make_spec(1, {1.0, 0.4}, 1.0, 0.0)).verdict !=
              TransitionClass::second_order);
    }
    SUBCASE("two-photon resonator with detuning or loss") {
        const TransitionReport r = classify_transition(make_spec(2, {1.0, 0.5}, 1.0, 0.2));
        CHECK(r.verdict == TransitionClass::second_order);
        CHECK(r.critical.value == doctest::Approx(std::sqrt(4.0 + 1.0) / 4.0).epsilon(1e-14));
        CHECK(r.slope == doctest::Approx((2.0 * 1.0 * 0.5 + 1.0 * 0.2) /
                                         (2.0 * std::sqrt(5.0)))
                             .epsilon(1e-12));
    }
    SUBCASE("four-photon special point") {
        CHECK(classify_transition(fig6()).verdict == TransitionClass::second_order);
        CHECK(classify_transition(fig6()).critical.value == doctest::Approx(2.5));
        // Slope (U_3/4) sign(U_2).
        CHECK(classify_transition(fig6()).slope == doctest::Approx(0.25).epsilon(1e-12));
        ModelSpec opposite = fig6();
        opposite.u[2] = -1.0;
        CHECK(classify_transition(opposite).verdict != TransitionClass::second_order);
        ModelSpec with_gamma = fig6();
        with_gamma.gamma = 0.3;
        CHECK(classify_transition(with_gamma).verdict != TransitionClass::second_order);
        ModelSpec with_detuning = fig6();
        with_detuning.u[0] = 0.5;
        CHECK(classify_transition(with_detuning).verdict != TransitionClass::second_order);
    }
    SUBCASE("n = 6 with a Kerr term") {
        CHECK(classify_transition(make_spec(6, {0.0, 1.0, 0.3, 0.1}, 0.0, 1.0)).verdict !=
              TransitionClass::second_order);
    }
}

TEST_CASE("multistability detection") {
    SUBCASE("same-sign interactions give at most one stationary point") {
        const MultistabilityReport r =
            detect_multistability(make_spec(2, {1.0, 0.5}, 1.0, 0.3), 1e-6, 1e3);
        CHECK(r.descartes_bound <= 1);
        CHECK(r.extrema.size() <= 1);
    }
    SUBCASE("competing nonlinearities produce overlapping folds") {
        const MultistabilityReport r = detect_multistability(fig7(), 1e-4, 100.0);
        CHECK(r.extrema.size() >= 2);
        CHECK(r.descartes_bound >= static_cast<int>(r.extrema.size()));
        // Shape: minimum, maximum, minimum as the density grows.
        REQUIRE(r.extrema.size() == 3);
        CHECK(r.extrema[0].kind == Extremum::Kind::minimum);
        CHECK(r.extrema[1].kind == Extremum::Kind::maximum);
        CHECK(r.extrema[2].kind == Extremum::Kind::minimum);
    }
    SUBCASE("detuning-only three-photon curve has exactly one minimum") {
        // G_3 diverges at both ends of (0, inf), so one interior minimum
        // always exists; it sits at 3 eta N^2 = (-gamma + sqrt(4 gamma^2 +
        // 12 U_1^2)) / 3.
        const double u1 = 2.0, gamma = 1.0, eta = 0.5;
        const MultistabilityReport r =
            detect_multistability(make_spec(3, {u1, 0.0}, gamma, eta), 1e-6, 1e3);
        REQUIRE(r.extrema.size() == 1);
        CHECK(r.extrema[0].kind == Extremum::Kind::minimum);
        const double y = (-gamma + std::sqrt(4.0 * gamma * gamma + 12.0 * u1 * u1)) / 3.0;
        const double expected = std::sqrt(y / (3.0 * eta));
        CHECK(r.extrema[0].density == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("interval validation") {
        CHECK_THROWS_AS(detect_multistability(fig7(), 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(detect_multistability(fig7(), 2.0, 1.0), std::invalid_argument);
    }
}

}  // TEST_SUITE
