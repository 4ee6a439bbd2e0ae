#include "dynamo/errors.hpp"
#include "dynamo/meansquare.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace dynamo;

namespace {

ModelParams at(double g, double delta, double eps, double sigma1) {
    return {g, delta, eps, sigma1, 1.0, 1.0};
}

}  // namespace

TEST_CASE("stability matrix layout") {
    const ModelParams p = at(0.99, 0.01, 0.1, 0.02);
    const auto m = build_stability_matrix(p);
    CHECK((m.s - stability_matrix_explicit(p)).norm() < 1e-15);
    CHECK(m.s(0, 3) == doctest::Approx(0.04).epsilon(1e-15));

    Eigen::Matrix4d expect;
    expect << -0.2, -0.01, -0.01, 0.04,
              -0.99, -0.2, 0.0, -0.01,
              -0.99, 0.0, -0.2, -0.01,
              0.0, -0.99, -0.99, -0.2;
    CHECK((m.s - expect).norm() < 1e-15);

    // swapping the middle indices leaves the matrix unchanged
    Eigen::PermutationMatrix<4> swap;
    swap.indices() << 0, 2, 1, 3;
    CHECK((swap * m.s * swap.transpose() - m.s).norm() == 0.0);

    const ModelParams q = at(0.99, 0.01, 0.1, 0.0);
    const Eigen::Matrix2d lam = (Eigen::Matrix2d() << -0.1, -0.01, -0.99, -0.1).finished();
    Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            sum.block<2, 2>(2 * i, 2 * j) += (i == j ? 1.0 : 0.0) * lam;
            sum.block<2, 2>(2 * i, 2 * j) += lam(i, j) * Eigen::Matrix2d::Identity();
        }
    CHECK((build_stability_matrix(q).s - sum).norm() < 1e-16);
}

TEST_CASE("antisymmetric direction") {
    for (double s : {0.0, 0.003, 0.2}) {
        const ModelParams p = at(0.99, 0.01, 0.13, s);
        const auto m = build_stability_matrix(p);
        const Eigen::Vector4d v(0.0, 1.0, -1.0, 0.0);
        CHECK((m.s * v + 2.0 * p.eps * v).norm() < 1e-12);
    }
}

TEST_CASE("spectral abscissa, closed form against eigensolver") {
    for (double g : {0.3, 0.99, 1.7})
        for (double d : {0.0, 0.01, 0.05, 0.3})
            for (double e : {0.01, 0.1, 0.4})
                for (double s : {0.0, 1e-5, 1e-3, 0.02, 0.5}) {
                    const auto m = build_stability_matrix(at(g, d, e, s));
                    CAPTURE(g);
                    CAPTURE(d);
                    CAPTURE(e);
                    CAPTURE(s);
                    CHECK(std::abs(spectral_abscissa(m) - spectral_abscissa_numeric(m)) < 1e-10);
                }
}

TEST_CASE("radical eigenvalue expression with sigma read as sigma1") {
    for (double s : {1e-4, 0.003, 0.05, 0.4}) {
        for (double d : {0.01, 0.04}) {
            const ModelParams p = at(0.99, d, 0.1, s);
            const auto m = build_stability_matrix(p);
            CHECK(oracle::radical_second_moment(p.g, p.delta, p.eps, p.sigma1) ==
                  doctest::Approx(spectral_abscissa_numeric(m)).epsilon(1e-9));
        }
    }
}

TEST_CASE("abscissa in the noise-free limit") {
    CHECK(spectral_abscissa(build_stability_matrix(at(0.99, 0.0, 0.1, 0.0))) ==
          doctest::Approx(-0.2));
    for (double d : {0.001, 0.01, 0.2}) {
        const ModelParams p = at(0.99, d, 0.1, 0.0);
        CHECK(spectral_abscissa(build_stability_matrix(p)) ==
              doctest::Approx(2.0 * (-p.eps + std::sqrt(p.g * d))).epsilon(1e-13));
    }
}

TEST_CASE("abscissa vanishes at the threshold") {
    ModelParams p = at(0.99, 0.01, 0.15, 0.0);
    p.sigma1 = 2 * 0.15 * (0.15 * 0.15 - 0.0099) / (0.99 * 0.99);
    CHECK(mean_square_threshold(p) == doctest::Approx(p.sigma1).epsilon(1e-15));
    CHECK(std::abs(spectral_abscissa(build_stability_matrix(p))) < 1e-10);
    CHECK(std::abs(spectral_abscissa_numeric(build_stability_matrix(p))) < 1e-10);
}

TEST_CASE("abscissa increases with sigma1") {
    double prev = -1e300;
    for (double s = 0.0; s < 0.1; s += 0.001) {
        const double a = spectral_abscissa(build_stability_matrix(at(0.99, 0.01, 0.15, s)));
        CHECK(a > prev);
        prev = a;
    }
}

TEST_CASE("criticality") {
    const double root = std::sqrt(0.99 * 0.01);
    CHECK(root == doctest::Approx(0.09949874371).epsilon(1e-10));
    CHECK(criticality(at(0.99, 0.01, root, 0.0)) == Criticality::critical);
    CHECK(criticality(at(0.99, 0.01, 0.0995, 0.0)) == Criticality::subcritical);
    CHECK(criticality(at(0.99, 0.01, 0.0994, 0.0)) == Criticality::supercritical);
    CHECK(to_string(Criticality::subcritical) == "subcritical");
}

TEST_CASE("Ryashko trace") {
    ModelParams p = at(0.99, 0.01, 0.15, 0.0);
    CHECK(ryashko_trace(p) == 0.0);
    const double star = mean_square_threshold(p);
    p.sigma1 = star / 2;
    CHECK(ryashko_trace(p) < 1.0);
    CHECK(spectral_abscissa(build_stability_matrix(p)) < 0.0);
    p.sigma1 = 2 * star;
    CHECK(ryashko_trace(p) > 1.0);
    CHECK(spectral_abscissa(build_stability_matrix(p)) > 0.0);

    // stationary covariance solves the Lyapunov equation
    p.sigma1 = 0.002;
    const Eigen::Matrix2d m = stationary_covariance(p);
    const Eigen::Matrix2d lam = (Eigen::Matrix2d() << -0.15, -0.01, -0.99, -0.15).finished();
    Eigen::Matrix2d qq = Eigen::Matrix2d::Zero();
    qq(0, 0) = 2 * p.sigma1;
    CHECK((lam * m + m * lam.transpose() + qq).norm() < 1e-15);
    CHECK((m - m.transpose()).norm() == 0.0);

    CHECK_THROWS_AS(ryashko_trace(at(0.99, 0.01, 0.05, 0.01)), DomainError);
}

TEST_CASE("three mean-square tests agree on a subcritical grid") {
    int checked = 0;
    for (double g : {0.5, 0.99, 1.5})
        for (double d : {0.001, 0.01, 0.05})
            for (int ie = 1; ie <= 6; ++ie)
                for (int is = 0; is <= 12; ++is) {
                    const double e = std::sqrt(g * d) * (1.0 + 0.3 * ie);
                    ModelParams p = at(g, d, e, 0.0);
                    const double star = mean_square_threshold(p);
                    p.sigma1 = star * is / 6.0;
                    if (std::abs(p.sigma1 - star) < 1e-9) continue;
                    const bool by_abscissa = spectral_abscissa(build_stability_matrix(p)) < 0.0;
                    const bool by_trace = ryashko_trace(p) < 1.0;
                    const bool by_threshold = p.sigma1 < star;
                    CHECK(by_abscissa == by_threshold);
                    CHECK(by_trace == by_threshold);
                    ++checked;
                }
    CHECK(checked > 500);
}

TEST_CASE("report") {
    ModelParams p = at(0.99, 0.01, 0.15, 0.001);
    auto r = ms_report(p);
    CHECK(r.ms_stable);
    CHECK(r.abscissa < 0.0);
    CHECK(r.criticality == Criticality::subcritical);
    REQUIRE(r.threshold_sigma.has_value());
    CHECK(*r.threshold_sigma == doctest::Approx(2 * 0.15 * (0.0225 - 0.0099) / (0.99 * 0.99)));
    REQUIRE(r.ryashko_trace.has_value());
    CHECK(*r.ryashko_trace == doctest::Approx(p.sigma1 / *r.threshold_sigma).epsilon(1e-12));

    // supercritical drift: the cubic exceeds 2 eps for any noise
    for (double s : {0.0, 1e-6, 0.01}) {
        r = ms_report(at(0.99, 0.01, 0.05, s));
        CHECK(!r.ms_stable);
        CHECK(r.criticality == Criticality::supercritical);
        CHECK(!r.threshold_sigma.has_value());
    }
}
