#include "dynamo/errors.hpp"
#include "dynamo/lyapunov.hpp"
#include "dynamo/meansquare.hpp"
#include "dynamo/model.hpp"
#include "dynamo/rng.hpp"
#include "dynamo/sde.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dynamo;

namespace {

ModelParams at(double g, double delta, double eps, double sigma1) {
    return {g, delta, eps, sigma1, 1.0, 1.0};
}

struct BinStats {
    std::vector<double> mean;
    std::vector<double> se;
};

// Per-bin mean and standard error over independent single-path histograms.
BinStats path_histograms(const LinearSystem& sys, SimConfig cfg, const RngSpec& rng,
                         std::size_t bins, std::size_t paths, double burn_in = 0.1) {
    cfg.n_paths = 1;
    std::vector<std::vector<double>> h;
    for (std::size_t i = 0; i < paths; ++i)
        h.push_back(angular_density(sys, cfg, substream(rng, i), bins, burn_in).density);
    BinStats s{std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0)};
    for (std::size_t b = 0; b < bins; ++b) {
        for (const auto& row : h) s.mean[b] += row[b];
        s.mean[b] /= static_cast<double>(paths);
        double ss = 0.0;
        for (const auto& row : h) ss += (row[b] - s.mean[b]) * (row[b] - s.mean[b]);
        s.se[b] = std::sqrt(ss / static_cast<double>(paths - 1) / static_cast<double>(paths));
    }
    return s;
}

}  // namespace

TEST_CASE("philox known answers") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
          PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal stream") {
    NormalStream a({7, 3});
    NormalStream b({7, 3});
    NormalStream c({7, 4});
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);

    NormalStream s({12345, 0});
    const int n = 400000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.next();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 5.0 / std::sqrt(n));
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));

    CHECK(substream({1, 2}, 5).seed == 1);
    CHECK(substream({1, 2}, 5).stream == substream({1, 2}, 5).stream);
    CHECK(substream({1, 2}, 5).stream != substream({1, 2}, 6).stream);
}

TEST_CASE("linear stepper") {
    const auto sys = linearize(at(0.99, 0.01, 0.1, 0.05));
    CHECK(em_step_linear({0.0, 0.0}, sys, 1e-3, 0.7).norm() == 0.0);
    const Eigen::Vector2d x(0.3, -1.1);
    CHECK((em_step_linear(x, sys, 1e-3, 0.0) - (x + 1e-3 * sys.drift * x)).norm() == 0.0);
    CHECK((em_step_linear(x, sys, 1e-3, 0.04) -
           (x + 1e-3 * sys.drift * x + 0.04 * sys.diffusion * x))
              .norm() < 1e-16);
    for (double dw : {-0.3, 0.0, 0.05, 2.0})
        CHECK(milstein_correction(x, sys, 1e-3, dw).norm() == 0.0);
}

TEST_CASE("nonlinear stepper") {
    ModelParams p = at(0.99, 0.01, 0.1, 0.3);
    auto r = em_step_nonlinear({0.0, 0.0}, p, 1e-3, 0.5);
    CHECK(r.state.b_r == 0.0);
    CHECK(r.state.b_phi == 0.0);
    CHECK(!r.diverged);

    p.sigma1 = 0.0;
    const FieldState e{-0.010153489028290262, 0.10154546800493437};
    r = em_step_nonlinear(e, p, 1e-3, 0.1);
    CHECK(std::hypot(r.state.b_r - e.b_r, r.state.b_phi - e.b_phi) < 1e-4 * 1e-3);

    p = at(1.0, 0.05, 0.05, 0.5);
    const double x = 0.1, y = 0.1, dt = 1e-3, dw = 0.02;
    const double pa = 1.0 / (1.0 + y * y);
    const double pb = (1.0 + y * y) / (1.0 + 2.0 * y * y);
    const double fr = -(0.05 * pa * y + 0.05 * pb * x);
    const double fphi = -(1.0 * x + 0.05 * pb * y);
    const double gr = -std::sqrt(2.0 * 0.5) * pa * y;
    r = em_step_nonlinear({x, y}, p, dt, dw);
    CHECK(r.state.b_r == doctest::Approx(x + fr * dt + gr * dw).epsilon(1e-15));
    CHECK(r.state.b_phi == doctest::Approx(y + fphi * dt).epsilon(1e-15));

    r = em_step_nonlinear({1e151, 1.0}, at(0.99, 0.01, 0.1, 0.0), 1e-3, 0.0);
    CHECK(r.diverged);
}

TEST_CASE("config validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = SimConfig{};
    c.t_final = 50 * c.dt;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = SimConfig{};
    c.n_paths = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = SimConfig{};
    c.renorm_every = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = SimConfig{};
    c.x0 = {0.0, 0.0};
    CHECK_THROWS_AS(mc_lyapunov(linearize(at(0.99, 0.01, 0.1, 0.05)), c, {}), ValidationError);
}

TEST_CASE("deterministic Lyapunov estimate") {
    const ModelParams p = at(0.99, 0.01, 0.05, 0.0);
    SimConfig cfg;
    cfg.t_final = 500;
    cfg.n_paths = 2;
    const auto est = mc_lyapunov(linearize(p), cfg, {});
    CHECK(std::abs(est.value - deterministic_abscissa(p)) < 10 * cfg.dt);
    CHECK(est.std_error >= 0.0);

    const auto m2 = mc_second_moment(linearize(p), cfg, {});
    CHECK(std::abs(m2.value - 2 * deterministic_abscissa(p)) < 10 * cfg.dt);
}

TEST_CASE("Monte Carlo Lyapunov against the closed form") {
    const ModelParams p = at(0.99, 0.01, 0.1, 0.05);
    const auto sys = linearize(p);
    const double ref = lyapunov_hypergeometric(p).value;
    SimConfig cfg;  // dt 1e-3, t_final 2000, 32 paths
    const auto est = mc_lyapunov(sys, cfg, {});
    CHECK(std::abs(est.value - ref) < 3 * est.std_error);
    CHECK(est.n_samples == 32);

    // a.s. constancy: a different starting direction on the same streams
    SimConfig other = cfg;
    other.x0 = {0.3, -2.0};
    const auto est2 = mc_lyapunov(sys, other, {});
    CHECK(std::abs(est.value - est2.value) <
          3 * std::hypot(est.std_error, est2.std_error));

    // step-size refinement
    SimConfig fine = cfg;
    fine.dt = 5e-4;
    fine.renorm_every = 20;
    const auto est3 = mc_lyapunov(sys, fine, {});
    CHECK(std::abs(est.value - est3.value) < 3 * std::hypot(est.std_error, est3.std_error));
}

TEST_CASE("results do not depend on worker count") {
    const auto sys = linearize(at(0.99, 0.01, 0.1, 0.05));
    SimConfig cfg;
    cfg.t_final = 50;
    cfg.n_paths = 7;
    SimConfig many = cfg;
    many.workers = 3;
    CHECK(mc_lyapunov_paths(sys, cfg, {9, 1}) == mc_lyapunov_paths(sys, many, {9, 1}));
    const auto a = mc_second_moment(sys, cfg, {9, 1});
    const auto b = mc_second_moment(sys, many, {9, 1});
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(angular_density(sys, cfg, {9, 1}, 32).density ==
          angular_density(sys, many, {9, 1}, 32).density);
}

TEST_CASE("single short path") {
    const auto sys = linearize(at(0.99, 0.01, 0.1, 0.05));
    SimConfig cfg;
    cfg.t_final = 10;
    cfg.n_paths = 1;
    const auto est = mc_lyapunov(sys, cfg, {});
    CHECK(std::isfinite(est.value));
    CHECK(std::isfinite(est.std_error));
    CHECK(est.std_error > 0.0);
}

TEST_CASE("renormalised growth stays bounded between renormalisations") {
    const auto sys = linearize(at(0.99, 0.01, 0.1, 0.05));
    const double dt = 1e-3;
    const std::size_t every = 10;
    NormalStream normals({3, 0});
    double max_dw = 0.0;
    double worst = 0.0;
    for (int block = 0; block < 20000; ++block) {
        Eigen::Vector2d x(1.0, 0.0);
        for (std::size_t k = 0; k < every; ++k) {
            const double dw = std::sqrt(dt) * normals.next();
            max_dw = std::max(max_dw, std::abs(dw));
            x = em_step_linear(x, sys, dt, dw);
        }
        worst = std::max(worst, std::abs(std::log(x.norm())));
    }
    const double k_bound =
        every * (dt * sys.drift.operatorNorm() + sys.diffusion.operatorNorm() * max_dw);
    CHECK(worst <= k_bound);
}

TEST_CASE("second-moment growth sign") {
    ModelParams p = at(0.99, 0.01, 0.15, 0.0);
    const double star = mean_square_threshold(p);
    SimConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_final = 40;
    cfg.n_paths = 20000;
    for (double f : {0.5, 2.0}) {
        p.sigma1 = f * star;
        const double abscissa = spectral_abscissa(build_stability_matrix(p));
        const auto est = mc_second_moment(linearize(p), cfg, {1, 0});
        CAPTURE(f);
        CHECK((est.value < 0.0) == (abscissa < 0.0));
    }
}

TEST_CASE("angular density") {
    const auto sys = linearize(at(0.99, 0.01, 0.1, 0.05));
    SimConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_final = 200;
    cfg.n_paths = 16;
    const auto h = angular_density(sys, cfg, {}, 64);
    CHECK(std::abs(h.integral() - 1.0) < 1e-12);
    CHECK(h.density.size() == 64);
    CHECK(h.lower == doctest::Approx(-std::numbers::pi / 2));

    CHECK_THROWS_AS(angular_density(sys, cfg, {}, 8), ValidationError);
    CHECK_THROWS_AS(angular_density(linearize(at(0.99, 0.01, 0.1, 0.0)), cfg, {}, 32),
                    DomainError);

    const std::size_t bins = 32, paths = 32;
    const auto base = path_histograms(sys, cfg, {1, 0}, bins, paths);
    const auto seed2 = path_histograms(sys, cfg, {2, 0}, bins, paths);
    SimConfig longer = cfg;
    longer.t_final = 2 * cfg.t_final;
    const auto doubled = path_histograms(sys, longer, {1, 0}, bins, paths);
    const auto burn = path_histograms(sys, cfg, {1, 0}, bins, paths, 0.3);
    for (std::size_t b = 0; b < bins; ++b) {
        CAPTURE(b);
        CHECK(std::abs(doubled.mean[b] - base.mean[b]) <
              5 * std::hypot(doubled.se[b], base.se[b]) + 1e-12);
        CHECK(std::abs(seed2.mean[b] - base.mean[b]) <
              5 * std::hypot(seed2.se[b], base.se[b]) + 1e-12);
        CHECK(std::abs(burn.mean[b] - base.mean[b]) <
              5 * std::hypot(burn.se[b], base.se[b]) + 1e-12);
    }
}
