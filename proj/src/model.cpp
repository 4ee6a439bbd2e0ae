#include "dynamo/model.hpp"

#include "dynamo/errors.hpp"
#include "dynamo/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace dynamo {

void ModelParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("invalid model parameter: ") + what);
    };
    require(std::isfinite(g) && g > 0.0, "g must be > 0");
    require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0");
    require(std::isfinite(eps) && eps >= 0.0, "eps must be >= 0");
    require(std::isfinite(sigma1) && sigma1 >= 0.0, "sigma1 must be >= 0");
    require(std::isfinite(k_alpha) && k_alpha > 0.0, "k_alpha must be > 0");
    require(std::isfinite(k_beta) && k_beta > 0.0, "k_beta must be > 0");
}

Quenching quenching(double b_phi, const ModelParams& params) {
    const double x2 = b_phi * b_phi;
    return {1.0 / (1.0 + params.k_alpha * x2), (1.0 + x2) / (1.0 + (params.k_beta + 1.0) * x2)};
}

Eigen::Vector2d drift_nonlinear(const FieldState& state, const ModelParams& params) {
    const auto [phi_a, phi_b] = quenching(state.b_phi, params);
    return {-(params.delta * phi_a * state.b_phi + params.eps * phi_b * state.b_r),
            -(params.g * state.b_r + params.eps * phi_b * state.b_phi)};
}

Eigen::Vector2d diffusion_nonlinear(const FieldState& state, const ModelParams& params) {
    const auto [phi_a, phi_b] = quenching(state.b_phi, params);
    (void)phi_b;
    return {-std::sqrt(2.0 * params.sigma1) * phi_a * state.b_phi, 0.0};
}

// Eliminating b_r from f1 = 0 leaves b_phi = 0 or
//   delta g (1 + (k_beta+1) u)^2 = eps^2 (1 + k_alpha u) (1 + u)^2,  u = b_phi^2.
std::vector<double> equilibrium_cubic(const ModelParams& p) {
    const double e2 = p.eps * p.eps;
    const double dg = p.delta * p.g;
    const double kb1 = p.k_beta + 1.0;
    const double ka = p.k_alpha;
    return {e2 - dg, e2 * (2.0 + ka) - 2.0 * dg * kb1, e2 * (1.0 + 2.0 * ka) - dg * kb1 * kb1,
            e2 * ka};
}

std::vector<Equilibrium> find_equilibria(const ModelParams& params) {
    params.validate();
    std::vector<Equilibrium> out;
    out.push_back({{0.0, 0.0}, 0.0});
    // eps = 0 forces b_phi = 0 through the second drift component, then b_r = 0.
    if (params.eps == 0.0) return out;

    const auto c = equilibrium_cubic(params);
    std::vector<double> us;
    for (double u : real_cubic_roots(c[0], c[1], c[2], c[3])) {
        if (!(u > 0.0) || !std::isfinite(u)) continue;
        if (!us.empty() && std::abs(u - us.back()) <= 1e-14 * u) continue;
        us.push_back(u);
    }
    for (double u : us) {
        for (double sign : {-1.0, 1.0}) {
            const double b_phi = sign * std::sqrt(u);
            const double b_r = -(params.eps / params.g) * b_phi * quenching(b_phi, params).beta;
            const FieldState s{b_r, b_phi};
            out.push_back({s, drift_nonlinear(s, params).cwiseAbs().maxCoeff()});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.state.b_phi < b.state.b_phi; });
    return out;
}

LinearSystem linearize(const ModelParams& params) {
    params.validate();
    LinearSystem sys;
    sys.drift << -params.eps, -params.delta, -params.g, -params.eps;
    sys.diffusion << 0.0, -std::sqrt(2.0 * params.sigma1), 0.0, 0.0;
    return sys;
}

Eigen::Vector2d singular_values(const Eigen::Matrix2d& m) {
    const Eigen::Matrix2d mtm = m.transpose() * m;
    const double half_tr = 0.5 * mtm.trace();
    const double det = mtm.determinant();
    const double rad = std::sqrt(std::max(0.0, half_tr * half_tr - det));
    const double big = half_tr + rad;
    // Smaller eigenvalue via det / big to avoid cancellation.
    const double small = big > 0.0 ? det / big : 0.0;
    return {std::sqrt(std::max(0.0, big)), std::sqrt(std::max(0.0, small))};
}

// ||R||_F of the strictly upper part of a Schur form. For 2x2 this is the
// single off-diagonal entry, and equals sqrt(sum s_j^2 - sum |mu_j|^2)
// without the cancellation of that difference.
double departure_from_normality(const Eigen::Matrix2d& m) {
    Eigen::ComplexSchur<Eigen::Matrix2d> schur(m, false);
    if (schur.info() != Eigen::Success) throw NonConvergenceError("Schur decomposition failed");
    return std::abs(schur.matrixT()(0, 1));
}

}  // namespace dynamo
