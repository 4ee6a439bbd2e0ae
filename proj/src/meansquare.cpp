#include "dynamo/meansquare.hpp"

#include "dynamo/errors.hpp"
#include "dynamo/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace dynamo {

std::string_view to_string(Criticality c) {
    switch (c) {
        case Criticality::subcritical: return "subcritical";
        case Criticality::critical: return "critical";
        case Criticality::supercritical: return "supercritical";
    }
    return "unknown";
}

StabilityMatrix build_stability_matrix(const ModelParams& params) {
    const LinearSystem sys = linearize(params);
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    StabilityMatrix m;
    m.s = Eigen::kroneckerProduct(id, sys.drift) + Eigen::kroneckerProduct(sys.drift, id) +
          Eigen::kroneckerProduct(sys.diffusion, sys.diffusion);
    return m;
}

Eigen::Matrix4d stability_matrix_explicit(const ModelParams& p) {
    const double e2 = -2.0 * p.eps;
    Eigen::Matrix4d s;
    s << e2, -p.delta, -p.delta, 2.0 * p.sigma1,
        -p.g, e2, 0.0, -p.delta,
        -p.g, 0.0, e2, -p.delta,
        0.0, -p.g, -p.g, e2;
    return s;
}

double stability_cubic_root(double g, double delta, double sigma1) {
    const auto roots = real_cubic_roots(-4.0 * g * g * sigma1, -4.0 * g * delta, 0.0, 1.0);
    return roots.back();
}

double spectral_abscissa(const StabilityMatrix& m) {
    const double eps = -0.5 * m.s(0, 0);
    const double delta = -m.s(0, 1);
    const double g = -m.s(1, 0);
    const double sigma1 = 0.5 * m.s(0, 3);
    // The cubic's complex pair, when present, has real part -t/2 < t.
    return std::max(-2.0 * eps, -2.0 * eps + stability_cubic_root(g, delta, sigma1));
}

double spectral_abscissa_numeric(const StabilityMatrix& m) {
    Eigen::EigenSolver<Eigen::Matrix4d> solver(m.s, false);
    if (solver.info() != Eigen::Success) throw NonConvergenceError("4x4 eigensolver failed");
    return solver.eigenvalues().real().maxCoeff();
}

Criticality criticality(const ModelParams& params) {
    const double e2 = params.eps * params.eps;
    const double gd = params.g * params.delta;
    const double diff = e2 - gd;
    if (std::abs(diff) <= 1e-14 * std::max(e2, gd)) return Criticality::critical;
    return diff > 0.0 ? Criticality::subcritical : Criticality::supercritical;
}

double mean_square_threshold(const ModelParams& p) {
    return 2.0 * p.eps * (p.eps * p.eps - p.g * p.delta) / (p.g * p.g);
}

Eigen::Matrix2d stationary_covariance(const ModelParams& params) {
    params.validate();
    if (criticality(params) != Criticality::subcritical)
        throw DomainError("stationary covariance needs a stable drift (eps > sqrt(g delta))");
    const Eigen::Matrix2d l = linearize(params).drift;
    const double q2 = 2.0 * params.sigma1;
    // L M + M L^T + Q Q^T = 0 for symmetric M = [[m11, m12], [m12, m22]].
    Eigen::Matrix3d a;
    a << 2.0 * l(0, 0), 2.0 * l(0, 1), 0.0,
        l(1, 0), l(0, 0) + l(1, 1), l(0, 1),
        0.0, 2.0 * l(1, 0), 2.0 * l(1, 1);
    const Eigen::Vector3d rhs(-q2, 0.0, 0.0);
    const Eigen::Vector3d m = a.fullPivLu().solve(rhs);
    Eigen::Matrix2d cov;
    cov << m(0), m(1), m(1), m(2);
    return cov;
}

double ryashko_trace(const ModelParams& params) {
    Eigen::Matrix2d s;
    s << 0.0, 1.0, 0.0, 0.0;
    return (s * stationary_covariance(params) * s.transpose()).trace();
}

MsReport ms_report(const ModelParams& params) {
    params.validate();
    MsReport r;
    r.abscissa = spectral_abscissa(build_stability_matrix(params));
    r.ms_stable = r.abscissa < 0.0;
    r.criticality = criticality(params);
    if (r.criticality == Criticality::subcritical) {
        r.threshold_sigma = mean_square_threshold(params);
        r.ryashko_trace = ryashko_trace(params);
    }
    return r;
}

}  // namespace dynamo
