#pragma once

#include "dynamo/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>

namespace dynamo {

/// Generator of the second-moment dynamics, I (x) L + L (x) I + S (x) S.
struct StabilityMatrix {
    Eigen::Matrix4d s;
};

enum class Criticality { subcritical, critical, supercritical };

std::string_view to_string(Criticality c);

struct MsReport {
    double abscissa = 0.0;
    bool ms_stable = false;
    Criticality criticality = Criticality::critical;
    std::optional<double> threshold_sigma;  // present iff subcritical
    std::optional<double> ryashko_trace;    // present iff subcritical
};

StabilityMatrix build_stability_matrix(const ModelParams& params);

/// The explicit 4x4 layout, written out entry by entry.
Eigen::Matrix4d stability_matrix_explicit(const ModelParams& params);

/// Largest real root of t^3 - 4 g delta t - 4 g^2 sigma1 = 0. Restricted to
/// the subspace x2 = x3, the stability matrix has eigenvalues -2 eps + t
/// for the roots t of this cubic; the antisymmetric direction gives -2 eps.
double stability_cubic_root(double g, double delta, double sigma1);

/// Max real part of the spectrum, via the cubic. Reads (g, delta, eps,
/// sigma1) back from the matrix entries.
double spectral_abscissa(const StabilityMatrix& m);

/// Max real part of the spectrum from a generic dense eigensolver.
double spectral_abscissa_numeric(const StabilityMatrix& m);

/// Classification by the sign of eps^2 - g delta; a relative band of
/// 1e-14 around zero counts as critical.
Criticality criticality(const ModelParams& params);

/// 2 eps (eps^2 - g delta) / g^2.
double mean_square_threshold(const ModelParams& params);

/// Stationary covariance of the additive-noise system
/// dB = L B dt + (sqrt(2 sigma1), 0)^T dW. Throws DomainError unless the
/// drift is subcritical.
Eigen::Matrix2d stationary_covariance(const ModelParams& params);

/// tr(S M S^T) with S = [[0,1],[0,0]]; exponential mean-square stability
/// holds iff this is below 1. Throws DomainError unless subcritical.
double ryashko_trace(const ModelParams& params);

MsReport ms_report(const ModelParams& params);

}  // namespace dynamo
