#pragma once

#include "dynamo/model.hpp"
#include "dynamo/specfun.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace dynamo {

enum class LyapunovMethod { quadrature, series, hypergeometric, montecarlo };

std::string_view to_string(LyapunovMethod m);
/// Throws ValidationError on an unknown name.
LyapunovMethod parse_lyapunov_method(std::string_view name);

/// Time-changed, component-reversed Stratonovich form of the linearised
/// system. Exponents relate by lambda = time_scale * lambda_normalized.
struct NormalizedSystem {
    Eigen::Matrix2d a0;
    Eigen::Matrix2d a1;
    double time_scale = 0.0;
};

struct LyapunovMeta {
    std::size_t terms = 0;        // series terms or quadrature evaluations
    bool deterministic = false;   // sigma1 = 0 fallback to -eps + sqrt(g delta)
    std::size_t samples = 0;      // Monte Carlo paths
};

struct LyapunovResult {
    double value = 0.0;
    LyapunovMethod method = LyapunovMethod::hypergeometric;
    double error_estimate = 0.0;
    LyapunovMeta meta;
};

/// Throws DomainError when sigma1 = 0.
NormalizedSystem normalize_stratonovich(const ModelParams& params);

/// Top exponent of the noise-free linear drift, -eps + sqrt(g delta).
double deterministic_abscissa(const ModelParams& params);

/// -eps + (g/2) N/D with N, D the v^{1/2} and v^{-1/2} weighted integrals
/// of exp(-(g/12 sigma1) v^3 + (delta/sigma1) v) over (0, inf).
LyapunovResult lyapunov_quadrature(const ModelParams& params);

/// Gamma-series form with a = g / (12 sigma1), b = delta / sigma1.
LyapunovResult lyapunov_series(const ModelParams& params, const SeriesControl& ctl = {});

/// Closed form in gamma and 1F2 functions.
LyapunovResult lyapunov_hypergeometric(const ModelParams& params, const SeriesControl& ctl = {});

/// Argument of the 1F2 terms in the closed form, 4 delta^3 / (9 g sigma1^2).
double hypergeometric_argument(const ModelParams& params);

/// Dispatch. sigma1 = 0 returns the deterministic abscissa (meta.deterministic).
/// The Monte Carlo branch uses default simulation settings and seed 0.
LyapunovResult lyapunov(const ModelParams& params, LyapunovMethod method);

}  // namespace dynamo
