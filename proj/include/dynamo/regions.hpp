#pragma once

#include "dynamo/lyapunov.hpp"
#include "dynamo/meansquare.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dynamo {

/// Uniform grid min, min + h, ..., max with n >= 2 points.
struct GridAxis {
    double min = 0.0;
    double max = 1.0;
    std::size_t n = 2;

    double at(std::size_t i) const;
};

struct ScanSpec {
    GridAxis eps{0.005, 0.25, 256};
    GridAxis sigma1{0.0, 0.05, 256};
    double g = 0.99;
    double delta = 0.01;
    double k_alpha = 1.0;
    double k_beta = 1.0;
    LyapunovMethod method = LyapunovMethod::hypergeometric;
    unsigned workers = 1;

    /// Throws ValidationError unless eps.min > 0, sigma1.min >= 0, n >= 2
    /// on both axes, min <= max, and the fixed parameters are valid.
    void validate() const;
    ModelParams params_at(double eps, double sigma1) const;
};

enum class LambdaSign { negative, boundary, positive };

std::string_view to_string(LambdaSign s);

/// Sign with |lambda| <= 1e-12 classified as boundary.
LambdaSign classify_lambda(double lambda);

/// Stability in probability of the nonlinear zero equilibrium implied by
/// the sign of the linearised top exponent.
std::string_view stability_in_probability(LambdaSign s);

struct RegionRecord {
    double eps = 0.0;
    double sigma1 = 0.0;
    double lambda = 0.0;
    LambdaSign lambda_sign = LambdaSign::boundary;
    double ms_abscissa = 0.0;
    bool ms_stable = false;
    Criticality criticality = Criticality::critical;
    double dep_f = 0.0;
    std::string error;  // non-empty when an evaluator failed at this point

    bool ok() const { return error.empty(); }
};

/// Top exponent used by the scanner: the requested method, falling back to
/// quadrature if a series method exceeds its term cap.
double scan_lambda(const ModelParams& params, LyapunovMethod method);

/// Evaluates every grid point, eps outer and sigma1 inner.
std::vector<RegionRecord> scan(const ScanSpec& spec);

enum class BoundaryKind { lyapunov, meansquare, criticality };

std::string_view to_string(BoundaryKind k);
BoundaryKind parse_boundary_kind(std::string_view name);

struct BoundaryPoint {
    double eps = 0.0;
    double sigma1 = 0.0;
    BoundaryKind kind = BoundaryKind::lyapunov;
    double residual = 0.0;  // |target| at the refined point
};

/// Sign changes of the target along sigma1 in every eps column, refined by
/// bisection to 1e-10 in sigma1. The criticality target does not depend on
/// sigma1, so it is located along eps instead and emitted once per sigma1
/// grid value.
std::vector<BoundaryPoint> trace_boundary(const ScanSpec& spec, BoundaryKind which);

}  // namespace dynamo
