#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dynamo {

/// Dimensionless parameters of the reduced alpha-Omega dynamo.
///
/// g is the shear, delta the alpha-effect strength, eps the turbulent
/// diffusivity, sigma1 the intensity of the alpha fluctuations, and
/// k_alpha / k_beta the quenching constants.
struct ModelParams {
    double g = 0.99;
    double delta = 0.01;
    double eps = 0.1;
    double sigma1 = 0.0;
    double k_alpha = 1.0;
    double k_beta = 1.0;

    /// Throws ValidationError unless g, k_alpha, k_beta > 0 and
    /// delta, eps, sigma1 >= 0 (all finite).
    void validate() const;
};

struct FieldState {
    double b_r = 0.0;
    double b_phi = 0.0;

    Eigen::Vector2d vec() const { return {b_r, b_phi}; }
    static FieldState from(const Eigen::Vector2d& v) { return {v(0), v(1)}; }
};

/// Linearised system dB = drift B dt + diffusion B dW.
struct LinearSystem {
    Eigen::Matrix2d drift;
    Eigen::Matrix2d diffusion;
};

struct Equilibrium {
    FieldState state;
    double residual = 0.0;  // max-norm of the drift at `state`
};

struct Quenching {
    double alpha = 1.0;
    double beta = 1.0;
};

Quenching quenching(double b_phi, const ModelParams& params);

/// Drift f1 of the nonlinear SDE.
Eigen::Vector2d drift_nonlinear(const FieldState& state, const ModelParams& params);

/// Diffusion f2 of the nonlinear SDE; only the radial component is nonzero.
Eigen::Vector2d diffusion_nonlinear(const FieldState& state, const ModelParams& params);

/// Coefficients (ascending powers) of the cubic in u = b_phi^2 whose
/// positive roots give the nonzero equilibria of the noise-free system.
std::vector<double> equilibrium_cubic(const ModelParams& params);

/// All equilibria of the sigma1 = 0 system, sorted by b_phi ascending.
/// For sigma1 > 0 only (0, 0) is an equilibrium of the full SDE; the
/// nonzero states returned here belong to the noise-free drift.
std::vector<Equilibrium> find_equilibria(const ModelParams& params);

/// Linearisation about the zero equilibrium.
LinearSystem linearize(const ModelParams& params);

/// Henrici departure from normality in the Frobenius norm.
double departure_from_normality(const Eigen::Matrix2d& m);

/// Singular values of a 2x2 matrix from the eigenvalues of m^T m.
Eigen::Vector2d singular_values(const Eigen::Matrix2d& m);

}  // namespace dynamo
