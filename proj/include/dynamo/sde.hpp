#pragma once

#include "dynamo/model.hpp"
#include "dynamo/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace dynamo {

struct SimConfig {
    double dt = 1e-3;
    double t_final = 2000.0;
    std::size_t n_paths = 32;
    std::size_t renorm_every = 10;
    FieldState x0{1.0, 0.0};
    unsigned workers = 1;  // paths are spread over this many threads

    /// Throws ValidationError on dt <= 0, t_final < 100 dt, n_paths < 1,
    /// renorm_every < 1 or workers < 1.
    void validate() const;
    std::size_t steps() const;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

struct NonlinearStep {
    FieldState state;
    bool diverged = false;  // a component exceeded kDivergenceThreshold
};

inline constexpr double kDivergenceThreshold = 1e150;

/// Euler-Maruyama step of the linear system. The Milstein correction
/// 0.5 Sigma Sigma x (dw^2 - dt) vanishes because Sigma^2 = 0.
Eigen::Vector2d em_step_linear(const Eigen::Vector2d& state, const LinearSystem& sys, double dt,
                               double dw);

/// 0.5 Sigma Sigma x (dw^2 - dt); identically zero for nilpotent Sigma.
Eigen::Vector2d milstein_correction(const Eigen::Vector2d& state, const LinearSystem& sys,
                                    double dt, double dw);

NonlinearStep em_step_nonlinear(const FieldState& state, const ModelParams& params, double dt,
                                double dw);

/// Pathwise top-exponent estimate with periodic renormalisation. Path i
/// draws from substream(rng, i); the result does not depend on workers.
McEstimate mc_lyapunov(const LinearSystem& sys, const SimConfig& cfg, const RngSpec& rng);

/// Per-path value of the Lyapunov estimator, in path order.
std::vector<double> mc_lyapunov_paths(const LinearSystem& sys, const SimConfig& cfg,
                                      const RngSpec& rng);

/// Growth rate of E|B(t)|^2: least-squares slope of log of the cross-path
/// mean squared norm over the second half of the horizon.
McEstimate mc_second_moment(const LinearSystem& sys, const SimConfig& cfg, const RngSpec& rng);

struct AngularHistogram {
    double lower = 0.0;   // -pi/2
    double bin_width = 0.0;
    std::vector<double> density;  // integrates to 1 over [-pi/2, pi/2)
    std::size_t samples = 0;

    double integral() const;
};

/// Occupation density of the projective angle atan2(b_phi, b_r) reduced
/// to [-pi/2, pi/2), after discarding `burn_in_fraction` of each path.
AngularHistogram angular_density(const LinearSystem& sys, const SimConfig& cfg,
                                 const RngSpec& rng, std::size_t bins,
                                 double burn_in_fraction = 0.1);

}  // namespace dynamo
