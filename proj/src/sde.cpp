#include "dynamo/sde.hpp"

#include "dynamo/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace dynamo {

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("SimConfig: dt must be > 0");
    if (!(t_final >= 100.0 * dt) || !std::isfinite(t_final))
        throw ValidationError("SimConfig: t_final must be >= 100 dt");
    if (n_paths < 1) throw ValidationError("SimConfig: n_paths must be >= 1");
    if (renorm_every < 1) throw ValidationError("SimConfig: renorm_every must be >= 1");
    if (workers < 1) throw ValidationError("SimConfig: workers must be >= 1");
    if (!std::isfinite(x0.b_r) || !std::isfinite(x0.b_phi))
        throw ValidationError("SimConfig: x0 must be finite");
}

std::size_t SimConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

Eigen::Vector2d em_step_linear(const Eigen::Vector2d& state, const LinearSystem& sys, double dt,
                               double dw) {
    return state + sys.drift * state * dt + sys.diffusion * state * dw;
}

Eigen::Vector2d milstein_correction(const Eigen::Vector2d& state, const LinearSystem& sys,
                                    double dt, double dw) {
    return 0.5 * sys.diffusion * (sys.diffusion * state) * (dw * dw - dt);
}

NonlinearStep em_step_nonlinear(const FieldState& state, const ModelParams& params, double dt,
                                double dw) {
    const Eigen::Vector2d next =
        state.vec() + drift_nonlinear(state, params) * dt + diffusion_nonlinear(state, params) * dw;
    const bool diverged = !(next.cwiseAbs().maxCoeff() <= kDivergenceThreshold);
    return {FieldState::from(next), diverged};
}

namespace {

void require_nonzero_start(const SimConfig& cfg) {
    if (cfg.x0.b_r == 0.0 && cfg.x0.b_phi == 0.0)
        throw ValidationError("SimConfig: x0 must be nonzero");
}

// Integrates one path of the linear system, keeping the state at unit
// scale. `observe(step, v, log_scale)` is called after every step with the
// current direction-carrying state v and the accumulated log-norm offset,
// so |X| = exp(log_scale) |v|.
template <class Observer>
double integrate_path(const LinearSystem& sys, const SimConfig& cfg, const RngSpec& rng,
                      Observer&& observe) {
    NormalStream normals(rng);
    const double l00 = sys.drift(0, 0), l01 = sys.drift(0, 1);
    const double l10 = sys.drift(1, 0), l11 = sys.drift(1, 1);
    const double s00 = sys.diffusion(0, 0), s01 = sys.diffusion(0, 1);
    const double s10 = sys.diffusion(1, 0), s11 = sys.diffusion(1, 1);
    const double sqrt_dt = std::sqrt(cfg.dt);
    const std::size_t steps = cfg.steps();

    double x = cfg.x0.b_r;
    double y = cfg.x0.b_phi;
    const double n0 = std::hypot(x, y);
    x /= n0;
    y /= n0;
    double log_scale = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double dw = sqrt_dt * normals.next();
        const double nx = x + (l00 * x + l01 * y) * cfg.dt + (s00 * x + s01 * y) * dw;
        const double ny = y + (l10 * x + l11 * y) * cfg.dt + (s10 * x + s11 * y) * dw;
        x = nx;
        y = ny;
        if (k % cfg.renorm_every == 0 || k == steps) {
            const double r = std::hypot(x, y);
            if (!(r > 0.0) || !std::isfinite(r))
                throw NonConvergenceError("simulation collapsed to zero or overflowed");
            log_scale += std::log(r);
            x /= r;
            y /= r;
        }
        observe(k, x, y, log_scale);
    }
    return log_scale;
}

McEstimate mean_and_error(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    const double se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, se, xs.size()};
}

}  // namespace

std::vector<double> mc_lyapunov_paths(const LinearSystem& sys, const SimConfig& cfg,
                                      const RngSpec& rng) {
    cfg.validate();
    require_nonzero_start(cfg);
    const double horizon = static_cast<double>(cfg.steps()) * cfg.dt;
    std::vector<double> rates(cfg.n_paths);
    detail::parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        rates[i] = integrate_path(sys, cfg, substream(rng, i), [](auto...) {}) / horizon;
    });
    return rates;
}

McEstimate mc_lyapunov(const LinearSystem& sys, const SimConfig& cfg, const RngSpec& rng) {
    if (cfg.n_paths > 1) return mean_and_error(mc_lyapunov_paths(sys, cfg, rng));

    // Single path: standard error from ten batch means along the path.
    cfg.validate();
    require_nonzero_start(cfg);
    constexpr std::size_t kBatches = 10;
    const std::size_t steps = cfg.steps();
    const std::size_t batch = std::max<std::size_t>(1, steps / kBatches);
    std::vector<double> marks;
    const double total = integrate_path(sys, cfg, substream(rng, 0),
                                        [&](std::size_t k, double x, double y, double log_scale) {
                                            if (k % batch == 0 && marks.size() < kBatches)
                                                marks.push_back(log_scale + std::log(std::hypot(x, y)));
                                        });
    std::vector<double> batch_rates;
    double prev = 0.0;
    for (double m : marks) {
        batch_rates.push_back((m - prev) / (static_cast<double>(batch) * cfg.dt));
        prev = m;
    }
    McEstimate est = mean_and_error(batch_rates);
    est.value = total / (static_cast<double>(steps) * cfg.dt);
    est.n_samples = 1;
    return est;
}

McEstimate mc_second_moment(const LinearSystem& sys, const SimConfig& cfg, const RngSpec& rng) {
    cfg.validate();
    require_nonzero_start(cfg);
    constexpr std::size_t kRecords = 400;
    const std::size_t steps = cfg.steps();
    const std::size_t stride = std::max<std::size_t>(1, steps / kRecords);
    const std::size_t n_records = steps / stride;

    // log |X(t_j)|^2 per path, relative to |x0|^2.
    std::vector<std::vector<double>> log_sq(cfg.n_paths, std::vector<double>(n_records));
    detail::parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        auto& row = log_sq[i];
        integrate_path(sys, cfg, substream(rng, i),
                       [&](std::size_t k, double x, double y, double log_scale) {
                           if (k % stride == 0 && k / stride <= n_records)
                               row[k / stride - 1] = 2.0 * (log_scale + std::log(std::hypot(x, y)));
                       });
    });

    // log of the cross-path mean via log-sum-exp, then an OLS slope over the
    // second half of the horizon.
    std::vector<double> ts, ys;
    const double log_n = std::log(static_cast<double>(cfg.n_paths));
    for (std::size_t j = n_records / 2; j < n_records; ++j) {
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& row : log_sq) hi = std::max(hi, row[j]);
        double acc = 0.0;
        for (const auto& row : log_sq) acc += std::exp(row[j] - hi);
        ts.push_back(static_cast<double>((j + 1) * stride) * cfg.dt);
        ys.push_back(hi + std::log(acc) - log_n);
    }
    const double m = static_cast<double>(ts.size());
    const double t_mean = std::accumulate(ts.begin(), ts.end(), 0.0) / m;
    const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        sxx += (ts[j] - t_mean) * (ts[j] - t_mean);
        sxy += (ts[j] - t_mean) * (ys[j] - y_mean);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const double r = ys[j] - y_mean - slope * (ts[j] - t_mean);
        rss += r * r;
    }
    const double se = ts.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
    return {slope, se, cfg.n_paths};
}

double AngularHistogram::integral() const {
    return std::accumulate(density.begin(), density.end(), 0.0) * bin_width;
}

AngularHistogram angular_density(const LinearSystem& sys, const SimConfig& cfg,
                                 const RngSpec& rng, std::size_t bins, double burn_in_fraction) {
    cfg.validate();
    require_nonzero_start(cfg);
    if (bins < 16) throw ValidationError("angular_density: bins must be >= 16");
    if (sys.diffusion.isZero(0.0))
        throw DomainError("angular_density: requires nonzero noise (sigma1 > 0)");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw ValidationError("angular_density: burn-in fraction must lie in [0, 1)");

    constexpr double pi = std::numbers::pi;
    const std::size_t burn_in =
        static_cast<std::size_t>(burn_in_fraction * static_cast<double>(cfg.steps()));
    const double width = pi / static_cast<double>(bins);

    std::vector<std::vector<std::size_t>> counts(cfg.n_paths, std::vector<std::size_t>(bins, 0));
    detail::parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        auto& c = counts[i];
        integrate_path(sys, cfg, substream(rng, i), [&](std::size_t k, double x, double y, double) {
            if (k <= burn_in) return;
            double angle = std::atan2(y, x);
            if (angle >= 0.5 * pi) angle -= pi;
            if (angle < -0.5 * pi) angle += pi;
            auto bin = static_cast<std::size_t>((angle + 0.5 * pi) / width);
            ++c[std::min(bin, bins - 1)];
        });
    });

    std::vector<std::size_t> total(bins, 0);
    for (const auto& c : counts)
        for (std::size_t b = 0; b < bins; ++b) total[b] += c[b];
    const std::size_t samples = std::accumulate(total.begin(), total.end(), std::size_t{0});

    AngularHistogram h;
    h.lower = -0.5 * pi;
    h.bin_width = width;
    h.samples = samples;
    h.density.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
        h.density[b] = static_cast<double>(total[b]) / (static_cast<double>(samples) * width);
    return h;
}

}  // namespace dynamo
