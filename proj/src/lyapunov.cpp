#include "dynamo/lyapunov.hpp"

#include "dynamo/errors.hpp"
#include "dynamo/sde.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace dynamo {

std::string_view to_string(LyapunovMethod m) {
    switch (m) {
        case LyapunovMethod::quadrature: return "quadrature";
        case LyapunovMethod::series: return "series";
        case LyapunovMethod::hypergeometric: return "hypergeometric";
        case LyapunovMethod::montecarlo: return "montecarlo";
    }
    return "unknown";
}

LyapunovMethod parse_lyapunov_method(std::string_view name) {
    for (auto m : {LyapunovMethod::quadrature, LyapunovMethod::series,
                   LyapunovMethod::hypergeometric, LyapunovMethod::montecarlo}) {
        if (name == to_string(m)) return m;
    }
    throw ValidationError("unknown Lyapunov method '" + std::string(name) + "'");
}

namespace {

void require_noise(const ModelParams& p, const char* who) {
    p.validate();
    if (p.sigma1 == 0.0)
        throw DomainError(std::string(who) +
                          ": sigma1 = 0, use the deterministic abscissa -eps + sqrt(g delta)");
}

// (3 sigma1 g^2 / 2)^{1/3}
double noise_prefactor(const ModelParams& p) { return std::cbrt(1.5 * p.sigma1 * p.g * p.g); }

// b / a^{1/3} with a = g / (12 sigma1), b = delta / sigma1.
double series_ratio(const ModelParams& p) {
    return p.delta * std::cbrt(12.0 / (p.g * p.sigma1 * p.sigma1));
}

// sum_n c^n Gamma(n/3 + shift) / n!, with the three residue classes mod 3
// advanced independently through Gamma(x + 1) = x Gamma(x).
SeriesSum gamma_series(double c, double shift, const SeriesControl& ctl) {
    ctl.validate();
    std::array<double, 3> t{gamma_fn(shift), c * gamma_fn(shift + 1.0 / 3.0),
                            0.5 * c * c * gamma_fn(shift + 2.0 / 3.0)};
    const double c3 = c * c * c;
    double sum = 0.0;
    int small_run = 0;
    for (std::size_t n = 0; n < ctl.max_terms; ++n) {
        double& term = t[n % 3];
        sum += term;
        if (!std::isfinite(sum)) throw NonConvergenceError("gamma series overflow");
        if (term != 0.0 && std::abs(term) >= ctl.rel_tol * std::abs(sum)) {
            small_run = 0;
        } else if (++small_run == 3 && n >= 2) {
            const double next = t[(n + 1) % 3];
            return {sum, n + 1, std::abs(next)};
        }
        const double k = static_cast<double>(n);
        term *= c3 * (k / 3.0 + shift) / ((k + 1.0) * (k + 2.0) * (k + 3.0));
    }
    throw NonConvergenceError("gamma series: term cap reached (series ratio " +
                              std::to_string(c) + ")");
}

// One 7/15-point Gauss-Kronrod panel with the QUADPACK error heuristic.
struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using Gauss = boost::math::quadrature::gauss<double, 7>;
    static const auto& xk = Kronrod::abscissa();
    static const auto& wk = Kronrod::weights();
    static const auto& wg = Gauss::weights();
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    fv[0] = f(centre);
    for (std::size_t i = 1; i < 8; ++i) {
        fv[2 * i - 1] = f(centre - half * xk[i]);
        fv[2 * i] = f(centre + half * xk[i]);
    }
    double k = wk[0] * fv[0];
    double g = wg[0] * fv[0];
    double abs_k = wk[0] * std::abs(fv[0]);
    for (std::size_t i = 1; i < 8; ++i) {
        const double pair = fv[2 * i - 1] + fv[2 * i];
        k += wk[i] * pair;
        abs_k += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
        if (i % 2 == 0) g += wg[i / 2] * pair;
    }
    const double mean = 0.5 * k;
    double asc = wk[0] * std::abs(fv[0] - mean);
    for (std::size_t i = 1; i < 8; ++i)
        asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
    asc *= half;
    abs_k *= half;
    double err = std::abs((k - g) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * abs_k);
    return {a, b, k * half, err};
}

// Globally adaptive: the panel with the largest error is bisected until the
// summed error is below rel_tol * |integral| or the panel budget runs out.
template <class F>
std::pair<double, double> adaptive_integral(F&& f, const std::vector<double>& cuts,
                                            double rel_tol, std::size_t max_panels) {
    std::priority_queue<Panel> heap;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Panel p = gk15(f, cuts[i], cuts[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    while (total_err > rel_tol * std::abs(total) && heap.size() < max_panels) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        const Panel left = gk15(f, worst.a, mid);
        const Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    total = 0.0;
    total_err = 0.0;
    for (; !heap.empty(); heap.pop()) {
        total += heap.top().value;
        total_err += heap.top().error;
    }
    return {total, total_err};
}

}  // namespace

NormalizedSystem normalize_stratonovich(const ModelParams& params) {
    require_noise(params, "normalize_stratonovich");
    const double two_s = 2.0 * params.sigma1;
    NormalizedSystem ns;
    ns.a0 << -params.eps / two_s, -params.g / two_s, -params.delta / two_s, -params.eps / two_s;
    ns.a1 << 0.0, 0.0, 1.0, 0.0;
    ns.time_scale = two_s;
    return ns;
}

double deterministic_abscissa(const ModelParams& params) {
    params.validate();
    return -params.eps + std::sqrt(params.g * params.delta);
}

double hypergeometric_argument(const ModelParams& p) {
    return 4.0 * p.delta * p.delta * p.delta / (9.0 * p.g * p.sigma1 * p.sigma1);
}

LyapunovResult lyapunov_quadrature(const ModelParams& params) {
    require_noise(params, "lyapunov_quadrature");
    const double alpha = params.g / (12.0 * params.sigma1);
    const double beta = params.delta / params.sigma1;

    // The exponential is common to numerator and denominator, so both are
    // scaled by exp(-peak) and truncated at the same point.
    const double v_peak = beta > 0.0 ? std::sqrt(beta / (3.0 * alpha)) : 0.0;
    // phase(v) - peak, factored so that no large terms cancel.
    auto scaled_phase = [&](double v) {
        const double d = v - v_peak;
        return -alpha * d * d * (v + 2.0 * v_peak);
    };
    const double log_floor = std::log(1e-16) - 4.0;
    double v_max = std::max(v_peak, std::cbrt(1.0 / alpha));
    while (scaled_phase(v_max) > log_floor) v_max *= 2.0;
    if (!std::isfinite(v_max)) throw NonConvergenceError("lyapunov_quadrature: no tail bound");

    // v = w^2 removes the 1/sqrt(v) endpoint singularity:
    //   N = int 2 w^2 e^{phase(w^2)} dw,  D = int 2 e^{phase(w^2)} dw.
    const double w_max = std::sqrt(v_max);
    std::vector<double> cuts{0.0, w_max};
    if (v_peak > 0.0) {
        const double w_peak = std::sqrt(v_peak);
        const double width = 1.0 / (2.0 * w_peak * std::sqrt(6.0 * alpha * v_peak));
        for (double k : {-15.0, -8.0, -3.0, 0.0, 3.0, 8.0, 15.0}) {
            const double w = w_peak + k * width;
            if (w > 0.0 && w < w_max) cuts.push_back(w);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    std::size_t evaluations = 0;
    auto integrate = [&](auto&& weight) {
        return adaptive_integral(
            [&](double w) {
                ++evaluations;
                return 2.0 * weight(w) * std::exp(scaled_phase(w * w));
            },
            cuts, 1e-12, 4000);
    };
    const auto [num, num_err] = integrate([](double w) { return w * w; });
    const auto [den, den_err] = integrate([](double) { return 1.0; });
    if (!(num > 0.0 && den > 0.0))
        throw NonConvergenceError("lyapunov_quadrature: degenerate integrals");

    const double growth = 0.5 * params.g * num / den;
    const double rel_err = num_err / num + den_err / den;
    if (!(rel_err < 1e-9))
        throw NonConvergenceError("lyapunov_quadrature: tolerance not reached (rel err " +
                                  std::to_string(rel_err) + ")");
    LyapunovResult r;
    r.value = -params.eps + growth;
    r.method = LyapunovMethod::quadrature;
    r.error_estimate = growth * rel_err;
    r.meta.terms = evaluations;
    return r;
}

LyapunovResult lyapunov_series(const ModelParams& params, const SeriesControl& ctl) {
    require_noise(params, "lyapunov_series");
    const double c = series_ratio(params);
    const SeriesSum num = gamma_series(c, 0.5, ctl);
    const SeriesSum den = gamma_series(c, 1.0 / 6.0, ctl);
    const double growth = noise_prefactor(params) * num.value / den.value;
    LyapunovResult r;
    r.value = -params.eps + growth;
    r.method = LyapunovMethod::series;
    r.error_estimate = growth * (num.last_term / num.value + den.last_term / den.value);
    r.meta.terms = num.terms + den.terms;
    return r;
}

LyapunovResult lyapunov_hypergeometric(const ModelParams& params, const SeriesControl& ctl) {
    require_noise(params, "lyapunov_hypergeometric");
    const double c = series_ratio(params);
    const double x = hypergeometric_argument(params);
    constexpr double third = 1.0 / 3.0;
    constexpr double sixth = 1.0 / 6.0;
    const double g_half = std::sqrt(std::numbers::pi);
    const double g_sixth = gamma_fn(sixth);
    const double g_five_sixth = gamma_fn(5.0 * sixth);

    std::size_t terms = 0;
    double tail = 0.0;
    auto f = [&](double a, double b1, double b2) {
        const SeriesSum s = hyp1f2_sum(a, b1, b2, x, ctl);
        terms += s.terms;
        tail += s.last_term / std::abs(s.value);
        return s.value;
    };
    // Residue classes n = 3m, 3m+1, 3m+2 of the gamma series.
    const double g1 = g_half * f(0.5, third, 2 * third) +
                      c * g_five_sixth * f(5 * sixth, 2 * third, 4 * third) +
                      c * c / 12.0 * g_sixth * f(7 * sixth, 4 * third, 5 * third);
    const double g2 = g_sixth * f(sixth, third, 2 * third) +
                      c * g_half * f(0.5, 2 * third, 4 * third) +
                      c * c / 2.0 * g_five_sixth * f(5 * sixth, 4 * third, 5 * third);
    const double growth = noise_prefactor(params) * g1 / g2;
    if (!std::isfinite(growth)) throw NonConvergenceError("lyapunov_hypergeometric: overflow");

    LyapunovResult r;
    r.value = -params.eps + growth;
    r.method = LyapunovMethod::hypergeometric;
    r.error_estimate = growth * tail;
    r.meta.terms = terms;
    return r;
}

LyapunovResult lyapunov(const ModelParams& params, LyapunovMethod method) {
    params.validate();
    if (params.sigma1 == 0.0 && method != LyapunovMethod::montecarlo) {
        LyapunovResult r;
        r.value = deterministic_abscissa(params);
        r.method = method;
        r.meta.deterministic = true;
        return r;
    }
    switch (method) {
        case LyapunovMethod::quadrature: return lyapunov_quadrature(params);
        case LyapunovMethod::series: return lyapunov_series(params);
        case LyapunovMethod::hypergeometric: return lyapunov_hypergeometric(params);
        case LyapunovMethod::montecarlo: {
            const McEstimate mc = mc_lyapunov(linearize(params), SimConfig{}, RngSpec{});
            LyapunovResult r;
            r.value = mc.value;
            r.method = method;
            r.error_estimate = mc.std_error;
            r.meta.samples = mc.n_samples;
            return r;
        }
    }
    throw ValidationError("unknown Lyapunov method");
}

}  // namespace dynamo
