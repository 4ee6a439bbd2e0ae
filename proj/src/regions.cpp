#include "dynamo/regions.hpp"

#include "dynamo/errors.hpp"
#include "parallel.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace dynamo {

double GridAxis::at(std::size_t i) const {
    if (i + 1 == n) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void ScanSpec::validate() const {
    if (!(eps.min > 0.0)) throw ValidationError("scan: eps min must be > 0");
    if (!(sigma1.min >= 0.0)) throw ValidationError("scan: sigma1 min must be >= 0");
    for (const GridAxis* axis : {&eps, &sigma1}) {
        if (axis->n < 2) throw ValidationError("scan: each axis needs n >= 2");
        if (!(axis->min <= axis->max) || !std::isfinite(axis->max))
            throw ValidationError("scan: axis min must not exceed max");
    }
    if (workers < 1) throw ValidationError("scan: workers must be >= 1");
    params_at(eps.min, sigma1.min).validate();
}

ModelParams ScanSpec::params_at(double e, double s) const {
    return {g, delta, e, s, k_alpha, k_beta};
}

std::string_view to_string(LambdaSign s) {
    switch (s) {
        case LambdaSign::negative: return "negative";
        case LambdaSign::boundary: return "boundary";
        case LambdaSign::positive: return "positive";
    }
    return "unknown";
}

LambdaSign classify_lambda(double lambda) {
    if (std::abs(lambda) <= 1e-12) return LambdaSign::boundary;
    return lambda < 0.0 ? LambdaSign::negative : LambdaSign::positive;
}

std::string_view stability_in_probability(LambdaSign s) {
    switch (s) {
        case LambdaSign::negative: return "asymptotically stable in probability";
        case LambdaSign::positive: return "unstable in probability";
        case LambdaSign::boundary: return "undetermined";
    }
    return "undetermined";
}

std::string_view to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::lyapunov: return "lyapunov";
        case BoundaryKind::meansquare: return "meansquare";
        case BoundaryKind::criticality: return "criticality";
    }
    return "unknown";
}

BoundaryKind parse_boundary_kind(std::string_view name) {
    for (auto k : {BoundaryKind::lyapunov, BoundaryKind::meansquare, BoundaryKind::criticality})
        if (name == to_string(k)) return k;
    throw ValidationError("unknown boundary kind '" + std::string(name) + "'");
}

double scan_lambda(const ModelParams& params, LyapunovMethod method) {
    try {
        return lyapunov(params, method).value;
    } catch (const NonConvergenceError&) {
        if (method == LyapunovMethod::quadrature || method == LyapunovMethod::montecarlo) throw;
        return lyapunov_quadrature(params).value;
    }
}

std::vector<RegionRecord> scan(const ScanSpec& spec) {
    spec.validate();
    const std::size_t n_sigma = spec.sigma1.n;
    std::vector<RegionRecord> out(spec.eps.n * n_sigma);
    detail::parallel_for(out.size(), spec.workers, [&](std::size_t idx) {
        RegionRecord& rec = out[idx];
        rec.eps = spec.eps.at(idx / n_sigma);
        rec.sigma1 = spec.sigma1.at(idx % n_sigma);
        const ModelParams p = spec.params_at(rec.eps, rec.sigma1);
        try {
            rec.dep_f = departure_from_normality(linearize(p).drift);
            rec.criticality = criticality(p);
            const MsReport ms = ms_report(p);
            rec.ms_abscissa = ms.abscissa;
            rec.ms_stable = ms.ms_stable;
            rec.lambda = scan_lambda(p, spec.method);
            rec.lambda_sign = classify_lambda(rec.lambda);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    return out;
}

namespace {

using Target = std::function<double(double eps, double sigma1)>;

Target make_target(const ScanSpec& spec, BoundaryKind which) {
    switch (which) {
        case BoundaryKind::lyapunov:
            return [spec](double e, double s) { return scan_lambda(spec.params_at(e, s), spec.method); };
        case BoundaryKind::meansquare:
            return [spec](double e, double s) {
                return spectral_abscissa(build_stability_matrix(spec.params_at(e, s)));
            };
        case BoundaryKind::criticality:
            return [spec](double e, double) { return e * e - spec.g * spec.delta; };
    }
    throw ValidationError("unknown boundary kind");
}

// Bisection on [lo, hi] with f(lo), f(hi) of opposite signs.
std::pair<double, double> bisect(const std::function<double(double)>& f, double lo, double hi,
                                 double f_lo, double tol) {
    double mid = 0.5 * (lo + hi);
    double f_mid = f(mid);
    for (int it = 0; it < 200; ++it) {
        if (f_mid == 0.0) break;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        const double next = 0.5 * (lo + hi);
        if (next == mid || (hi - lo <= tol && std::abs(f_mid) < 1e-10)) break;
        mid = next;
        f_mid = f(mid);
    }
    return {mid, std::abs(f_mid)};
}

}  // namespace

std::vector<BoundaryPoint> trace_boundary(const ScanSpec& spec, BoundaryKind which) {
    spec.validate();
    const Target target = make_target(spec, which);
    std::vector<BoundaryPoint> out;

    if (which == BoundaryKind::criticality) {
        std::vector<double> eps_roots;
        for (std::size_t i = 0; i < spec.eps.n; ++i) {
            const double e0 = spec.eps.at(i);
            const double f0 = target(e0, 0.0);
            if (f0 == 0.0) {
                eps_roots.push_back(e0);
                continue;
            }
            if (i + 1 == spec.eps.n) break;
            const double e1 = spec.eps.at(i + 1);
            const double f1 = target(e1, 0.0);
            if (f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
                auto f = [&](double e) { return target(e, 0.0); };
                eps_roots.push_back(bisect(f, e0, e1, f0, 0.0).first);
            }
        }
        for (double e : eps_roots)
            for (std::size_t j = 0; j < spec.sigma1.n; ++j)
                out.push_back({e, spec.sigma1.at(j), which, std::abs(target(e, 0.0))});
        return out;
    }

    std::vector<std::vector<BoundaryPoint>> columns(spec.eps.n);
    detail::parallel_for(spec.eps.n, spec.workers, [&](std::size_t i) {
        const double e = spec.eps.at(i);
        auto f = [&](double s) { return target(e, s); };
        std::vector<double> values(spec.sigma1.n);
        for (std::size_t j = 0; j < spec.sigma1.n; ++j) values[j] = f(spec.sigma1.at(j));
        for (std::size_t j = 0; j < spec.sigma1.n; ++j) {
            if (values[j] == 0.0) {
                columns[i].push_back({e, spec.sigma1.at(j), which, 0.0});
                continue;
            }
            if (j + 1 < spec.sigma1.n && values[j + 1] != 0.0 &&
                (values[j] < 0.0) != (values[j + 1] < 0.0)) {
                const auto [s, res] =
                    bisect(f, spec.sigma1.at(j), spec.sigma1.at(j + 1), values[j], 1e-10);
                columns[i].push_back({e, s, which, res});
            }
        }
    });
    for (auto& col : columns) out.insert(out.end(), col.begin(), col.end());
    return out;
}

}  // namespace dynamo
