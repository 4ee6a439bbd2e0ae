#include "dynamo/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace dynamo {

double polyval(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

namespace {

std::vector<double> quadratic_roots(double c0, double c1, double c2) {
    if (c2 == 0.0) {
        if (c1 == 0.0) return {};
        return {-c0 / c1};
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return {};
    // Avoid cancellation between -c1 and sqrt(disc).
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    std::vector<double> roots;
    if (q != 0.0) {
        roots = {q / c2, c0 / q};
    } else {
        roots = {0.0, 0.0};
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double newton_polish(const std::array<double, 4>& c, double x) {
    for (int it = 0; it < 3; ++it) {
        const double f = polyval(c, x);
        const double df = c[1] + x * (2.0 * c[2] + 3.0 * c[3] * x);
        if (df == 0.0 || !std::isfinite(f)) break;
        const double next = x - f / df;
        if (!(std::abs(polyval(c, next)) < std::abs(f))) break;
        x = next;
    }
    return x;
}

}  // namespace

std::vector<double> real_cubic_roots(double c0, double c1, double c2, double c3) {
    const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
    if (c3 == 0.0 || std::abs(c3) < 1e-300 * scale) return quadratic_roots(c0, c1, c2);

    const double a = c2 / c3;
    const double b = c1 / c3;
    const double c = c0 / c3;
    const double shift = a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::vector<double> depressed;
    if (disc < 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            depressed.push_back(r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
    } else {
        const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
        const double y = (u != 0.0) ? u - p / (3.0 * u) : 0.0;
        depressed.push_back(y);
        if (disc == 0.0 && y != 0.0) depressed.push_back(-0.5 * y);
    }

    const std::array<double, 4> coeffs{c0, c1, c2, c3};
    std::vector<double> roots;
    roots.reserve(depressed.size());
    for (double y : depressed) roots.push_back(newton_polish(coeffs, y - shift));
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace dynamo
