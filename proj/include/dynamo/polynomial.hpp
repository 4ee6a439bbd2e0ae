#pragma once

#include <span>
#include <vector>

namespace dynamo {

/// Horner evaluation; coefficients in ascending powers.
double polyval(std::span<const double> coeffs, double x);

/// Real roots of c0 + c1 x + c2 x^2 + c3 x^3, sorted ascending.
///
/// Trigonometric form when the cubic has three real roots, Cardano
/// otherwise, followed by Newton polishing on the original polynomial.
/// Degenerate leading coefficients fall back to the quadratic/linear case.
std::vector<double> real_cubic_roots(double c0, double c1, double c2, double c3);

}  // namespace dynamo
