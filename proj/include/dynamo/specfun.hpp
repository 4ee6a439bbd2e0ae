#pragma once

#include <cstddef>

namespace dynamo {

/// Termination control for power-series summation.
struct SeriesControl {
    double rel_tol = 1e-15;
    std::size_t max_terms = 500;

    /// Throws ValidationError unless rel_tol in (0, 1e-6] and max_terms >= 50.
    void validate() const;
};

struct SeriesSum {
    double value = 0.0;
    std::size_t terms = 0;  // number of terms added
    double last_term = 0.0; // magnitude of the first omitted term
};

/// Gamma function via a Lanczos approximation (reflection below 1/2).
/// Throws DomainError at non-positive integers.
double gamma_fn(double x);

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1.
double pochhammer(double a, unsigned n);

/// Generalised hypergeometric 1F2(a; b1, b2; x) by term recurrence.
/// Stops once three consecutive terms fall below rel_tol * |partial sum|.
/// Throws NonConvergenceError when max_terms is reached.
double hyp1f2(double a, double b1, double b2, double x, const SeriesControl& ctl = {});
SeriesSum hyp1f2_sum(double a, double b1, double b2, double x, const SeriesControl& ctl = {});

/// Checks the factorial/Pochhammer identities used to regroup the
/// gamma series into 1F2 terms:
///   n!/(3n)!   = 1 / (3^{3n} (1/3)_n (2/3)_n)
///   n!/(3n+1)! = 1 / (3^{3n} (2/3)_n (4/3)_n)
///   n!/(3n+2)! = 1 / (2 * 3^{3n} (4/3)_n (5/3)_n)
/// to 1e-12 relative. Requires n <= 20.
bool factored_identities_check(unsigned n);

}  // namespace dynamo
