#pragma once

#include "tcmax/market.hpp"

#include <optional>

namespace tcmax {

/// Two assets, one period, leaves omega = 1..N (node id omega) with
/// P(omega) = 2^-omega / (1 - 2^-N).
/// Rates: pi_0^{1,2} = 1, pi_0^{2,1} = k, pi_1^{2,1} = 2, pi_1^{1,2} = k.
/// Claims: "theta" = (1 - 1/omega) e_2 - (1 - 1/(2 omega)) e_1 and "xi0" = e_2 - e_1.
Market example3_market(const Rational& k, unsigned N);

/// The strategy attaining theta: e_2 - e_1 at the root, (e_1 - 2 e_2) / (2 omega) at leaf omega.
NodeVectors example3_strategy(const Market& m);

/// (e_2 - e_1/2) on leaves omega <= n, zero elsewhere.
Claim example3_x(const Market& m, unsigned n);

/// Witness for theta + (1/(2N)) e_2 in A: a = 1 - 1/(2N) on e_2 - e_1,
/// B(omega) = 1/(2 omega) - 1/(2N) on e_1 - 2 e_2.
NodeVectors example3_improvement_strategy(const Market& m);

struct TimeOneCoefficients {
    Rational a1;
    Rational b1;
};

/// Coefficients of theta_0 - xi_0 on {e_1 - 2 e_2, e_2 - k e_1}, where
/// xi_0 = a0 (e_2 - e_1) + b0 (e_1 - k e_2). Obtained by a linear solve.
std::optional<TimeOneCoefficients> example3_solve_coefficients(const Rational& k, const Rational& a0, const Rational& b0);

/// Closed forms for the same coefficients.
TimeOneCoefficients example3_coefficient_formulas(const Rational& k, const Rational& a0, const Rational& b0);

/// Range of (a0, b0) >= 0 with a1, b1 >= 0, by LP: returns the unique point if the
/// feasible set is a single point.
std::optional<std::pair<Rational, Rational>> example3_forced_time_zero(const Rational& k);

} // namespace tcmax
