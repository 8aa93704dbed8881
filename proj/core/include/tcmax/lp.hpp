#pragma once

#include "tcmax/rational.hpp"

#include <iosfwd>
#include <optional>

namespace tcmax {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Maximize, Minimize };

/// Variable bounds; a missing side is infinite. Default is x >= 0.
struct Bound {
    std::optional<Rational> lower = Rational(0);
    std::optional<Rational> upper;

    static Bound free() { return {std::nullopt, std::nullopt}; }
    static Bound nonnegative() { return {}; }
    static Bound between(Rational lo, Rational hi) { return {std::move(lo), std::move(hi)}; }
    static Bound at_most(Rational hi) { return {std::nullopt, std::move(hi)}; }
};

struct Constraint {
    Vector row;
    Relation relation = Relation::LessEqual;
    Rational rhs;
};

/// A linear program over exact rationals. Without an objective it is a
/// feasibility problem.
class LinearProgram {
public:
    LinearProgram() = default;
    explicit LinearProgram(std::size_t variables) : bounds_(variables) {}

    std::size_t variables() const { return bounds_.size(); }

    /// Appends a variable and returns its index; existing rows are padded with 0.
    std::size_t add_variable(Bound b = {});

    void set_bound(std::size_t j, Bound b) { bounds_.at(j) = std::move(b); }
    const Bound& bound(std::size_t j) const { return bounds_.at(j); }
    const std::vector<Bound>& bounds() const { return bounds_; }

    void add_constraint(Vector row, Relation rel, Rational rhs);
    /// Sparse form: (index, coefficient) pairs.
    void add_sparse(const std::vector<std::pair<std::size_t, Rational>>& terms, Relation rel, Rational rhs);

    const std::vector<Constraint>& constraints() const { return constraints_; }

    void set_objective(Vector c, Sense s);
    void clear_objective() { objective_.reset(); }
    const std::optional<Vector>& objective() const { return objective_; }
    Sense sense() const { return sense_; }

private:
    std::vector<Bound> bounds_;
    std::vector<Constraint> constraints_;
    std::optional<Vector> objective_;
    Sense sense_ = Sense::Maximize;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, Feasible };

std::string to_string(LpStatus s);

/// Dual certificate under the convention y_i (a_i x - b_i) >= 0:
/// y_i >= 0 on >= rows, y_i <= 0 on <= rows, free on = rows;
/// lower_j >= 0 multiplies x_j - l_j >= 0 and upper_j >= 0 multiplies u_j - x_j >= 0.
///
/// Optimality (max c.x): c + sum y_i a_i + (lower - upper) = 0 and the optimum
/// equals -(y.b + lower.l - upper.u). For min the signs of c flip.
/// Infeasibility (Farkas): sum y_i a_i + (lower - upper) = 0 and
/// y.b + lower.l - upper.u > 0.
struct DualCertificate {
    Vector rows;
    Vector lower;
    Vector upper;
};

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    Vector point;
    Rational value;
    std::optional<DualCertificate> dual;
    Vector ray;
    std::size_t pivots = 0;

    bool feasible() const { return status != LpStatus::Infeasible; }
};

struct LpOptions {
    std::ostream* trace = nullptr; ///< tableau dump after each pivot
};

/// Two-phase primal simplex with Bland's rule. Deterministic.
LpOutcome lp_solve(const LinearProgram& lp, const LpOptions& options = {});

/// Exact re-check of an outcome against its program. Returns an empty string
/// when everything verifies, else a description of the first failure.
std::string lp_verify(const LinearProgram& lp, const LpOutcome& outcome);

} // namespace tcmax
