#include "tcmax/lp.hpp"

#include "tcmax/errors.hpp"

#include <memory>
#include <ostream>

namespace tcmax {

std::size_t LinearProgram::add_variable(Bound b) {
    bounds_.push_back(std::move(b));
    for (auto& c : constraints_) c.row.emplace_back(0);
    if (objective_) objective_->emplace_back(0);
    return bounds_.size() - 1;
}

void LinearProgram::add_constraint(Vector row, Relation rel, Rational rhs) {
    if (row.size() != variables()) {
        throw std::invalid_argument("constraint has " + std::to_string(row.size()) + " coefficients, program has " +
                                    std::to_string(variables()) + " variables");
    }
    constraints_.push_back({std::move(row), rel, std::move(rhs)});
}

void LinearProgram::add_sparse(const std::vector<std::pair<std::size_t, Rational>>& terms, Relation rel, Rational rhs) {
    Vector row(variables(), Rational(0));
    for (const auto& [j, a] : terms) row.at(j) += a;
    constraints_.push_back({std::move(row), rel, std::move(rhs)});
}

void LinearProgram::set_objective(Vector c, Sense s) {
    if (c.size() != variables()) throw std::invalid_argument("objective dimension mismatch");
    objective_ = std::move(c);
    sense_ = s;
}

std::string to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Feasible: return "feasible";
    }
    return "?";
}

namespace {

enum class VarKind { Lower, Upper, Free };

struct VarMap {
    VarKind kind;
    std::size_t col;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : t_(rows, Vector(cols + 1, Rational(0))), obj_(cols + 1, Rational(0)), basis_(rows, 0) {}

    std::size_t rows() const { return t_.size(); }
    std::size_t cols() const { return obj_.size() - 1; }

    Rational& at(std::size_t r, std::size_t c) { return t_[r][c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return t_[r][c]; }
    Rational& rhs(std::size_t r) { return t_[r].back(); }
    const Rational& rhs(std::size_t r) const { return t_[r].back(); }
    std::size_t& basic(std::size_t r) { return basis_[r]; }
    std::size_t basic(std::size_t r) const { return basis_[r]; }

    const Vector& obj() const { return obj_; }

    void load_costs(const Vector& c) {
        for (std::size_t j = 0; j < c.size(); ++j) obj_[j] = c[j];
        obj_.back() = 0;
        for (std::size_t r = 0; r < rows(); ++r) {
            const Rational& cb = c[basis_[r]];
            if (cb.is_zero()) continue;
            for (std::size_t j = 0; j <= cols(); ++j) {
                if (!t_[r][j].is_zero()) obj_[j] -= cb * t_[r][j];
            }
        }
    }

    void pivot(std::size_t p, std::size_t q) {
        auto& prow = t_[p];
        const Rational inv = 1 / prow[q];
        nz_.clear();
        for (std::size_t j = 0; j < prow.size(); ++j) {
            if (prow[j].is_zero()) continue;
            prow[j] *= inv;
            nz_.push_back(j);
        }
        for (std::size_t r = 0; r < rows(); ++r) {
            if (r == p) continue;
            eliminate(t_[r], prow, q);
        }
        eliminate(obj_, prow, q);
        basis_[p] = q;
    }

    void dump(std::ostream& os) const {
        for (std::size_t r = 0; r < rows(); ++r) {
            os << "x" << basis_[r] << " |";
            for (const auto& v : t_[r]) os << ' ' << to_string(v);
            os << '\n';
        }
        os << "obj |";
        for (const auto& v : obj_) os << ' ' << to_string(v);
        os << '\n';
    }

private:
    void eliminate(Vector& row, const Vector& prow, std::size_t q) {
        if (row[q].is_zero()) return;
        const Rational f = row[q];
        for (auto j : nz_) row[j] -= f * prow[j];
    }

    std::vector<Vector> t_;
    Vector obj_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> nz_;
};

class Solver {
public:
    Solver(const LinearProgram& lp, const LpOptions& options) : lp_(lp), opts_(options) {}

    LpOutcome run();

private:
    void standardize();
    // Runs simplex on the current cost row; returns entering column on unboundedness.
    std::optional<std::size_t> simplex(bool allow_artificial);
    void drive_out_artificials();
    Vector duals(const Vector& costs) const;
    Vector structural_values() const;
    Vector to_original_point(const Vector& xs) const;
    Vector to_original_direction(const Vector& ds) const;
    DualCertificate map_dual(const Vector& pi, const Vector* objective) const;

    const LinearProgram& lp_;
    const LpOptions& opts_;
    std::size_t n_ = 0;          // original variables
    std::size_t ns_ = 0;         // structural columns
    std::size_t m_orig_ = 0;
    std::vector<VarMap> vars_;
    std::vector<int> sigma_;
    std::vector<std::size_t> unit_col_;
    std::size_t first_artificial_ = 0;
    std::size_t pivots_ = 0;
    std::unique_ptr<Tableau> tab_;
};

void Solver::standardize() {
    n_ = lp_.variables();
    m_orig_ = lp_.constraints().size();
    vars_.resize(n_);
    std::vector<std::size_t> upper_rows;
    for (std::size_t j = 0; j < n_; ++j) {
        const auto& b = lp_.bound(j);
        if (b.lower) {
            vars_[j] = {VarKind::Lower, ns_++};
            if (b.upper) upper_rows.push_back(j);
        } else if (b.upper) {
            vars_[j] = {VarKind::Upper, ns_++};
        } else {
            vars_[j] = {VarKind::Free, ns_};
            ns_ += 2;
        }
    }

    struct Row {
        Vector a;
        Relation rel;
        Rational b;
    };
    std::vector<Row> rows;
    rows.reserve(m_orig_ + upper_rows.size());
    for (const auto& c : lp_.constraints()) {
        Row r{Vector(ns_, Rational(0)), c.relation, c.rhs};
        for (std::size_t j = 0; j < n_; ++j) {
            const Rational& a = c.row[j];
            if (a.is_zero()) continue;
            const auto& b = lp_.bound(j);
            switch (vars_[j].kind) {
            case VarKind::Lower:
                r.a[vars_[j].col] = a;
                if (!b.lower->is_zero()) r.b -= a * *b.lower;
                break;
            case VarKind::Upper:
                r.a[vars_[j].col] = -a;
                r.b -= a * *b.upper;
                break;
            case VarKind::Free:
                r.a[vars_[j].col] = a;
                r.a[vars_[j].col + 1] = -a;
                break;
            }
        }
        rows.push_back(std::move(r));
    }
    for (auto j : upper_rows) {
        Row r{Vector(ns_, Rational(0)), Relation::LessEqual, *lp_.bound(j).upper - *lp_.bound(j).lower};
        r.a[vars_[j].col] = 1;
        rows.push_back(std::move(r));
    }

    const std::size_t m = rows.size();
    std::size_t slacks = 0;
    for (const auto& r : rows) slacks += r.rel != Relation::Equal;
    sigma_.assign(m, 1);
    std::vector<int> slack_sign(m, 0);
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].b < 0) sigma_[i] = -1;
        if (rows[i].rel == Relation::LessEqual) slack_sign[i] = 1;
        if (rows[i].rel == Relation::GreaterEqual) slack_sign[i] = -1;
        if (slack_sign[i] * sigma_[i] != 1) ++artificials;
    }
    first_artificial_ = ns_ + slacks;
    tab_ = std::make_unique<Tableau>(m, ns_ + slacks + artificials);
    unit_col_.assign(m, 0);
    std::size_t next_slack = ns_;
    std::size_t next_art = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
        const bool neg = sigma_[i] < 0;
        for (std::size_t j = 0; j < ns_; ++j) {
            if (!rows[i].a[j].is_zero()) tab_->at(i, j) = neg ? Rational(-rows[i].a[j]) : rows[i].a[j];
        }
        tab_->rhs(i) = neg ? Rational(-rows[i].b) : rows[i].b;
        if (slack_sign[i] != 0) {
            const std::size_t s = next_slack++;
            tab_->at(i, s) = slack_sign[i] * sigma_[i];
            if (slack_sign[i] * sigma_[i] == 1) {
                unit_col_[i] = s;
                tab_->basic(i) = s;
                continue;
            }
        }
        const std::size_t a = next_art++;
        tab_->at(i, a) = 1;
        unit_col_[i] = a;
        tab_->basic(i) = a;
    }
}

std::optional<std::size_t> Solver::simplex(bool allow_artificial) {
    auto& t = *tab_;
    const std::size_t limit = allow_artificial ? t.cols() : first_artificial_;
    for (;;) {
        std::size_t q = limit;
        for (std::size_t j = 0; j < limit; ++j) {
            if (t.obj()[j] > 0) {
                q = j;
                break;
            }
        }
        if (q == limit) return std::nullopt;
        std::size_t p = t.rows();
        Rational best;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const Rational& a = t.at(r, q);
            if (a <= 0) continue;
            Rational ratio = t.rhs(r) / a;
            if (p == t.rows() || ratio < best || (ratio == best && t.basic(r) < t.basic(p))) {
                best = std::move(ratio);
                p = r;
            }
        }
        if (p == t.rows()) return q;
        t.pivot(p, q);
        ++pivots_;
        if (opts_.trace) {
            *opts_.trace << "pivot " << pivots_ << ": row " << p << ", column " << q << '\n';
            t.dump(*opts_.trace);
        }
    }
}

void Solver::drive_out_artificials() {
    auto& t = *tab_;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t.basic(r) < first_artificial_) continue;
        for (std::size_t j = 0; j < first_artificial_; ++j) {
            if (!t.at(r, j).is_zero()) {
                t.pivot(r, j);
                ++pivots_;
                break;
            }
        }
    }
}

Vector Solver::duals(const Vector& costs) const {
    Vector pi(tab_->rows());
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = costs[unit_col_[i]] - tab_->obj()[unit_col_[i]];
    return pi;
}

Vector Solver::structural_values() const {
    Vector xs(ns_, Rational(0));
    for (std::size_t r = 0; r < tab_->rows(); ++r) {
        if (tab_->basic(r) < ns_) xs[tab_->basic(r)] = tab_->rhs(r);
    }
    return xs;
}

Vector Solver::to_original_point(const Vector& xs) const {
    Vector x(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        const auto& b = lp_.bound(j);
        switch (vars_[j].kind) {
        case VarKind::Lower: x[j] = *b.lower + xs[vars_[j].col]; break;
        case VarKind::Upper: x[j] = *b.upper - xs[vars_[j].col]; break;
        case VarKind::Free: x[j] = xs[vars_[j].col] - xs[vars_[j].col + 1]; break;
        }
    }
    return x;
}

Vector Solver::to_original_direction(const Vector& ds) const {
    Vector r(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        switch (vars_[j].kind) {
        case VarKind::Lower: r[j] = ds[vars_[j].col]; break;
        case VarKind::Upper: r[j] = -ds[vars_[j].col]; break;
        case VarKind::Free: r[j] = ds[vars_[j].col] - ds[vars_[j].col + 1]; break;
        }
    }
    return r;
}

// pi are simplex duals of the sign-normalized rows. The original-row multiplier
// is -sigma_i * pi_i; bound multipliers absorb the residual.
DualCertificate Solver::map_dual(const Vector& pi, const Vector* objective) const {
    DualCertificate cert;
    cert.rows.resize(m_orig_);
    for (std::size_t i = 0; i < m_orig_; ++i) cert.rows[i] = sigma_[i] > 0 ? Rational(-pi[i]) : pi[i];
    Vector residual = objective ? *objective : Vector(n_, Rational(0));
    for (std::size_t i = 0; i < m_orig_; ++i) {
        if (cert.rows[i].is_zero()) continue;
        axpy(cert.rows[i], lp_.constraints()[i].row, residual);
    }
    cert.lower.assign(n_, Rational(0));
    cert.upper.assign(n_, Rational(0));
    for (std::size_t j = 0; j < n_; ++j) {
        if (residual[j] < 0) cert.lower[j] = -residual[j];
        if (residual[j] > 0) cert.upper[j] = residual[j];
    }
    return cert;
}

LpOutcome Solver::run() {
    standardize();
    auto& t = *tab_;
    LpOutcome out;
    const std::size_t total = t.cols();

    if (first_artificial_ < total) {
        Vector c1(total, Rational(0));
        for (std::size_t j = first_artificial_; j < total; ++j) c1[j] = -1;
        t.load_costs(c1);
        simplex(false);
        if (t.obj().back() > 0) {
            out.status = LpStatus::Infeasible;
            out.dual = map_dual(duals(c1), nullptr);
            out.pivots = pivots_;
            return out;
        }
        drive_out_artificials();
    }

    if (!lp_.objective()) {
        out.status = LpStatus::Feasible;
        out.point = to_original_point(structural_values());
        out.pivots = pivots_;
        return out;
    }

    // Phase 2 always maximizes; minimization negates the objective.
    const bool minimize = lp_.sense() == Sense::Minimize;
    Vector c_orig = *lp_.objective();
    if (minimize) c_orig = negated(c_orig);
    Vector c2(total, Rational(0));
    for (std::size_t j = 0; j < n_; ++j) {
        if (c_orig[j].is_zero()) continue;
        switch (vars_[j].kind) {
        case VarKind::Lower: c2[vars_[j].col] = c_orig[j]; break;
        case VarKind::Upper: c2[vars_[j].col] = -c_orig[j]; break;
        case VarKind::Free:
            c2[vars_[j].col] = c_orig[j];
            c2[vars_[j].col + 1] = -c_orig[j];
            break;
        }
    }
    t.load_costs(c2);
    const auto entering = simplex(false);
    out.point = to_original_point(structural_values());
    out.pivots = pivots_;
    if (entering) {
        Vector ds(ns_, Rational(0));
        if (*entering < ns_) ds[*entering] = 1;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            if (t.basic(r) < ns_ && !t.at(r, *entering).is_zero()) ds[t.basic(r)] = -t.at(r, *entering);
        }
        out.status = LpStatus::Unbounded;
        out.ray = to_original_direction(ds);
        return out;
    }
    out.status = LpStatus::Optimal;
    out.value = dot(*lp_.objective(), out.point);
    out.dual = map_dual(duals(c2), &c_orig);
    return out;
}

std::string describe_row(std::size_t i) { return "constraint " + std::to_string(i); }

bool relation_holds(const Rational& lhs, Relation rel, const Rational& rhs) {
    switch (rel) {
    case Relation::LessEqual: return lhs <= rhs;
    case Relation::Equal: return lhs == rhs;
    case Relation::GreaterEqual: return lhs >= rhs;
    }
    return false;
}

std::string check_point(const LinearProgram& lp, const Vector& x) {
    if (x.size() != lp.variables()) return "point has wrong dimension";
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto& b = lp.bound(j);
        if (b.lower && x[j] < *b.lower) return "point violates lower bound of x" + std::to_string(j);
        if (b.upper && x[j] > *b.upper) return "point violates upper bound of x" + std::to_string(j);
    }
    for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
        const auto& c = lp.constraints()[i];
        if (!relation_holds(dot(c.row, x), c.relation, c.rhs)) return "point violates " + describe_row(i);
    }
    return {};
}

// Signs, then returns sum y_i a_i + lower - upper and y.b + lower.l - upper.u.
std::string check_dual_signs(const LinearProgram& lp, const DualCertificate& d, Vector& combo, Rational& rhs) {
    const std::size_t n = lp.variables();
    if (d.rows.size() != lp.constraints().size() || d.lower.size() != n || d.upper.size() != n) {
        return "certificate has wrong dimension";
    }
    combo.assign(n, Rational(0));
    rhs = 0;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto& c = lp.constraints()[i];
        const Rational& y = d.rows[i];
        if (c.relation == Relation::GreaterEqual && y < 0) return "multiplier of >= " + describe_row(i) + " is negative";
        if (c.relation == Relation::LessEqual && y > 0) return "multiplier of <= " + describe_row(i) + " is positive";
        if (y.is_zero()) continue;
        axpy(y, c.row, combo);
        rhs += y * c.rhs;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto& b = lp.bound(j);
        if (d.lower[j] < 0 || d.upper[j] < 0) return "bound multiplier of x" + std::to_string(j) + " is negative";
        if (!d.lower[j].is_zero()) {
            if (!b.lower) return "lower multiplier on x" + std::to_string(j) + " without lower bound";
            combo[j] += d.lower[j];
            rhs += d.lower[j] * *b.lower;
        }
        if (!d.upper[j].is_zero()) {
            if (!b.upper) return "upper multiplier on x" + std::to_string(j) + " without upper bound";
            combo[j] -= d.upper[j];
            rhs -= d.upper[j] * *b.upper;
        }
    }
    return {};
}

} // namespace

LpOutcome lp_solve(const LinearProgram& lp, const LpOptions& options) {
    if (lp.variables() == 0) throw std::invalid_argument("linear program needs at least one variable");
    for (const auto& c : lp.constraints()) {
        if (c.row.size() != lp.variables()) throw std::invalid_argument("constraint dimension mismatch");
    }
    Solver s(lp, options);
    return s.run();
}

std::string lp_verify(const LinearProgram& lp, const LpOutcome& out) {
    switch (out.status) {
    case LpStatus::Feasible:
        return check_point(lp, out.point);
    case LpStatus::Optimal: {
        if (auto e = check_point(lp, out.point); !e.empty()) return e;
        if (!lp.objective()) return "optimal status without objective";
        if (dot(*lp.objective(), out.point) != out.value) return "reported value differs from c.x";
        if (!out.dual) return "optimal outcome has no dual certificate";
        Vector combo;
        Rational rhs;
        if (auto e = check_dual_signs(lp, *out.dual, combo, rhs); !e.empty()) return e;
        const bool max = lp.sense() == Sense::Maximize;
        for (std::size_t j = 0; j < combo.size(); ++j) {
            const Rational& c = (*lp.objective())[j];
            if (max ? (c + combo[j] != 0) : (c != combo[j])) return "dual does not reproduce objective at x" + std::to_string(j);
        }
        if ((max ? Rational(-rhs) : rhs) != out.value) return "dual value differs from primal value";
        return {};
    }
    case LpStatus::Infeasible: {
        if (!out.dual) return "infeasible outcome has no Farkas certificate";
        Vector combo;
        Rational rhs;
        if (auto e = check_dual_signs(lp, *out.dual, combo, rhs); !e.empty()) return e;
        if (!is_zero(combo)) return "Farkas combination is not zero";
        if (rhs <= 0) return "Farkas right-hand side is not positive";
        return {};
    }
    case LpStatus::Unbounded: {
        if (auto e = check_point(lp, out.point); !e.empty()) return e;
        if (!lp.objective()) return "unbounded status without objective";
        const auto& r = out.ray;
        if (r.size() != lp.variables()) return "ray has wrong dimension";
        for (std::size_t j = 0; j < r.size(); ++j) {
            const auto& b = lp.bound(j);
            if (b.lower && r[j] < 0) return "ray leaves lower bound of x" + std::to_string(j);
            if (b.upper && r[j] > 0) return "ray leaves upper bound of x" + std::to_string(j);
        }
        for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
            const auto& c = lp.constraints()[i];
            if (!relation_holds(dot(c.row, r), c.relation, Rational(0))) return "ray violates " + describe_row(i);
        }
        const Rational gain = dot(*lp.objective(), r);
        if (lp.sense() == Sense::Maximize ? gain <= 0 : gain >= 0) return "ray does not improve the objective";
        return {};
    }
    }
    return "unknown status";
}

} // namespace tcmax
