#pragma once

// Row assembly for LPs whose equality rows are indexed by claim coordinates.

#include "tcmax/lp.hpp"

namespace tcmax::detail {

class RowBuilder {
public:
    explicit RowBuilder(std::size_t dim) : rows_(dim), rhs_(dim, Rational(0)) {}

    std::size_t dim() const { return rows_.size(); }

    /// sign * sum_k x_{offset+k} * gens[k]
    void add_generators(const Matrix& gens, std::size_t offset, int sign = 1) {
        for (std::size_t k = 0; k < gens.size(); ++k) add_column(gens[k], offset + k, sign);
    }

    void add_column(std::span<const Rational> v, std::size_t var, int sign = 1) {
        for (std::size_t r = 0; r < v.size(); ++r) {
            if (v[r].is_zero()) continue;
            rows_[r].emplace_back(var, sign > 0 ? v[r] : Rational(-v[r]));
        }
    }

    void add_term(std::size_t row, std::size_t var, const Rational& coef) {
        if (!coef.is_zero()) rows_[row].emplace_back(var, coef);
    }

    void set_rhs(std::span<const Rational> b) { rhs_.assign(b.begin(), b.end()); }

    /// Emits one row per coordinate; coordinates with no terms and zero rhs are dropped.
    void emit(LinearProgram& lp, Relation rel = Relation::Equal) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].empty() && rhs_[r].is_zero()) continue;
            lp.add_sparse(rows_[r], rel, rhs_[r]);
        }
    }

private:
    std::vector<std::vector<std::pair<std::size_t, Rational>>> rows_;
    Vector rhs_;
};

inline Vector combine(const Matrix& gens, std::span<const Rational> weights, std::size_t offset, std::size_t dim) {
    Vector out(dim, Rational(0));
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const Rational& w = weights[offset + k];
        if (!w.is_zero()) axpy(w, gens[k], out);
    }
    return out;
}

} // namespace tcmax::detail
