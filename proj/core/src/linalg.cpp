#include "tcmax/linalg.hpp"

namespace tcmax {

std::vector<std::size_t> rref(Matrix& m, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t sel = row;
        while (sel < m.size() && m[sel][col].is_zero()) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[sel], m[row]);
        const Rational inv = 1 / m[row][col];
        for (std::size_t c = col; c < cols; ++c) {
            if (!m[row][c].is_zero()) m[row][c] *= inv;
        }
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            const Rational f = m[r][col];
            for (std::size_t c = col; c < cols; ++c) {
                if (!m[row][c].is_zero()) m[r][c] -= f * m[row][c];
            }
        }
        pivots.push_back(col);
        ++row;
    }
    m.resize(row);
    return pivots;
}

std::size_t rank(const Matrix& rows, std::size_t cols) {
    Matrix m = rows;
    return rref(m, cols).size();
}

Matrix nullspace(const Matrix& rows, std::size_t cols) {
    Matrix m = rows;
    for (const auto& r : m) {
        if (r.size() != cols) throw std::invalid_argument("nullspace: ragged matrix");
    }
    const auto pivots = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    Matrix basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vector v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

Matrix span_basis(const Matrix& vectors, std::size_t dim) {
    Matrix m = vectors;
    rref(m, dim);
    return m;
}

Matrix orthogonal_complement(const Matrix& basis, std::size_t dim) {
    return nullspace(basis, dim);
}

bool in_span(const Matrix& basis, std::span<const Rational> v) {
    if (is_zero(v)) return true;
    if (basis.empty()) return false;
    Matrix m = basis;
    const std::size_t r = rref(m, v.size()).size();
    m.emplace_back(v.begin(), v.end());
    return rref(m, v.size()).size() == r;
}

std::optional<Vector> solve_combination(const Matrix& columns, std::span<const Rational> target) {
    const std::size_t n = columns.size();
    const std::size_t dim = target.size();
    // Augmented system: rows are coordinates, unknowns are column weights.
    Matrix aug(dim, Vector(n + 1, Rational(0)));
    for (std::size_t j = 0; j < n; ++j) {
        if (columns[j].size() != dim) throw std::invalid_argument("solve_combination: dimension mismatch");
        for (std::size_t i = 0; i < dim; ++i) aug[i][j] = columns[j][i];
    }
    for (std::size_t i = 0; i < dim; ++i) aug[i][n] = target[i];
    const auto pivots = rref(aug, n + 1);
    Vector x(n, Rational(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == n) return std::nullopt;
        x[pivots[i]] = aug[i][n];
    }
    return x;
}

Vector project_onto(const Matrix& basis, std::span<const Rational> v) {
    const Matrix b = span_basis(basis, v.size());
    const std::size_t k = b.size();
    if (k == 0) return Vector(v.size(), Rational(0));
    // Normal equations (B B^T) c = B v.
    Matrix aug(k, Vector(k + 1, Rational(0)));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug[i][j] = dot(b[i], b[j]);
        aug[i][k] = dot(b[i], v);
    }
    rref(aug, k + 1);
    Vector out(v.size(), Rational(0));
    for (std::size_t i = 0; i < k; ++i) axpy(aug[i][k], b[i], out);
    return out;
}

} // namespace tcmax
