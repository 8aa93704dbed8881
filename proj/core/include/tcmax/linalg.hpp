#pragma once

#include "tcmax/rational.hpp"

#include <optional>

namespace tcmax {

/// Row-major dense matrix.
using Matrix = std::vector<Vector>;

/// Reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(Matrix& m, std::size_t cols);

std::size_t rank(const Matrix& rows, std::size_t cols);

/// Basis of { x : rows * x = 0 } in dimension cols.
Matrix nullspace(const Matrix& rows, std::size_t cols);

/// Linearly independent basis (reduced) of span(vectors).
Matrix span_basis(const Matrix& vectors, std::size_t dim);

Matrix orthogonal_complement(const Matrix& basis, std::size_t dim);

bool in_span(const Matrix& basis, std::span<const Rational> v);

/// Some x with sum_j x_j * columns[j] = target, if one exists.
std::optional<Vector> solve_combination(const Matrix& columns, std::span<const Rational> target);

/// Orthogonal projection of v onto span(basis).
Vector project_onto(const Matrix& basis, std::span<const Rational> v);

} // namespace tcmax
