#pragma once

#include "tcmax/linalg.hpp"

namespace tcmax {

/// Minkowski-Weyl form of a polyhedral cone: span(lineality) + cone(rays).
/// Rays are primitive integer vectors, pairwise non-parallel.
struct ConeGenerators {
    Matrix lineality;
    Matrix rays;

    /// lineality, -lineality, rays.
    Matrix all() const;
};

/// Double description: generators of { x : a x <= 0 for a in ineq, e x = 0 for e in eq }.
ConeGenerators double_description(const Matrix& ineq, const Matrix& eq, std::size_t dim);

/// Generators of the polar { z : z . g <= 0 for every g }.
ConeGenerators polar_generators(const Matrix& generators, std::size_t dim);

/// Generators of cone(G) intersected with { x : e x = 0 for e in eq }.
ConeGenerators intersect_with_subspace(const Matrix& generators, const Matrix& eq, std::size_t dim);

} // namespace tcmax
