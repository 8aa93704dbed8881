#pragma once

#include "tcmax/double_description.hpp"
#include "tcmax/market.hpp"

#include <memory>
#include <optional>

namespace tcmax {

/// Where a lifted generator came from.
struct GeneratorTag {
    enum class Kind { Trading, Added, Plain };
    Kind kind = Kind::Plain;
    unsigned time = 0;
    std::size_t node = 0;
    std::size_t index = 0;
    std::string label;
};

std::string to_string(const GeneratorTag& tag);

/// Default ceiling on the ambient dimension for double description.
inline constexpr std::size_t kDefaultDdBudget = 24;

/// A finitely generated cone in claim space (dimension d * leaves, leaf-major).
class LiftedCone {
public:
    LiftedCone() = default;
    explicit LiftedCone(std::size_t dim) : dim_(dim) {}

    static LiftedCone from_generators(std::size_t dim, const Matrix& gens, const std::string& label = "g");

    /// K_from + ... + K_to lifted to claim space: one generator per (node, base generator).
    static LiftedCone attainable(const FiltrationTree& tree, const TradingConeField& cones, unsigned from, unsigned to);
    static LiftedCone attainable(const Market& m, unsigned from = 0);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return gens_.size(); }
    const Matrix& generators() const { return gens_; }
    const std::vector<GeneratorTag>& tags() const { return tags_; }

    void add(Vector g, GeneratorTag tag);
    void append(const LiftedCone& other);

    /// Computes, verifies (double polar) and stores the polar generators.
    void attach_polar(std::size_t budget = kDefaultDdBudget);
    const ConeGenerators* cached_polar() const { return polar_.get(); }

private:
    std::size_t dim_ = 0;
    Matrix gens_;
    std::vector<GeneratorTag> tags_;
    std::shared_ptr<const ConeGenerators> polar_;
};

/// Linear subspace with an independent basis.
struct Subspace {
    std::size_t dim = 0;
    Matrix basis;

    bool trivial() const { return basis.empty(); }
    std::size_t rank() const { return basis.size(); }
    bool contains(std::span<const Rational> v) const { return in_span(basis, v); }
    Subspace complement() const { return {dim, orthogonal_complement(basis, dim)}; }
};

struct Membership {
    bool member = false;
    Vector coefficients; ///< nonnegative weights per generator (member)
    Vector separator;    ///< z with z.g <= 0 for all g and z.x > 0 (non-member)
};

Membership member(const LiftedCone& cone, std::span<const Rational> x);

/// Polar cone generators; throws BudgetExceeded above the ambient-dimension budget.
LiftedCone polar(const LiftedCone& cone, std::size_t budget = kDefaultDdBudget);

Subspace lineality(const LiftedCone& cone);

/// Flags the generators that lie in the lineality space.
std::vector<bool> lineality_generators(const LiftedCone& cone);

/// A point z in the relative interior of the polar, and the generators on which
/// it is strictly negative (exactly those outside the lineality space).
struct RelintPoint {
    Vector z;
    std::vector<bool> strict;
};
RelintPoint relint_polar_point(const LiftedCone& cone);

struct ArbitrageWitness {
    Vector claim;
    Vector coefficients;
    std::size_t coordinate = 0; ///< a strictly positive entry of claim
};

std::optional<ArbitrageWitness> arbitrage_check(const LiftedCone& cone);

struct NullStrategies {
    bool is_vector_space = false;
    Matrix tuples;                 ///< basis of the null set (stacked components), when a vector space
    std::vector<Matrix> components; ///< basis of each component projection, when a vector space
    Vector relint_tuple;           ///< a null tuple of maximal support
};

NullStrategies null_strategies(const std::vector<LiftedCone>& factors);

enum class Displacement { ScalarRay, Measurable };

/// cone - R+ xi (scalar ray) or cone - mF_t+ xi (one generator -xi 1_node per time-t node).
LiftedCone displaced_cone(const LiftedCone& cone, std::span<const Rational> xi, Displacement mode, const FiltrationTree& tree,
                          unsigned t, std::size_t assets);

/// Reduced cones M_t = K_t intersected with rho_t-perp, per node. Throws
/// PreconditionError if the null strategies do not form a vector space.
TradingConeField neat_reduce(const FiltrationTree& tree, const TradingConeField& cones);

bool cone_equal(const LiftedCone& a, const LiftedCone& b);

/// Restriction of claim-space vectors to the leaves of one node (d * leaves-under-node).
Vector restrict_to_node(std::span<const Rational> v, const FiltrationTree& tree, std::size_t node, std::size_t assets);

/// K_from + ... + K_to below `node`, in the coordinates of that node's leaves.
LiftedCone subtree_attainable(const FiltrationTree& tree, const TradingConeField& cones, std::size_t node, unsigned from, unsigned to);

/// v repeated on each of `leaves` leaves.
Vector repeat_on_leaves(std::span<const Rational> v, std::size_t leaves);

/// v on the leaves of `node`, zero elsewhere.
Vector lift_to_node(std::span<const Rational> v, const FiltrationTree& tree, std::size_t node, std::size_t assets);

} // namespace tcmax
