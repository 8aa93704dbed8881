#pragma once

#include "tcmax/lp.hpp"
#include "tcmax/market.hpp"

#include <optional>
#include <random>

namespace tcmax {

/// Adapted R^d-valued process; one vector per node.
struct PriceProcess {
    NodeVectors z;
    bool strict = false;
    Rational slack; ///< common slack of the strict LP (0 when not strict)
};

struct ConsistencyResult {
    bool found = false;
    PriceProcess process;
    std::optional<DualCertificate> farkas; ///< when not found
    std::string explanation;
};

/// Empty string if Z is a martingale with values in K*_t minus {0} (and in the
/// relative interior when strict), else the first violated condition.
std::string check_price_process(const Market& m, const NodeVectors& z, bool strict);

/// Consistent (or strictly consistent) price process, optionally pricing X at zero.
ConsistencyResult find_consistent_process(const Market& m, bool strict = false, const Claim* price_zero = nullptr);

/// Per node: which generators of K_t(node) lie in its lineality space.
std::vector<std::vector<bool>> node_lineality_flags(const Market& m);

struct ValueReport {
    Rational price;                    ///< E[Z_T . X]
    std::vector<Rational> value;       ///< V per node
    std::vector<Rational> period_terms; ///< E[Z_s . xi_s], s = 0..T (with a decomposition)
    bool identity_holds = true;        ///< price equals the sum of period terms
    bool tower_holds = true;           ///< V_t P = sum over children of V_{t+1} P
};

/// Price, value process and per-period terms. Throws ValidationError naming the
/// failing leg if the decomposition does not sum to X or leaves a cone.
ValueReport price_and_value(const Market& m, const PriceProcess& z, const Claim& x, const NodeVectors* decomposition = nullptr);

/// E[Z_T . X]
Rational expected_pairing(const Market& m, const NodeVectors& z, const Claim& x);

struct DualMembership {
    bool in_cone = false;
    Rational optimum;                  ///< max E[Z_T . X] over the normalized box
    std::optional<PriceProcess> witness; ///< consistent Z with E[Z_T . X] > 0
};

/// X in A iff no consistent price process prices X strictly positive.
/// Throws PreconditionError if the market admits arbitrage.
DualMembership dual_membership(const Market& m, const Claim& x);

/// Conditional probabilities q(child | node) of a measure under which Z is a
/// martingale, indexed by child node id (root entry unused).
using ConditionalMeasure = std::vector<Rational>;

/// Equivalent martingale measure for Z: a random vertex mixed with P.
ConditionalMeasure sample_emm(const Market& m, const NodeVectors& z, std::mt19937_64& rng);

/// E_Q[Z_T . X | node] for every node.
std::vector<Rational> conditional_values(const Market& m, const ConditionalMeasure& q, const NodeVectors& z, const Claim& x);

/// Checks that Z is a Q-martingale and Q is equivalent to P.
bool is_emm(const Market& m, const ConditionalMeasure& q, const NodeVectors& z);

/// Whether v lies in cone(generators) in R^d.
bool in_node_cone(const std::vector<Vector>& generators, std::span<const Rational> v);

} // namespace tcmax
