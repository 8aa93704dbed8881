#pragma once

#include "tcmax/cone.hpp"
#include "tcmax/pricing.hpp"
#include "tcmax/randomize.hpp"

namespace tcmax {

// ---- efficiency -------------------------------------------------------------

struct EfficiencyResult {
    bool efficient = false;
    Vector witness; ///< element of cone(A - theta) in C outside lin(C), when not efficient
};

/// theta in the cone A; cone(A - theta) is A - R+ theta, or A - mF_t+ theta
/// (closed form used for proper efficiency) when `proper` is set.
/// Throws PreconditionError if theta is not in A.
EfficiencyResult is_efficient(const LiftedCone& a, std::span<const Rational> theta, const LiftedCone& c, bool proper = false,
                              const FiltrationTree* tree = nullptr, unsigned t = 0, std::size_t assets = 0);

/// Same test for the set K intersected with (b - B), which need not be a cone.
EfficiencyResult is_efficient_in_section(const LiftedCone& k, const LiftedCone& b_cone, std::span<const Rational> b,
                                         std::span<const Rational> theta, const LiftedCone& c);

// ---- maximality -------------------------------------------------------------

enum class Verdict { NotInA, NotMaximal, Maximal, ProperlyMaximal };

std::string to_string(Verdict v);

struct MaximalityReport {
    bool in_a = false;
    Membership membership;
    bool maximal = false;
    Claim improvement;             ///< delta >= 0, nonzero, X + delta in A (not maximal)
    Rational improvement_value;    ///< optimum of sum P * delta
    bool proper_checked = false;
    bool properly_maximal = false;
    std::optional<PriceProcess> certificate;
    std::optional<DualCertificate> farkas;

    Verdict verdict() const;
    /// Maximal but not properly maximal; cannot happen on a finite tree.
    bool gap() const { return maximal && proper_checked && !properly_maximal; }
};

/// Throws PreconditionError if the market admits arbitrage.
MaximalityReport is_maximal(const Market& m, const Claim& x, bool check_proper = true);

struct UniformImprovement {
    Rational epsilon;      ///< max { eps : X + eps * v on every leaf is in A }
    Vector coefficients;   ///< generator weights attaining it
};

UniformImprovement max_uniform_improvement(const Market& m, const Claim& x, std::span<const Rational> direction);

// ---- special decomposition ----------------------------------------------------

/// lambda with lambda <= 0 on C = A_{t+1,T} cap span(K_t) and lambda(x) = 0 on C
/// only for x in lin(A_{t+1,T}).
struct ScalarizationFunctional {
    unsigned time = 0;
    Vector lambda;
    std::string source;            ///< "polar generators" or "relative interior"
    std::size_t polar_generators = 0;
    bool scal_holds = false;       ///< lambda <= 0 on the generators of C
    bool scal2_holds = false;      ///< lambda = 0 on a generator of C only inside lin(A_{t+1,T})
};

struct StageCheck {
    unsigned time = 0;
    bool holds = false;
    Vector counterexample; ///< z in A_{t+1,T} outside the lineality with theta_t - z in K_t
};

struct DecompositionResult {
    NodeVectors legs;      ///< theta_t at each time-t node
    std::vector<ScalarizationFunctional> functionals;
    std::vector<StageCheck> checks;
    bool valid = false;
};

/// Legs sum to theta, each leg lies in its node cone, and each stage is efficient.
std::vector<StageCheck> verify_special_decomposition(const Market& m, const Claim& theta, const NodeVectors& legs);

/// Throws PreconditionError if theta is not in A. With `support_maximal`, each
/// leg is replaced by the support-maximal member of its class before the next stage.
DecompositionResult special_decomposition(const Market& m, const Claim& theta, bool support_maximal = false,
                                          std::size_t dd_budget = kDefaultDdBudget);

// ---- classes modulo lin(A_{t+1,T}) --------------------------------------------

/// Per time-t node data (all in R^d).
struct NodeClass {
    std::size_t node = 0;
    Matrix lineality;   ///< {v : v on the node's leaves lies in lin(A_{t+1,T})}
    Matrix sigma;       ///< generators of the closure of mF+[theta_t] at this node
    Vector alpha;       ///< support-maximal coefficients over the node generators
    Vector xi;          ///< representative
    bool spec_holds = false; ///< K - Sigma equals K - R+ xi at this node
};

struct EquivalenceData {
    unsigned time = 0;
    Subspace lineality;       ///< lin(A_{t+1,T}) in claim space
    std::vector<NodeClass> nodes;
    NodeVectors representative; ///< xi_t (zero away from time t)
    bool spec_holds = false;  ///< cone_equal(K_t - Sigma_t, K_t - mF_t+ xi_t)
};

/// theta_t: one vector per node (only time-t nodes are read).
/// Throws PreconditionError if some theta_t(node) is not in K_t(node).
EquivalenceData support_maximal_representative(const Market& m, unsigned t, const NodeVectors& theta_t);

struct NullProjection {
    unsigned time = 0;
    std::vector<Matrix> per_node;   ///< N_t at each time-t node (subspace of R^d); indexed by node id
    std::vector<Matrix> complement; ///< N_t-perp at each time-t node
    Subspace global;                ///< N_t lifted to claim space
    bool vector_space = true;
    bool trivial = true;
};

/// N_t from the factors (K_t - Sigma_t, A_{t+1,T}); Sigma_t from `classes` if
/// given, else mF_t+ theta_t.
NullProjection null_projection(const Market& m, unsigned t, const NodeVectors& theta_t, const EquivalenceData* classes = nullptr);

// ---- truncation and density -----------------------------------------------------

struct TruncatedClaim {
    Claim claim;
    NodeVectors legs;
    Rational disagreement;       ///< P(theta^G != theta)
    Rational disagreement_bound; ///< sum_t P(G_t^c)
};

/// theta_0 + theta_1 1_{H_1} + ... + theta_T 1_{H_T}.
TruncatedClaim truncate_claim(const Market& m, const NodeVectors& legs, const TruncationSets& g);

enum class GVariant { Null2, Null9 };

struct GConditionResult {
    bool holds = true;
    unsigned time = 0;          ///< failing t
    std::size_t node = 0;       ///< failing time-(t-1) node
    Vector counterexample;      ///< y(node) in R^d
};

/// For t = 1..T: y in D_{t-1} (cap N_{t-1}-perp for Null9) with -y 1_{G_t^c} in
/// A_{t,T} forces y = 0. D_{t-1} is K_{t-1} - mF+ theta_{t-1} (Null2) or
/// K_{t-1} - Sigma_{t-1} (Null9, from `classes`).
GConditionResult check_G_condition(const Market& m, const NodeVectors& legs, const TruncationSets& g, GVariant variant,
                                   const std::vector<EquivalenceData>* classes = nullptr,
                                   const std::vector<NullProjection>* projections = nullptr);

struct DensityTerm {
    unsigned n = 0;
    Claim claim;                  ///< theta^n on the randomized market
    NodeVectors legs;
    bool g_condition_checked = false;
    GConditionResult g_condition;
    bool certified = false;
    std::optional<PriceProcess> certificate;
    Rational disagreement;
    Rational disagreement_bound;
    std::size_t product_nodes = 0;
};

struct DensityReport {
    bool lineality_track = false; ///< lin(A) nontrivial
    DecompositionResult decomposition;
    std::vector<DensityTerm> terms;
};

/// Throws PreconditionError if theta is not maximal, ValidationError on a
/// failing G-condition. At n = M the truncation sets are everything, the
/// G-condition is vacuous and theta^n is certified directly.
DensityReport density_sequence(const Market& m, const Claim& theta, unsigned M, const std::vector<unsigned>& n_list,
                               std::size_t node_budget = kDefaultNodeBudget);

} // namespace tcmax
