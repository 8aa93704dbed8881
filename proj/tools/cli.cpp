#include "cli.hpp"

#include "tcmax/errors.hpp"
#include "tcmax/example3.hpp"
#include "tcmax/maximality.hpp"
#include "tcmax/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

#ifndef TCMAX_VERSION
#define TCMAX_VERSION "dev"
#endif

namespace tcmax::cli {

using json = nlohmann::ordered_json;

namespace {

// ---- rendering --------------------------------------------------------------

json rat(const Rational& r) { return to_string(r); }

json vec(std::span<const Rational> v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
}

json claim_json(const Market& m, const Claim& c) {
    json o = json::object();
    for (std::size_t l = 0; l < m.leaf_count(); ++l) o[std::to_string(m.tree().leaf_node(l))] = vec(c.leaf(l));
    return o;
}

json claim_json(const Market& m, std::span<const Rational> flat) {
    return claim_json(m, Claim(m.assets(), Vector(flat.begin(), flat.end())));
}

json nodes_json(const NodeVectors& v) {
    json o = json::object();
    for (std::size_t n = 0; n < v.per_node.size(); ++n) o[std::to_string(n)] = vec(v.per_node[n]);
    return o;
}

/// Nonzero generator weights keyed by provenance.
json coefficients_json(const LiftedCone& cone, std::span<const Rational> w) {
    json a = json::array();
    for (std::size_t k = 0; k < cone.size() && k < w.size(); ++k) {
        if (w[k].is_zero()) continue;
        a.push_back({{"generator", to_string(cone.tags()[k])}, {"weight", rat(w[k])}});
    }
    return a;
}

json sparse_json(std::span<const Rational> v) {
    json o = json::object();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) o[std::to_string(i)] = rat(v[i]);
    return o;
}

json digest(const Market& m) {
    return {{"assets", m.assets()},
            {"horizon", m.horizon()},
            {"nodes", m.tree().node_count()},
            {"leaves", m.leaf_count()}};
}

json cone_dump(const Market& m) {
    const auto a = LiftedCone::attainable(m);
    json arr = json::array();
    for (std::size_t k = 0; k < a.size(); ++k) {
        arr.push_back({{"tag", to_string(a.tags()[k])}, {"generator", vec(a.generators()[k])}});
    }
    return arr;
}

bool scalar(const json& j) { return !j.is_object() && !j.is_array(); }

std::string scalar_text(const json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

void render_text(const json& j, std::ostream& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (scalar(v)) {
                out << pad << k << ": " << scalar_text(v) << "\n";
            } else if (v.is_array() && std::all_of(v.begin(), v.end(), scalar)) {
                out << pad << k << ": [";
                for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar_text(v[i]);
                out << "]\n";
            } else if (v.empty()) {
                out << pad << k << ": " << (v.is_array() ? "[]" : "{}") << "\n";
            } else {
                out << pad << k << ":\n";
                render_text(v, out, indent + 2);
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (scalar(v)) {
                out << pad << "- " << scalar_text(v) << "\n";
            } else {
                out << pad << "-\n";
                render_text(v, out, indent + 2);
            }
        }
    }
}

// ---- inputs -----------------------------------------------------------------

struct Globals {
    std::string format = "text";
    bool dump_cones = false;
    bool repair_netting = false;
    bool no_timing = false;
};

Market load(const std::string& path, const Globals& g) {
    return load_scenario_file(path, g.repair_netting ? NettingPolicy::Repair : NettingPolicy::Reject);
}

/// Inline JSON literal or a path to a file holding one.
std::string literal_or_file(const std::string& s) {
    if (!s.empty() && s.front() == '{') return s;
    std::ifstream in(s);
    if (!in) throw ValidationError("cannot read " + s);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Claim claim_arg(const Market& m, const std::string& s) {
    if (!s.empty() && s.front() != '{' && !m.claims().count(s) && s != "zero") {
        std::ifstream probe(s);
        if (probe) return resolve_claim(m, literal_or_file(s));
    }
    return resolve_claim(m, s);
}

// ---- commands -----------------------------------------------------------------

int cmd_validate(const Market& m, json& r) {
    r["valid"] = true;
    json names = json::array();
    for (const auto& [name, c] : m.claims()) names.push_back(name);
    r["claims"] = names;
    return kOk;
}

int cmd_arbitrage(const Market& m, json& r) {
    const auto a = LiftedCone::attainable(m);
    const auto w = arbitrage_check(a);
    r["arbitrage_free"] = !w.has_value();
    if (!w) return kOk;
    const std::size_t d = m.assets();
    r["witness"] = {{"claim", claim_json(m, w->claim)},
                    {"positive_entry", {{"leaf", m.tree().leaf_node(w->coordinate / d)}, {"asset", w->coordinate % d + 1}}},
                    {"strategy", coefficients_json(a, w->coefficients)}};
    return kNegative;
}

json process_json(const PriceProcess& p) {
    json o{{"strict", p.strict}, {"Z", nodes_json(p.z)}};
    if (p.strict) o["slack"] = rat(p.slack);
    return o;
}

int cmd_cpp(const Market& m, bool strict, const std::string& price_zero, json& r) {
    std::optional<Claim> x;
    if (!price_zero.empty()) x = claim_arg(m, price_zero);
    const auto res = find_consistent_process(m, strict, x ? &*x : nullptr);
    r["found"] = res.found;
    if (res.found) {
        r["process"] = process_json(res.process);
        r["verified"] = check_price_process(m, res.process.z, strict).empty();
        if (x) r["price"] = rat(expected_pairing(m, res.process.z, *x));
        return kOk;
    }
    r["explanation"] = res.explanation;
    if (res.farkas) r["farkas"] = {{"rows", sparse_json(res.farkas->rows)}};
    return kNegative;
}

int cmd_price(const Market& m, const std::string& claim, const std::string& process, const std::string& decomposition,
              unsigned emm_samples, json& r) {
    const Claim x = claim_arg(m, claim);
    PriceProcess z;
    z.z = parse_node_vectors(m, literal_or_file(process));
    if (auto e = check_price_process(m, z.z, false); !e.empty()) throw ValidationError("process is not consistent: " + e);
    std::optional<NodeVectors> dec;
    if (!decomposition.empty()) dec = parse_node_vectors(m, literal_or_file(decomposition));
    const auto v = price_and_value(m, z, x, dec ? &*dec : nullptr);
    r["price"] = rat(v.price);
    json val = json::object();
    for (std::size_t n = 0; n < v.value.size(); ++n) val[std::to_string(n)] = rat(v.value[n]);
    r["value"] = val;
    if (dec) {
        json terms = json::array();
        for (const auto& t : v.period_terms) terms.push_back(rat(t));
        r["period_terms"] = terms;
        r["identity_holds"] = v.identity_holds;
    }
    r["tower_holds"] = v.tower_holds;
    if (emm_samples > 0) {
        std::mt19937_64 rng(1);
        unsigned agree = 0;
        for (unsigned s = 0; s < emm_samples; ++s) {
            const auto q = sample_emm(m, z.z, rng);
            if (is_emm(m, q, z.z) && conditional_values(m, q, z.z, x) == v.value) ++agree;
        }
        // Agreement across measures is only guaranteed for legs priced at zero.
        bool tight = dec.has_value();
        for (std::size_t n = 0; tight && n < dec->per_node.size(); ++n) {
            const auto& leg = dec->per_node[n];
            tight = leg.empty() || dot(z.z.per_node[n], leg).is_zero();
        }
        r["emm_samples"] = emm_samples;
        r["emm_agreeing"] = agree;
        r["emm_agreement_expected"] = tight;
        if (tight && agree != emm_samples) return kInternal;
    }
    return kOk;
}

int cmd_maximal(const Market& m, const std::string& claim, bool proper, json& r) {
    const Claim x = claim_arg(m, claim);
    const auto rep = is_maximal(m, x, proper);
    r["verdict"] = to_string(rep.verdict());
    const auto a = LiftedCone::attainable(m);
    if (!rep.in_a) {
        r["separator"] = claim_json(m, rep.membership.separator);
        return kNegative;
    }
    r["strategy"] = coefficients_json(a, rep.membership.coefficients);
    if (!rep.maximal) {
        r["improvement"] = claim_json(m, rep.improvement);
        r["improvement_value"] = rat(rep.improvement_value);
        return kNegative;
    }
    if (proper) {
        if (rep.certificate) r["certificate"] = process_json(*rep.certificate);
        if (rep.farkas) r["farkas"] = {{"rows", sparse_json(rep.farkas->rows)}};
        r["gap"] = rep.gap();
        if (!rep.properly_maximal) return kNegative;
    }
    return kOk;
}

json functional_json(const Market& m, const ScalarizationFunctional& f) {
    return {{"time", f.time},
            {"source", f.source},
            {"polar_generators", f.polar_generators},
            {"lambda", claim_json(m, f.lambda)},
            {"scal", f.scal_holds},
            {"scal2", f.scal2_holds}};
}

json checks_json(const Market& m, const std::vector<StageCheck>& checks, bool& all) {
    json a = json::array();
    all = true;
    for (const auto& c : checks) {
        json o{{"time", c.time}, {"efficient", c.holds}};
        if (!c.holds) o["counterexample"] = claim_json(m, c.counterexample);
        all = all && c.holds;
        a.push_back(o);
    }
    return a;
}

int cmd_decompose(const Market& m, const std::string& claim, const std::string& verify_only, bool support_maximal, json& r) {
    const Claim x = claim_arg(m, claim);
    bool all = true;
    if (!verify_only.empty()) {
        const auto legs = parse_node_vectors(m, literal_or_file(verify_only));
        r["legs"] = nodes_json(legs);
        r["checks"] = checks_json(m, verify_special_decomposition(m, x, legs), all);
        r["special"] = all;
        return all ? kOk : kNegative;
    }
    const auto dec = special_decomposition(m, x, support_maximal);
    r["legs"] = nodes_json(dec.legs);
    json fs = json::array();
    for (const auto& f : dec.functionals) fs.push_back(functional_json(m, f));
    r["functionals"] = fs;
    r["checks"] = checks_json(m, dec.checks, all);
    r["special"] = dec.valid;
    return dec.valid ? kOk : kInternal;
}

int cmd_approximate(const Market& m, const std::string& claim, unsigned M, const std::vector<unsigned>& ns, std::size_t budget,
                    bool certificates, json& r) {
    const Claim x = claim_arg(m, claim);
    const auto rep = density_sequence(m, x, M, ns, budget);
    r["lineality_track"] = rep.lineality_track;
    r["decomposition"] = nodes_json(rep.decomposition.legs);
    json terms = json::array();
    bool all = true;
    for (const auto& t : rep.terms) {
        json o{{"n", t.n},
               {"product_nodes", t.product_nodes},
               {"g_condition", t.g_condition_checked ? (t.g_condition.holds ? "holds" : "fails") : "vacuous"},
               {"certified", t.certified},
               {"disagreement", rat(t.disagreement)},
               {"disagreement_bound", rat(t.disagreement_bound)}};
        if (certificates && t.certificate) o["certificate"] = process_json(*t.certificate);
        all = all && t.certified;
        terms.push_back(o);
    }
    r["terms"] = terms;
    return all ? kOk : kNegative;
}

int cmd_example3(const Rational& k, unsigned N, json& r) {
    const Market m = example3_market(k, N);
    const auto a = LiftedCone::attainable(m);
    const Claim theta = m.claim("theta");
    const std::size_t d = 2;

    r["arbitrage_free"] = !arbitrage_check(a).has_value();

    NodeVectors z;
    z.per_node.assign(m.tree().node_count(), Vector{Rational(1), Rational(3, 4)});
    const auto strict_found = find_consistent_process(m, true);
    r["strict_process"] = {{"Z", "(1, 3/4)"},
                           {"verified", check_price_process(m, z, true).empty()},
                           {"lp_found", strict_found.found},
                           {"lp_slack", strict_found.found ? rat(strict_found.process.slack) : json(nullptr)}};

    const auto rep = is_maximal(m, theta, true);
    const Vector e2{Rational(0), Rational(1)};
    const auto eps = max_uniform_improvement(m, theta, e2);
    const Rational oracle = Rational(1) / (2 * Rational(N));
    const auto witness = example3_improvement_strategy(m);
    Claim target = theta;
    for (std::size_t l = 0; l < m.leaf_count(); ++l) target.at(l, 1) += oracle;
    bool witness_ok = terminal_claim(m.tree(), d, witness) == target;
    for (std::size_t n = 0; n < m.tree().node_count(); ++n)
        witness_ok = witness_ok && in_node_cone(m.cones().generators(n), witness.per_node[n]);
    r["theta"] = {{"verdict", to_string(rep.verdict())},
                  {"epsilon_star", rat(eps.epsilon)},
                  {"oracle_epsilon", rat(oracle)},
                  {"oracle_witness_verified", witness_ok && member(a, target.flat()).member}};

    const auto strategy = example3_strategy(m);
    bool special = true;
    for (const auto& c : verify_special_decomposition(m, theta, strategy)) special = special && c.holds;
    const auto forced = example3_forced_time_zero(k);
    bool formulas = true;
    for (const auto& [a0, b0] : std::vector<std::pair<Rational, Rational>>{{1, 0}, {2, Rational(1, 3)}, {Rational(1, 2), Rational(1, 7)}}) {
        const auto s = example3_solve_coefficients(k, a0, b0);
        const auto f = example3_coefficient_formulas(k, a0, b0);
        formulas = formulas && s && s->a1 == f.a1 && s->b1 == f.b1;
    }
    r["decomposition"] = {{"legs", nodes_json(strategy)},
                          {"special", special},
                          {"coefficient_formulas", formulas},
                          {"forced_time_zero", forced ? json{rat(forced->first), rat(forced->second)} : json(nullptr)}};

    const auto displaced = displaced_cone(a, theta.flat(), Displacement::Measurable, m.tree(), 0, d);
    json xs = json::array();
    for (unsigned n = 1; n <= N; ++n) {
        xs.push_back({{"n", n}, {"member", member(displaced, example3_x(m, n).flat()).member}});
    }
    Claim psi(d, m.leaf_count());
    for (std::size_t l = 0; l < m.leaf_count(); ++l) psi.set_leaf(l, negated(strategy.per_node[m.tree().leaf_node(l)]));
    const Claim half_e1 = Claim::constant(m.leaf_count(), Vector{Rational(1, 2), Rational(0)});
    r["displaced_cone"] = {{"psi_member", member(displaced, psi.flat()).member},
                           {"x_n", xs},
                           {"closure_arbitrage", member(displaced, half_e1.flat()).member}};

    const auto xi0 = is_maximal(m, m.claim("xi0"), true);
    r["xi0"] = {{"verdict", to_string(xi0.verdict())}};
    if (xi0.certificate) r["xi0"]["certificate"] = process_json(*xi0.certificate);
    return kOk;
}

int failure(json& r, const char* kind, const std::string& msg, int code) {
    r["error"] = {{"kind", kind}, {"message", msg}};
    return code;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact analysis of finite markets with proportional transaction costs", "tcmax"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--dump-cones", g.dump_cones, "Include the attainable-cone generators");
    app.add_flag("--repair-netting", g.repair_netting, "Replace rates by cheapest chains instead of rejecting");
    app.add_flag("--no-timing", g.no_timing, "Omit timing from the report");
    app.set_version_flag("--version", TCMAX_VERSION);

    std::string file, claim, process, decomposition, verify_only, price_zero, k_text = "10";
    bool strict = false, proper = false, support_maximal = false, emit = false, certificates = false;
    unsigned M = 4, N = 4, emm_samples = 3;
    std::vector<unsigned> ns;
    std::size_t budget = kDefaultNodeBudget;

    auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
    auto* arbitrage = app.add_subcommand("arbitrage", "Arbitrage check of the attainable cone");
    auto* cpp = app.add_subcommand("cpp", "Find a consistent price process");
    auto* price = app.add_subcommand("price", "Price a claim under a given process");
    auto* maximal = app.add_subcommand("maximal", "Maximality and proper maximality of a claim");
    auto* decompose = app.add_subcommand("decompose", "Special decomposition of a claim");
    auto* approximate = app.add_subcommand("approximate", "Randomized density sequence of properly maximal claims");
    auto* example3 = app.add_subcommand("example3", "The two-asset example family");
    for (auto* s : {validate, arbitrage, cpp, price, maximal, decompose, approximate}) {
        s->add_option("file", file, "Scenario document")->required();
        s->fallthrough();
    }
    example3->fallthrough();
    cpp->add_flag("--strict", strict);
    cpp->add_option("--price-zero", price_zero, "Claim to price at zero");
    price->add_option("--claim", claim)->required();
    price->add_option("--process", process, "Node vectors (JSON literal or file)")->required();
    price->add_option("--decomposition", decomposition, "Legs (JSON literal or file)");
    price->add_option("--emm-samples", emm_samples, "Sampled martingale measures to cross-check");
    maximal->add_option("--claim", claim)->required();
    maximal->add_flag("--proper", proper);
    decompose->add_option("--claim", claim)->required();
    decompose->add_option("--verify-only", verify_only, "Legs to verify (JSON literal or file)");
    decompose->add_flag("--support-maximal", support_maximal);
    approximate->add_option("--claim", claim)->required();
    approximate->add_option("--M", M, "Randomization branching")->required();
    approximate->add_option("--n", ns, "Truncation indices")->delimiter(',')->required();
    approximate->add_option("--node-budget", budget);
    approximate->add_flag("--certificates", certificates);
    example3->add_option("--k", k_text, "Rate k (rational, >= 1)");
    example3->add_option("--N", N, "Truncation of omega");
    example3->add_flag("--emit-scenario", emit);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << TCMAX_VERSION << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kInvalidInput;
    }

    json r;
    r["tool"] = "tcmax";
    r["version"] = TCMAX_VERSION;
    auto* sub = app.get_subcommands().front();
    r["command"] = sub->get_name();
    const auto start = std::chrono::steady_clock::now();
    int code = kOk;
    try {
        if (sub == example3) {
            const Rational k = parse_rational(k_text);
            if (emit) {
                out << save_scenario(example3_market(k, N)) << "\n";
                return kOk;
            }
            r["parameters"] = {{"k", rat(k)}, {"N", N}};
            code = cmd_example3(k, N, r);
        } else {
            const Market m = load(file, g);
            r["market"] = digest(m);
            if (sub == validate) code = cmd_validate(m, r);
            else if (sub == arbitrage) code = cmd_arbitrage(m, r);
            else if (sub == cpp) code = cmd_cpp(m, strict, price_zero, r);
            else if (sub == price) code = cmd_price(m, claim, process, decomposition, emm_samples, r);
            else if (sub == maximal) code = cmd_maximal(m, claim, proper, r);
            else if (sub == decompose) code = cmd_decompose(m, claim, verify_only, support_maximal, r);
            else if (sub == approximate) code = cmd_approximate(m, claim, M, ns, budget, certificates, r);
            if (g.dump_cones) r["cones"] = cone_dump(m);
        }
    } catch (const SchemaError& e) {
        code = failure(r, "schema", e.what(), kInvalidInput);
    } catch (const ProbabilityError& e) {
        code = failure(r, "probability", e.what(), kInvalidInput);
    } catch (const ValidationError& e) {
        code = failure(r, "validation", e.what(), kInvalidInput);
    } catch (const ParseError& e) {
        code = failure(r, "parse", e.what(), kInvalidInput);
    } catch (const BudgetExceeded& e) {
        code = failure(r, "budget", e.what(), kInvalidInput);
    } catch (const PreconditionError& e) {
        code = failure(r, "precondition", e.what(), kNegative);
    } catch (const std::logic_error& e) {
        code = failure(r, "internal", e.what(), kInternal);
    } catch (const std::exception& e) {
        code = failure(r, "error", e.what(), kInvalidInput);
    }
    r["exit_code"] = code;
    if (!g.no_timing) {
        r["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    }
    if (g.format == "json") out << r.dump(2) << "\n";
    else render_text(r, out, 0);
    return code;
}

} // namespace tcmax::cli
