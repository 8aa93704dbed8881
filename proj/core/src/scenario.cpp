#include "tcmax/scenario.hpp"

#include "tcmax/errors.hpp"
#include "tcmax/example3.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tcmax {

using nlohmann::json;

namespace {

Rational rational_field(const json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const ParseError& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw SchemaError(where + ": expected a rational string \"p/q\"");
}

std::size_t index_field(const json& j, const std::string& where) {
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)) return j.get<std::size_t>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        std::size_t pos = 0;
        try {
            const auto v = std::stoull(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw SchemaError(where + ": expected a nonnegative integer");
}

std::size_t key_index(const std::string& key, const std::string& where) {
    return index_field(json(key), where + " key \"" + key + "\"");
}

const json& require(const json& obj, const char* key) {
    if (!obj.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
    return obj.at(key);
}

Vector vector_field(const json& j, std::size_t d, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array of " + std::to_string(d) + " rationals");
    if (j.size() != d) throw ValidationError(where + ": expected " + std::to_string(d) + " entries, got " + std::to_string(j.size()));
    Vector v;
    v.reserve(d);
    for (std::size_t i = 0; i < d; ++i) v.push_back(rational_field(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

json rational_json(const Rational& r) { return to_string(r); }

json vector_json(const Vector& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(rational_json(x));
    return a;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
}

Claim claim_from_json(const Market& m, const json& j, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object keyed by leaf id");
    const auto& tree = m.tree();
    Claim c(m.assets(), tree.leaf_count());
    for (const auto& [key, val] : j.items()) {
        const std::size_t node = key_index(key, where);
        if (node >= tree.node_count() || !tree.is_leaf(node)) {
            throw ValidationError(where + ": node " + key + " is not a leaf");
        }
        c.set_leaf(tree.leaf_index(node), vector_field(val, m.assets(), where + "." + key));
    }
    return c;
}

Market build_from_document(const json& doc, NettingPolicy policy) {
    if (!doc.is_object()) throw SchemaError("scenario must be a JSON object");
    if (doc.contains("builder")) {
        const auto& b = doc.at("builder");
        if (!b.is_string() || b.get<std::string>() != "example3") throw SchemaError("unknown builder");
        const Rational k = rational_field(require(doc, "k"), "k");
        const std::size_t n = index_field(require(doc, "N"), "N");
        if (n == 0) throw ValidationError("N must be at least 1");
        return example3_market(k, static_cast<unsigned>(n));
    }
    const std::size_t d = index_field(require(doc, "assets"), "assets");
    const std::size_t horizon = index_field(require(doc, "horizon"), "horizon");
    const auto& nodes = require(doc, "nodes");
    if (!nodes.is_array()) throw SchemaError("nodes: expected an array");
    std::vector<NodeSpec> specs;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (!n.is_object()) throw SchemaError(where + ": expected an object");
        NodeSpec s;
        s.id = index_field(require(n, "id"), where + ".id");
        s.time = static_cast<unsigned>(index_field(require(n, "time"), where + ".time"));
        if (n.contains("parent") && !n.at("parent").is_null()) s.parent = index_field(n.at("parent"), where + ".parent");
        s.probability = rational_field(require(n, "prob"), where + ".prob");
        specs.push_back(std::move(s));
    }
    auto tree = FiltrationTree::build(std::move(specs));
    if (tree.horizon() != horizon) {
        throw ValidationError("horizon is " + std::to_string(horizon) + " but leaves sit at time " + std::to_string(tree.horizon()));
    }

    std::vector<std::optional<NodeConeSpec>> cones(tree.node_count());
    if (doc.contains("bidask")) {
        const auto& ba = doc.at("bidask");
        if (!ba.is_object()) throw SchemaError("bidask: expected an object keyed by node id");
        for (const auto& [key, mat] : ba.items()) {
            const std::size_t node = key_index(key, "bidask");
            if (node >= tree.node_count()) throw ValidationError("bidask: unknown node " + key);
            if (!mat.is_array() || mat.size() != d) throw ValidationError("bidask." + key + ": expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
            BidAskMatrix pi;
            for (std::size_t i = 0; i < d; ++i) pi.push_back(vector_field(mat[i], d, "bidask." + key + "[" + std::to_string(i) + "]"));
            cones[node] = NodeConeSpec(std::move(pi));
        }
    }
    if (doc.contains("generators")) {
        const auto& gs = doc.at("generators");
        if (!gs.is_object()) throw SchemaError("generators: expected an object keyed by node id");
        for (const auto& [key, list] : gs.items()) {
            const std::size_t node = key_index(key, "generators");
            if (node >= tree.node_count()) throw ValidationError("generators: unknown node " + key);
            if (cones[node]) throw ValidationError("node " + key + " has both a bid-ask matrix and generators");
            if (!list.is_array()) throw SchemaError("generators." + key + ": expected a list of vectors");
            std::vector<Vector> gens;
            for (std::size_t i = 0; i < list.size(); ++i) gens.push_back(vector_field(list[i], d, "generators." + key + "[" + std::to_string(i) + "]"));
            cones[node] = GeneratorList{std::move(gens)};
        }
    }
    std::vector<NodeConeSpec> specs_out;
    for (std::size_t n = 0; n < cones.size(); ++n) {
        if (!cones[n]) throw ValidationError("node " + std::to_string(n) + " has neither a bid-ask matrix nor generators");
        specs_out.push_back(std::move(*cones[n]));
    }

    // Claims need the market shape; build without them first.
    auto market = Market::build(d, std::move(tree), std::move(specs_out), {}, policy);
    if (doc.contains("claims")) {
        const auto& cl = doc.at("claims");
        if (!cl.is_object()) throw SchemaError("claims: expected an object keyed by name");
        for (const auto& [name, val] : cl.items()) market = market.with_claim(name, claim_from_json(market, val, "claims." + name));
    }
    return market;
}

} // namespace

Market load_scenario(std::string_view text, NettingPolicy policy) {
    return build_from_document(parse_json(text), policy);
}

Market load_scenario_file(const std::filesystem::path& path, NettingPolicy policy) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open scenario file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str(), policy);
}

std::string save_scenario(const Market& m, int indent) {
    const auto& tree = m.tree();
    json doc;
    doc["assets"] = m.assets();
    doc["horizon"] = tree.horizon();
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
        json o;
        o["id"] = n.id;
        o["time"] = n.time;
        o["parent"] = n.parent ? json(*n.parent) : json(nullptr);
        o["prob"] = rational_json(n.probability);
        nodes.push_back(std::move(o));
    }
    doc["nodes"] = std::move(nodes);
    json bidask = json::object();
    json generators = json::object();
    for (std::size_t n = 0; n < m.cone_specs().size(); ++n) {
        const auto& spec = m.cone_specs()[n];
        if (const auto* pi = std::get_if<BidAskMatrix>(&spec)) {
            json mat = json::array();
            for (const auto& row : *pi) mat.push_back(vector_json(row));
            bidask[std::to_string(n)] = std::move(mat);
        } else {
            json list = json::array();
            for (const auto& g : std::get<GeneratorList>(spec).generators) list.push_back(vector_json(g));
            generators[std::to_string(n)] = std::move(list);
        }
    }
    if (!bidask.empty()) doc["bidask"] = std::move(bidask);
    if (!generators.empty()) doc["generators"] = std::move(generators);
    if (!m.claims().empty()) {
        json claims = json::object();
        for (const auto& [name, c] : m.claims()) {
            json o = json::object();
            for (std::size_t l = 0; l < c.leaves(); ++l) {
                o[std::to_string(tree.leaf_node(l))] = vector_json(Vector(c.leaf(l).begin(), c.leaf(l).end()));
            }
            claims[name] = std::move(o);
        }
        doc["claims"] = std::move(claims);
    }
    return doc.dump(indent);
}

Claim resolve_claim(const Market& m, std::string_view name_or_literal) {
    const auto trimmed = name_or_literal.substr(name_or_literal.find_first_not_of(" \t\n") == std::string_view::npos
                                                     ? 0
                                                     : name_or_literal.find_first_not_of(" \t\n"));
    if (!trimmed.empty() && trimmed.front() == '{') return claim_from_json(m, parse_json(trimmed), "claim literal");
    const std::string name(name_or_literal);
    try {
        return m.claim(name);
    } catch (const std::out_of_range&) {
        throw ValidationError("unknown claim \"" + name + "\"");
    }
}

NodeVectors parse_node_vectors(const Market& m, std::string_view json_text) {
    const auto j = parse_json(json_text);
    if (!j.is_object()) throw SchemaError("node vectors: expected an object keyed by node id");
    NodeVectors out;
    out.per_node.assign(m.tree().node_count(), Vector(m.assets(), Rational(0)));
    for (const auto& [key, val] : j.items()) {
        const std::size_t node = key_index(key, "node vectors");
        if (node >= out.per_node.size()) throw ValidationError("node vectors: unknown node " + key);
        out.per_node[node] = vector_field(val, m.assets(), "node vectors." + key);
    }
    return out;
}

std::string node_vectors_to_json(const NodeVectors& v, int indent) {
    json o = json::object();
    for (std::size_t n = 0; n < v.per_node.size(); ++n) o[std::to_string(n)] = vector_json(v.per_node[n]);
    return o.dump(indent);
}

bool operator==(const Market& a, const Market& b) {
    if (a.assets() != b.assets() || a.cone_specs() != b.cone_specs() || a.claims() != b.claims()) return false;
    const auto sa = a.tree().specs();
    const auto sb = b.tree().specs();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].id != sb[i].id || sa[i].time != sb[i].time || sa[i].parent != sb[i].parent || sa[i].probability != sb[i].probability) {
            return false;
        }
    }
    return true;
}

} // namespace tcmax
