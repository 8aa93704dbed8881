#pragma once

#include "tcmax/market.hpp"

#include <filesystem>
#include <string_view>

namespace tcmax {

/// Parses a scenario document (JSON). A document of the form
/// {"builder": "example3", "k": "10", "N": 4} expands to the built-in family.
/// Throws SchemaError, ValidationError or ProbabilityError.
Market load_scenario(std::string_view text, NettingPolicy policy = NettingPolicy::Reject);

Market load_scenario_file(const std::filesystem::path& path, NettingPolicy policy = NettingPolicy::Reject);

/// Canonical JSON rendering (rationals as "p/q" strings). Reloading yields an equal market.
std::string save_scenario(const Market& m, int indent = 2);

/// A claim given either by name (including "zero") or as an inline JSON
/// object {"leaf-id": [d rationals], ...}; leaves not listed are zero.
Claim resolve_claim(const Market& m, std::string_view name_or_literal);

/// Per-node vectors from JSON {"node-id": [d rationals]}; nodes not listed are zero.
NodeVectors parse_node_vectors(const Market& m, std::string_view json_text);

std::string node_vectors_to_json(const NodeVectors& v, int indent = -1);

bool operator==(const Market& a, const Market& b);

} // namespace tcmax
