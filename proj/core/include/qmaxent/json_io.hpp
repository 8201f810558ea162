#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qmaxent/pauli.hpp"

namespace qmaxent {

using ordered_json = nlohmann::ordered_json;

/// Stamped into every document this library writes; bump on breaking
/// changes to the on-disk formats described in docs/schema.md.
inline constexpr int kSchemaVersion = 1;

/// Serializes with insertion-ordered keys and every float printed at 17
/// significant digits, so identical data produces identical bytes and all
/// doubles round-trip exactly. Non-finite numbers serialize as null.
std::string dump_deterministic(const ordered_json& value, int indent = 2);

ordered_json layout_to_json(const SystemLayout& layout);
SystemLayout layout_from_json(const ordered_json& doc,
                              std::size_t dim_cap = kDefaultDimCap);

/// Interchange format for local data (see docs/schema.md): layout, regions,
/// basis as {"site": "letter"} objects, and the target expectations.
ordered_json constraints_to_json(const ConstraintSet& constraints);
ConstraintSet constraints_from_json(const ordered_json& doc);

/// Dense state storage (real and imaginary parts as row-major 2D arrays).
ordered_json state_to_json(const DensityMatrix& state);
DensityMatrix state_from_json(const ordered_json& doc);

} // namespace qmaxent
