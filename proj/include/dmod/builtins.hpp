#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmod/dsl.hpp"
#include "dmod/geometry.hpp"

namespace dmod {

std::vector<std::string> builtin_names();
// Throws PreconditionError for an unknown name.
SystemDecl builtin_system(const std::string& name);
// Known parametrization for verify-param, if the instance has one.
std::optional<OperatorMatrix> builtin_candidate(const std::string& name, const ContextPtr& ctx);

// Default data for the structures of the geometry and vessiot commands.
struct StructureInstance {
  StructureKind kind;
  ContextPtr ctx;
  std::vector<std::pair<std::string, StructureData>> choices;  // label, data
};
StructureInstance structure_instance(StructureKind kind);

}  // namespace dmod
