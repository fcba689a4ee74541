#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmod/dsl.hpp"
#include "dmod/jet.hpp"
#include "json.hpp"

namespace dmod {

using Document = nlohmann::ordered_json;

struct RunOptions {
  std::string command;
  std::string kind;  // geometry and vessiot
  std::uint64_t seed = kDefaultSeed;
  int cap = -1;  // completion order cap, negative for the default
  unsigned steps = 3;
  int inverse_cap = 2;
  std::vector<std::pair<std::string, Rational>> set;  // parameter specializations
  std::optional<SystemDecl> candidate;
  std::string builtin;  // name of the builtin the system came from, if any
};

std::vector<std::string> command_names();
// Commands that take no system (geometry, vessiot).
bool command_needs_system(const std::string& command);

// Runs one command; throws dmod::Error subclasses on failure.
Document run_command(const RunOptions& opts, const std::optional<SystemDecl>& decl);

std::string render_text(const Document& doc);
std::string render_json(const Document& doc);

// Exit code for an exception thrown by run_command or the parser:
// 2 for input errors, 1 for computation failures.
int exit_code_for(const std::exception& e);

}  // namespace dmod
