#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dmod/builtins.hpp"
#include "dmod/commands.hpp"
#include "dmod/errors.hpp"

namespace {

std::string read_source(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw dmod::PreconditionError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear differential systems: compatibility conditions, duality, Spencer sequences"};
  std::string command;
  std::vector<std::string> args;
  std::string builtin, candidate_path;
  std::vector<std::string> sets;
  bool json = false, list = false;
  dmod::RunOptions opts;

  std::string commands;
  for (const auto& c : dmod::command_names()) commands += (commands.empty() ? "" : ", ") + c;
  app.add_option("command", command, "One of: " + commands);
  app.add_option("args", args, "Kind for geometry/vessiot, then the system file ('-' for stdin)");
  app.add_option("--builtin", builtin, "Built-in system instead of a file");
  app.add_flag("--json", json, "JSON output");
  app.add_option("--seed", opts.seed, "Seed for generic point sampling");
  app.add_option("--cap", opts.cap, "Completion order cap (default 3q + 6)");
  app.add_option("--steps", opts.steps, "Prolongations tried by the formal integrability test");
  app.add_option("--inverse-cap", opts.inverse_cap, "Order cap of the left inverse search (negative skips it)");
  app.add_option("--set", sets, "Parameter specialization NAME=VALUE (repeatable)");
  app.add_option("--candidate", candidate_path, "Candidate parametrization for verify-param (DSL file)");
  app.add_flag("--list-builtins", list, "List built-in systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& b : dmod::builtin_names()) std::cout << b << "\n";
    return 0;
  }
  if (command.empty()) {
    std::cerr << "error: a command is required (" << commands << ")\n";
    return 2;
  }

  try {
    opts.command = command;
    std::size_t next = 0;
    if (!dmod::command_needs_system(command)) {
      if (args.empty()) throw dmod::PreconditionError(command + " needs a structure kind (1.7 .. 1.11)");
      opts.kind = args[next++];
    }
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw dmod::PreconditionError("--set expects NAME=VALUE, got '" + s + "'");
      opts.set.emplace_back(s.substr(0, eq), dmod::parse_rational(s.substr(eq + 1)));
    }
    std::optional<dmod::SystemDecl> decl;
    if (dmod::command_needs_system(command)) {
      if (!builtin.empty()) {
        decl = dmod::builtin_system(builtin);
        opts.builtin = builtin;
      } else {
        decl = dmod::parse_system(read_source(next < args.size() ? args[next++] : "-"));
      }
    }
    if (next < args.size()) throw dmod::PreconditionError("unexpected argument '" + args[next] + "'");
    if (!candidate_path.empty()) opts.candidate = dmod::parse_system(read_source(candidate_path));

    auto doc = dmod::run_command(opts, decl);
    std::cout << (json ? dmod::render_json(doc) : dmod::render_text(doc));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dmod::exit_code_for(e);
  }
}
