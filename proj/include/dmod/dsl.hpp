#pragma once

#include <string>
#include <vector>

#include "dmod/errors.hpp"
#include "dmod/operator.hpp"

namespace dmod {

// Input error with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(unsigned line, unsigned column, const std::string& msg);
  unsigned line() const { return line_; }
  unsigned column() const { return column_; }

 private:
  unsigned line_;
  unsigned column_;
};

struct ParamDecl {
  std::string name;
  unsigned order = 8;
  std::string by;  // variable the jets are taken along
  bool constant = false;
  bool operator==(const ParamDecl&) const = default;
};

// A linear homogeneous system: one operator row per equation, one column per unknown.
struct SystemDecl {
  std::string name;
  std::vector<std::string> vars;
  std::vector<ParamDecl> params;
  std::vector<std::string> unknowns;
  ContextPtr ctx;
  OperatorMatrix op;
};

// system NAME vars NAME+ [params (NAME ":" ("order" INT "by" NAME | "const"))+]
// unknowns NAME+ ("eq" [NAME ":"] expr ["=" expr])+
// Derivatives are written d[i,j,...](expr); '#' starts a comment.
SystemDecl parse_system(const std::string& text);
std::string render_system(const SystemDecl& decl);

// Declaration for an operator built in code; unknowns are the column labels.
SystemDecl decl_from_operator(const std::string& name, const OperatorMatrix& op);

// Same declarations and the same operator rows and labels.
bool equivalent(const SystemDecl& a, const SystemDecl& b);

}  // namespace dmod
