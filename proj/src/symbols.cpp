#include "dmod/symbols.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

#include "dmod/rational.hpp"
#include "dmod/errors.hpp"

namespace dmod {
namespace {

struct Registry {
  std::mutex mutex;
  std::deque<std::string> names;
  std::unordered_map<std::string, SymbolId> ids;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

SymbolId intern(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.ids.find(std::string(name));
  if (it != r.ids.end()) return it->second;
  auto id = static_cast<SymbolId>(r.names.size());
  r.names.emplace_back(name);
  r.ids.emplace(r.names.back(), id);
  return id;
}

const std::string& symbol_name(SymbolId id) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.names.at(id);
}

std::string to_string(const Rational& r) { return r.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw Error("malformed rational '" + s + "'");
    r.canonicalize();
    if (r.get_den() == 0) throw DivisionByZero();
    return r;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::string den = "1" + std::string(s.size() - dot - 1, '0');
  Rational r;
  if (r.set_str(digits + "/" + den, 10) != 0) throw Error("malformed rational '" + s + "'");
  r.canonicalize();
  return r;
}

}  // namespace dmod
