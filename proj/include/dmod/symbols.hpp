#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dmod {

using SymbolId = std::uint32_t;

// Process-wide interning of symbol names. Ids are dense and stable for the
// lifetime of the process; the id order is the variable order used by
// polynomial term orders (smaller id ranks higher).
SymbolId intern(std::string_view name);
const std::string& symbol_name(SymbolId id);

}  // namespace dmod
