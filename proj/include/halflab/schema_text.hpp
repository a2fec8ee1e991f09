#pragma once

#include <string>

#include "halflab/sets.hpp"

namespace halflab {

// Textual schema grammar (canonical forms shown; whitespace between
// tokens is accepted on input, never emitted):
//
//   finite()  finite(3,7)
//   periodic(1,0;0,1)          prefix bits ; period bits
//   periodic(;1,0)             empty prefix
//   not(S)  and(S,S)  or(S,S)
//   seeded(42)
//   intervals(factorial,even)
//   intervals(doubling,odd)
//   intervals(table,even;0,1,2,4,8)
//
// parse_set throws parse_error on malformed text.
Set parse_set(const std::string& text);
std::string format_set(const Set& set);

}  // namespace halflab
