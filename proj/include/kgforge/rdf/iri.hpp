#pragma once

#include <string>
#include <string_view>

namespace kgforge::rdf {

// Percent-encodes every byte outside the RFC 3986 unreserved set
// (ALPHA / DIGIT / "-" / "." / "_" / "~") as %XX with uppercase hex.
std::string percent_encode(std::string_view value);

}  // namespace kgforge::rdf
