// Text front end for .pcsp definition files.
#pragma once

#include "pcsp/syntax.hpp"

#include <string>

namespace pcsp {

// Parses a whole file.  Declarations start in column 1; anything indented
// continues the previous declaration.  Throws Diagnostic on the first error.
Definitions parse_definitions(const std::string& text, const std::string& file = "<input>");

// Reads and parses `path`; I/O failures are reported as Diagnostic.
Definitions parse_file(const std::string& path);

}  // namespace pcsp
