#pragma once

#include <string>
#include <variant>

#include "nltv/bv_model.hpp"
#include "nltv/slicing_nd.hpp"

namespace nltv {

/// A parsed function description: one-dimensional (evaluated on its own
/// domain) or n-dimensional (carrying its region).
using FunctionSpec = std::variant<BVFunction1D, BVFunctionND>;

/// Parses the JSON text of a function description. Malformed input throws
/// SpecError whose where() is the JSON path of the offending field, or
/// "line L, column C" for syntax errors.
FunctionSpec parse_function_spec(const std::string& text);

/// JSON description that parses back to an equal function.
std::string to_json(const BVFunction1D& f);
std::string to_json(const CantorSpec& spec);

}  // namespace nltv
