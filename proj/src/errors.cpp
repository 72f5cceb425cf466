#include "batopt/errors.hpp"

namespace batopt {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

EvaluationError::EvaluationError(const std::string& what, std::size_t first_var,
                                 std::size_t last_var)
    : Error(what + " (variables " + std::to_string(first_var) + ".." +
            std::to_string(last_var) + ")"),
      first_(first_var),
      last_(last_var) {}

}  // namespace batopt
