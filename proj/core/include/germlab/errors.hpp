#pragma once

#include <stdexcept>
#include <string>

namespace germlab {

// Every failure the library can signal deliberately. Codes are stable API:
// callers (and the CLI) switch on them, so additions go at the end.
enum class errc {
  degree_overflow,        // derivative order or monomial degree exceeds the stored jet order
  parity_violation,       // odd-degree data fed into an even-symmetric jet
  oddness_violation,      // substitution into an even jet is not odd
  not_critical,           // nonzero linear part where a critical germ is required
  singular_linear_part,   // linear map expected invertible is not
  singular_block,         // regular Hessian block is singular (tolerance dependent)
  insufficient_jet,       // stored order too low for the requested invariant
  cubic_zero,             // corank-2 cubic form vanishes identically
  cubic_is_cube,          // corank-2 cubic form is a perfect cube (different route applies)
  zero_form,              // corank-2 quartic form vanishes identically
  adaptation_failure,     // no admissible coordinate adaptation over the working field
  precondition_violated,  // jet not in the shape an operation requires
  unsupported_label,      // operation not available for this singularity class
  unknown_label,          // label outside the catalogue
  not_stabilized,         // quotient dimension did not stabilize within the degree budget
  evaluation_failure,     // user evaluator returned a non-finite value
  newton_divergence,      // critical point search failed to converge
  unresolved_cell,        // caustic cell could not be resolved at requested depth
  pairing_failure,        // twin pairing has no consistent assignment
  syntax_error,           // expression text is malformed
  unknown_symbol,         // expression uses an undeclared symbol
  io_error,               // malformed jet/deformation serialization
};

const char* errc_name(errc code) noexcept;

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what_arg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what_arg), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what_arg) {
  throw error(code, what_arg);
}

}  // namespace germlab
