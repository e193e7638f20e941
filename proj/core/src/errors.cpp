#include "germlab/errors.hpp"

namespace germlab {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::degree_overflow: return "DegreeOverflow";
    case errc::parity_violation: return "ParityViolation";
    case errc::oddness_violation: return "OddnessViolation";
    case errc::not_critical: return "NotCritical";
    case errc::singular_linear_part: return "SingularLinearPart";
    case errc::singular_block: return "SingularBlock";
    case errc::insufficient_jet: return "InsufficientJet";
    case errc::cubic_zero: return "CubicZero";
    case errc::cubic_is_cube: return "CubicIsCube";
    case errc::zero_form: return "ZeroForm";
    case errc::adaptation_failure: return "AdaptationFailure";
    case errc::precondition_violated: return "PreconditionViolated";
    case errc::unsupported_label: return "UnsupportedLabel";
    case errc::unknown_label: return "UnknownLabel";
    case errc::not_stabilized: return "NotStabilized";
    case errc::evaluation_failure: return "EvaluationFailure";
    case errc::newton_divergence: return "NewtonDivergence";
    case errc::unresolved_cell: return "UnresolvedCell";
    case errc::pairing_failure: return "PairingFailure";
    case errc::syntax_error: return "SyntaxError";
    case errc::unknown_symbol: return "UnknownSymbol";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace germlab
