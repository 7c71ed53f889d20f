// Typed runtime errors shared by all speccurve modules.

#ifndef SPECCURVE_ERRORS_HPP
#define SPECCURVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace speccurve {

enum class errc {
  pole_proximity,
  modulus_degenerate,
  series_not_converged,
  quadrature_not_converged,
  contour_too_tight,
  path_blocked,
  jacobian_singular,
  max_iterations,
  left_domain,
  endpoint_count_mismatch,
  collision_detected,
  non_convergence,
  seed_escaped,
  degenerate_endpoint,
  step_too_large,
  radius_invalid,
  inconsistent_radii,
  zero_leading_coefficient,
  theta_zero_hit,
  bad_config,
  io_error,
  internal_check
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::pole_proximity:          return "PoleProximity";
    case errc::modulus_degenerate:      return "ModulusDegenerate";
    case errc::series_not_converged:    return "SeriesNotConverged";
    case errc::quadrature_not_converged:return "QuadratureNotConverged";
    case errc::contour_too_tight:       return "ContourTooTight";
    case errc::path_blocked:            return "PathBlocked";
    case errc::jacobian_singular:       return "JacobianSingular";
    case errc::max_iterations:          return "MaxIterations";
    case errc::left_domain:             return "LeftDomain";
    case errc::endpoint_count_mismatch: return "EndpointCountMismatch";
    case errc::collision_detected:      return "CollisionDetected";
    case errc::non_convergence:         return "NonConvergence";
    case errc::seed_escaped:            return "SeedEscaped";
    case errc::degenerate_endpoint:     return "DegenerateEndpoint";
    case errc::step_too_large:          return "StepTooLarge";
    case errc::radius_invalid:          return "RadiusInvalid";
    case errc::inconsistent_radii:      return "InconsistentRadii";
    case errc::zero_leading_coefficient:return "ZeroLeadingCoefficient";
    case errc::theta_zero_hit:          return "ThetaZeroHit";
    case errc::bad_config:              return "BadConfig";
    case errc::io_error:                return "IoError";
    case errc::internal_check:          return "InternalCheck";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string("[") + errc_name(code) + "] " + msg),
        code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace speccurve

#endif
