// Invariant suites over one solved model, shared by the validate command and
// the acceptance gate. Every check computes a residual and compares it to a
// bound pinned here in code; suites group the checks by subject:
//
//   elliptic        quasi-periodicity of theta, Z, wp; wp = -Z'
//   uniformization  lattice invariance of x, y and derivatives; pole scales
//   endpoints       counts, the four sum constraints, polish quality
//   modelmap        coupling roundtrip, unit normalization, node doubling
//   wronskian       xdot y' - ydot x' = wp(s - u) pointwise
//   variations      analytic parameter slopes vs re-solve finite differences
//   correction      Y1 ellipticity, regularity, endpoint Laurent data,
//                   sheet-pair cross-check, F1 translation-gauge invariance
//   flow            dF1/deps against the flow form (-2 i pi / tau) Gamma1
//   du              normalization and boundedness of the eps-derivative of
//                   y dx at fixed x
//   pairing         the residue pairing of -Y1 against coupling derivatives
//                   of F1 with its single fitted global constant

#ifndef SPECCURVE_CHECKS_HPP
#define SPECCURVE_CHECKS_HPP

#include <string>
#include <vector>

#include "speccurve/modelmap.hpp"
#include "speccurve/torusmap.hpp"

namespace speccurve {

struct CheckResult {
  std::string name;
  double value;  // measured residual, absolute or relative per check
  double bound;
  bool pass;
};

// One solved model and the knobs the checks need. `params` must already
// solve `model` (the modelmap suite is what certifies that).
struct CheckContext {
  ModelSpec model;
  UniformParams params;
  EndpointSet endpoints;
  QuadratureSpec quad;
  double fd_step = 1e-4;
};

CheckContext make_context(const ModelSpec& m, const UniformParams& solved,
                          const QuadratureSpec& q, double fd_step = 1e-4);

// Suite names in the canonical run order.
const std::vector<std::string>& suite_names();

// Runs one suite; BadConfig for an unknown name. Individual checks never
// throw on a failed bound (they report pass = false); genuine evaluation
// breakdowns propagate as the usual typed errors.
std::vector<CheckResult> run_suite(const std::string& name,
                                   const CheckContext& ctx);

}  // namespace speccurve

#endif
