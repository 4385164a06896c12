#pragma once

#include "semialg/sdp.h"

namespace semialg {

/// Infeasible-start primal-dual path-following method with the HKM search
/// direction and Mehrotra predictor-corrector steps. Free variables are
/// eliminated through a Schur complement on their constraint columns.
SdpSolution solve_interior_point(const SdpProblem& prob, const SolverSettings& settings);

}  // namespace semialg
