#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "semialg/sdp.h"

namespace semialg {

/// Problem in SDPA sparse format (.dat-s):
///   min c.x  s.t.  sum_i F_i x_i - F_0 PSD,
/// whose dual is
///   max <F_0, Y>  s.t.  <F_i, Y> = c_i,  Y PSD.
/// Negative block sizes denote diagonal blocks.
struct SdpaProblem {
  struct Entry {
    int matrix;
    int block;
    int i;
    int j;
    double value;
  };
  int num_constraints = 0;
  std::vector<int> block_struct;
  std::vector<double> c;
  std::vector<Entry> entries;
};

/// Our form maps onto the SDPA dual: Y holds the Gram blocks plus one final
/// diagonal block of size 2k carrying p = v+ - v-, c is the right-hand side,
/// and F_0 carries -objective.
SdpaProblem to_sdpa(const SdpProblem& prob);
void write_sdpa(const SdpaProblem& sdpa, std::ostream& out);
SdpaProblem read_sdpa(std::istream& in);

/// SDPA dual as an SdpProblem without free variables; diagonal blocks become
/// 1x1 blocks.
SdpProblem from_sdpa(const SdpaProblem& sdpa);

/// Result file of an SDPA-compatible solver.
struct SdpaResult {
  std::string phase;
  double primal_objective = 0;
  double dual_objective = 0;
  std::vector<double> x;
  /// Blocks of X = sum F_i x_i - F_0 and of Y; diagonal blocks are stored as
  /// diagonal matrices.
  std::vector<Eigen::MatrixXd> x_mat;
  std::vector<Eigen::MatrixXd> y_mat;
};

void write_sdpa_result(const SdpaResult& result, const std::vector<int>& block_struct,
                       std::ostream& out);
SdpaResult read_sdpa_result(std::istream& in, const std::vector<int>& block_struct);

/// Writes `prob` to a .dat-s file, runs the external command and reads the
/// result back.
SdpSolution solve_file_exchange(const SdpProblem& prob, const SolverSettings& settings);

/// Residuals, objectives and eigenvalues of a candidate solution.
void evaluate_solution(const SdpProblem& prob, SdpSolution& sol);

}  // namespace semialg
