// Solves an SDPA sparse-format problem with the built-in interior-point
// method and writes an SDPA-style result file:
//
//   sdpa_internal problem.dat-s result.out
//
// Lets the file-exchange backend run without an external SDPA installation.

#include <Eigen/Dense>
#include <exception>
#include <fstream>
#include <iostream>

#include "semialg/ipm.h"
#include "semialg/sdpa_format.h"

namespace {

const char* phase_of(semialg::SdpStatus status) {
  using semialg::SdpStatus;
  switch (status) {
    case SdpStatus::kOptimal: return "pdOPT";
    case SdpStatus::kNearOptimal: return "pdFEAS";
    case SdpStatus::kInfeasible: return "pFEAS_dINF";
    case SdpStatus::kUnbounded: return "pINF_dFEAS";
    case SdpStatus::kNumericalFailure: return "noINFO";
  }
  return "noINFO";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: sdpa_internal <problem.dat-s> <result.out>\n";
    return 2;
  }
  try {
    std::ifstream in(argv[1]);
    if (!in) {
      std::cerr << "cannot read " << argv[1] << "\n";
      return 2;
    }
    const semialg::SdpaProblem sdpa = semialg::read_sdpa(in);
    const semialg::SdpProblem prob = semialg::from_sdpa(sdpa);
    const semialg::SdpSolution sol = semialg::solve_interior_point(prob, {});

    semialg::SdpaResult res;
    res.phase = phase_of(sol.status);
    // SDPA minimizes c.x with x = -y and maximizes <F0, Y> = -<C, X>.
    res.primal_objective = -sol.dual_objective;
    res.dual_objective = -sol.primal_objective;
    for (double y : sol.dual) res.x.push_back(-y);
    size_t next = 0;
    for (int s : sdpa.block_struct) {
      const int n = s > 0 ? s : -s;
      Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
      if (s > 0) {
        if (next < sol.blocks.size()) y = sol.blocks[next];
        ++next;
      } else {
        for (int i = 0; i < n; ++i, ++next) {
          if (next < sol.blocks.size()) y(i, i) = sol.blocks[next](0, 0);
        }
      }
      res.y_mat.push_back(y);
      res.x_mat.push_back(Eigen::MatrixXd::Zero(n, n));
    }
    // X = sum_i F_i x_i - F_0.
    for (const auto& e : sdpa.entries) {
      const double w = e.matrix == 0 ? -1.0 : (e.matrix - 1 < static_cast<int>(res.x.size())
                                                   ? res.x[e.matrix - 1]
                                                   : 0.0);
      Eigen::MatrixXd& m = res.x_mat[e.block - 1];
      m(e.i - 1, e.j - 1) += w * e.value;
      if (e.i != e.j) m(e.j - 1, e.i - 1) += w * e.value;
    }

    std::ofstream out(argv[2]);
    if (!out) {
      std::cerr << "cannot write " << argv[2] << "\n";
      return 2;
    }
    semialg::write_sdpa_result(res, sdpa.block_struct, out);
    std::cout << "phase.value = " << res.phase << "\n" << sol.message << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sdpa_internal: " << e.what() << "\n";
    return 2;
  }
}
