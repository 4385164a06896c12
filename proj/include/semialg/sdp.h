#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "semialg/poly.h"
#include "semialg/sos.h"

namespace semialg {

struct RowCoef {
  int row;
  double coef;
};

/// Symmetric PSD block. Entries are grouped into classes; entry (i, j)
/// contributes `coef * X(i, j)` to every row listed for its class. Class -1
/// marks entries that appear in no constraint.
struct SdpBlock {
  std::string label;
  int dim = 0;
  std::vector<int> entry_class;
  std::vector<std::vector<RowCoef>> class_rows;

  int cls(int i, int j) const { return entry_class[static_cast<size_t>(i) * dim + j]; }
};

/// min  objective . p + sum_j <C_j, X_j>
/// s.t. sum_j <A_rj, X_j> + sum_k B_rk p_k = rhs_r,  X_j PSD,  p free.
struct SdpProblem {
  std::vector<SdpBlock> blocks;
  /// C_j per block; empty means all zero.
  std::vector<Eigen::MatrixXd> block_costs;
  int num_rows = 0;
  std::vector<std::string> row_labels;
  std::vector<double> rhs;
  std::vector<std::string> free_labels;
  /// Column k of B as sparse (row, coefficient) pairs.
  std::vector<std::vector<RowCoef>> free_columns;
  std::vector<double> objective;

  int num_free() const { return static_cast<int>(free_columns.size()); }
  /// Sum over blocks of entries X_j(a, b) * A_rj(a, b), one value per row.
  std::vector<double> apply(const std::vector<Eigen::MatrixXd>& x,
                            const std::vector<double>& p) const;
  /// Constraint matrix entries as (row, block, i, j, value) with i <= j,
  /// where value is the symmetric matrix entry.
  struct Entry {
    int row;
    int block;
    int i;
    int j;
    double value;
  };
  std::vector<Entry> entries() const;
};

/// Assembles an SdpProblem from explicit symmetric matrix entries.
class SdpBuilder {
 public:
  int add_block(std::string label, int dim);
  int add_row(double rhs, std::string label = "");
  int add_free(double objective, std::string label = "");
  /// Adds `value` at (i, j) and (j, i) of constraint row `row`, block `block`.
  void add_entry(int row, int block, int i, int j, double value);
  void add_free_coef(int row, int free, double value);
  SdpProblem build() const;

 private:
  struct Pending {
    int row;
    int block;
    int i;
    int j;
    double value;
  };
  std::vector<std::pair<std::string, int>> blocks_;
  std::vector<double> rhs_;
  std::vector<std::string> row_labels_;
  std::vector<double> objective_;
  std::vector<std::string> free_labels_;
  std::vector<std::vector<RowCoef>> free_columns_;
  std::vector<Pending> entries_;
};

enum class SdpStatus { kOptimal, kNearOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* to_string(SdpStatus status);

enum class Backend { kInternal, kFileExchange };

struct SolverSettings {
  double feas_tol = 1e-8;
  double eig_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 150;
  /// Wall-clock limit in seconds; <= 0 means none.
  double time_limit = 0;
  Backend backend = Backend::kInternal;
  /// Directory for problem and result files of the file-exchange backend.
  std::string exchange_dir;
  /// Command invoked as `<command> <input> <output>`; empty reads the
  /// SEMIALG_INV_SDPA_COMMAND environment variable, then "sdpa".
  std::string exchange_command;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<double> free_values;
  std::vector<double> dual;
  double primal_objective = 0;
  double dual_objective = 0;
  /// max_r |rhs_r - (A(X) + B p)_r|
  double primal_residual = 0;
  double dual_residual = 0;
  double relative_gap = 0;
  double min_eigenvalue = 0;
  double feas_tol = 0;
  double eig_tol = 0;
  int iterations = 0;
  double solve_seconds = 0;
  std::string message;

  bool usable() const {
    return status == SdpStatus::kOptimal || status == SdpStatus::kNearOptimal;
  }
};

/// One Gram block per slot; one equality per monomial of each identity, in
/// graded-lex order; one free variable per coefficient of p.
SdpProblem compile(const SosProgram& sos);

SdpSolution solve(const SdpProblem& prob, const SolverSettings& settings);

/// p from the free variables, in the condition's original coordinates.
FloatPolynomial recover_p(const SdpSolution& sol, const SosProgram& sos);
/// p in the coordinates of the identities.
FloatPolynomial recover_p_scaled(const SdpSolution& sol, const SosProgram& sos);

struct IdentityResidual {
  std::string label;
  double max_abs_residual = 0;
  double relative_residual = 0;
  double lhs_max_coef = 0;
};

struct CertificateReport {
  std::vector<IdentityResidual> identities;
  double max_relative_residual = 0;
  double min_eigenvalue = 0;
  /// Upper bound of l(a, x) - p(a) over the domain implied by identity (A)
  /// and the solution: residual l1 mass weighted by the box plus negative
  /// Gram eigenvalue mass.
  double soundness_bound = 0;
  bool flagged = false;
};

/// Rebuilds both identities as polynomials from the Gram blocks and p.
CertificateReport certify_identity(const SdpSolution& sol, const SosProgram& sos,
                                   double relative_threshold = 1e-6, double eig_tol = 1e-8);

/// Gram polynomial b^T G b over `basis`.
FloatPolynomial gram_polynomial(const UniversePtr& universe, const std::vector<Monomial>& basis,
                                const Eigen::MatrixXd& gram);

}  // namespace semialg
