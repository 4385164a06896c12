#include "semialg/sdp.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "semialg/errors.h"
#include "semialg/ipm.h"
#include "semialg/sdpa_format.h"

namespace semialg {

namespace {

using RowIndex = std::map<Monomial, int, GradedLess>;

double monomial_bound(const Monomial& m, const std::vector<double>& bounds) {
  double v = 1;
  for (int i = 0; i < m.size(); ++i) {
    if (m[i] > 0) v *= std::pow(bounds[i], m[i]);
  }
  return v;
}

}  // namespace

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::kOptimal:
      return "optimal";
    case SdpStatus::kNearOptimal:
      return "near_optimal";
    case SdpStatus::kInfeasible:
      return "infeasible";
    case SdpStatus::kUnbounded:
      return "unbounded";
    case SdpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

std::vector<double> SdpProblem::apply(const std::vector<Eigen::MatrixXd>& x,
                                      const std::vector<double>& p) const {
  std::vector<double> out(num_rows, 0.0);
  for (size_t j = 0; j < blocks.size(); ++j) {
    const SdpBlock& blk = blocks[j];
    std::vector<double> acc(blk.class_rows.size(), 0.0);
    for (int a = 0; a < blk.dim; ++a) {
      for (int b = 0; b < blk.dim; ++b) {
        const int c = blk.cls(a, b);
        if (c >= 0) acc[c] += x[j](a, b);
      }
    }
    for (size_t c = 0; c < acc.size(); ++c) {
      for (const auto& rc : blk.class_rows[c]) out[rc.row] += rc.coef * acc[c];
    }
  }
  for (int k = 0; k < num_free(); ++k) {
    for (const auto& rc : free_columns[k]) out[rc.row] += rc.coef * p[k];
  }
  return out;
}

std::vector<SdpProblem::Entry> SdpProblem::entries() const {
  std::vector<Entry> out;
  for (size_t j = 0; j < blocks.size(); ++j) {
    const SdpBlock& blk = blocks[j];
    for (int a = 0; a < blk.dim; ++a) {
      for (int b = a; b < blk.dim; ++b) {
        const int c = blk.cls(a, b);
        if (c < 0) continue;
        for (const auto& rc : blk.class_rows[c]) {
          if (rc.coef != 0) out.push_back({rc.row, static_cast<int>(j), a, b, rc.coef});
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.row, x.block, x.i, x.j) < std::tie(y.row, y.block, y.i, y.j);
  });
  return out;
}

int SdpBuilder::add_block(std::string label, int dim) {
  if (dim < 1) throw UsageError("block dimension must be positive");
  blocks_.push_back({std::move(label), dim});
  return static_cast<int>(blocks_.size()) - 1;
}

int SdpBuilder::add_row(double rhs, std::string label) {
  rhs_.push_back(rhs);
  row_labels_.push_back(std::move(label));
  return static_cast<int>(rhs_.size()) - 1;
}

int SdpBuilder::add_free(double objective, std::string label) {
  objective_.push_back(objective);
  free_labels_.push_back(std::move(label));
  free_columns_.emplace_back();
  return static_cast<int>(objective_.size()) - 1;
}

void SdpBuilder::add_entry(int row, int block, int i, int j, double value) {
  if (row < 0 || row >= static_cast<int>(rhs_.size())) throw UsageError("row out of range");
  if (block < 0 || block >= static_cast<int>(blocks_.size())) throw UsageError("block out of range");
  const int n = blocks_[block].second;
  if (i < 0 || j < 0 || i >= n || j >= n) throw UsageError("entry out of range");
  entries_.push_back({row, block, std::min(i, j), std::max(i, j), value});
}

void SdpBuilder::add_free_coef(int row, int free, double value) {
  if (row < 0 || row >= static_cast<int>(rhs_.size())) throw UsageError("row out of range");
  if (free < 0 || free >= static_cast<int>(free_columns_.size())) {
    throw UsageError("free variable out of range");
  }
  free_columns_[free].push_back({row, value});
}

SdpProblem SdpBuilder::build() const {
  SdpProblem prob;
  prob.num_rows = static_cast<int>(rhs_.size());
  prob.rhs = rhs_;
  prob.row_labels = row_labels_;
  prob.objective = objective_;
  prob.free_labels = free_labels_;
  prob.free_columns = free_columns_;
  for (const auto& [label, dim] : blocks_) {
    SdpBlock blk;
    blk.label = label;
    blk.dim = dim;
    blk.entry_class.assign(static_cast<size_t>(dim) * dim, -1);
    prob.blocks.push_back(std::move(blk));
  }
  std::vector<std::map<std::pair<int, int>, std::map<int, double>>> acc(blocks_.size());
  for (const auto& e : entries_) acc[e.block][{e.i, e.j}][e.row] += e.value;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    SdpBlock& blk = prob.blocks[b];
    for (const auto& [ij, rows] : acc[b]) {
      const int c = static_cast<int>(blk.class_rows.size());
      blk.class_rows.emplace_back();
      for (const auto& [row, v] : rows) blk.class_rows.back().push_back({row, v});
      blk.entry_class[static_cast<size_t>(ij.first) * blk.dim + ij.second] = c;
      blk.entry_class[static_cast<size_t>(ij.second) * blk.dim + ij.first] = c;
    }
  }
  return prob;
}

SdpProblem compile(const SosProgram& sos) {
  SdpProblem prob;
  const int num_ids = static_cast<int>(sos.identities.size());
  std::vector<RowIndex> rows(num_ids);
  for (int id = 0; id < num_ids; ++id) {
    std::set<Monomial, GradedLess> monos;
    for (const Monomial& m : sos.p_basis) monos.insert(m);
    for (const auto& [m, c] : sos.identities[id].offset.terms()) monos.insert(m);
    for (const GramSlot& slot : sos.slots) {
      if (slot.identity != id) continue;
      std::set<Monomial, GradedLess> gram;
      for (size_t i = 0; i < slot.basis.size(); ++i) {
        for (size_t j = i; j < slot.basis.size(); ++j) gram.insert(slot.basis[i] * slot.basis[j]);
      }
      for (const Monomial& g : gram) {
        for (const auto& [m, c] : slot.multiplier.terms()) monos.insert(g * m);
      }
    }
    for (const Monomial& m : monos) {
      const int r = prob.num_rows++;
      rows[id].emplace(m, r);
      prob.row_labels.push_back(sos.identities[id].label + ":" +
                                FloatPolynomial::term(sos.universe, m, 1.0).to_string());
      prob.rhs.push_back(sos.identities[id].offset.coefficient(m));
    }
  }
  for (const GramSlot& slot : sos.slots) {
    SdpBlock blk;
    blk.label = slot.label;
    blk.dim = static_cast<int>(slot.basis.size());
    blk.entry_class.assign(static_cast<size_t>(blk.dim) * blk.dim, -1);
    std::map<Monomial, int, GradedLess> class_of;
    for (int i = 0; i < blk.dim; ++i) {
      for (int j = 0; j < blk.dim; ++j) {
        const Monomial g = slot.basis[i] * slot.basis[j];
        auto it = class_of.find(g);
        if (it == class_of.end()) {
          it = class_of.emplace(g, static_cast<int>(blk.class_rows.size())).first;
          blk.class_rows.emplace_back();
          for (const auto& [m, c] : slot.multiplier.terms()) {
            blk.class_rows.back().push_back({rows[slot.identity].at(g * m), c});
          }
        }
        blk.entry_class[static_cast<size_t>(i) * blk.dim + j] = it->second;
      }
    }
    prob.blocks.push_back(std::move(blk));
  }
  for (size_t k = 0; k < sos.p_basis.size(); ++k) {
    const Monomial& m = sos.p_basis[k];
    std::vector<RowCoef> col;
    for (int id = 0; id < num_ids; ++id) col.push_back({rows[id].at(m), -1.0});
    prob.free_columns.push_back(std::move(col));
    prob.free_labels.push_back("p:" + FloatPolynomial::term(sos.universe, m, 1.0).to_string());
    prob.objective.push_back(sos.objective[k]);
  }
  return prob;
}

SdpSolution solve(const SdpProblem& prob, const SolverSettings& settings) {
  switch (settings.backend) {
    case Backend::kInternal:
      return solve_interior_point(prob, settings);
    case Backend::kFileExchange:
      return solve_file_exchange(prob, settings);
  }
  throw UsageError("unknown backend");
}

FloatPolynomial recover_p_scaled(const SdpSolution& sol, const SosProgram& sos) {
  if (sol.free_values.size() != sos.p_basis.size()) {
    throw UsageError("solution does not match the program");
  }
  return from_coeff_vector(sos.universe, sos.p_basis, sol.free_values);
}

FloatPolynomial recover_p(const SdpSolution& sol, const SosProgram& sos) {
  return sos.back_map.to_original(recover_p_scaled(sol, sos));
}

FloatPolynomial gram_polynomial(const UniversePtr& universe, const std::vector<Monomial>& basis,
                                const Eigen::MatrixXd& gram) {
  std::map<Monomial, double, GradedLess> acc;
  const int n = static_cast<int>(basis.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) acc[basis[i] * basis[j]] += 0.5 * (gram(i, j) + gram(j, i));
  }
  FloatPolynomial out(universe);
  for (const auto& [m, c] : acc) out.add_term(m, c);
  return out;
}

CertificateReport certify_identity(const SdpSolution& sol, const SosProgram& sos,
                                   double relative_threshold, double eig_tol) {
  if (sol.blocks.size() != sos.slots.size()) throw UsageError("solution does not match the program");
  CertificateReport report;
  const FloatPolynomial p = recover_p_scaled(sol, sos);
  std::vector<double> bounds(sos.universe->size(), 0.0);
  for (int i = 0; i < sos.universe->size(); ++i) {
    const Interval& iv = sos.coordinate_box[i];
    bounds[i] = rational_to_double(std::max(abs(iv.lo), abs(iv.hi)));
  }
  report.min_eigenvalue = INFINITY;
  std::vector<double> slot_lmin(sos.slots.size(), 0.0);
  for (size_t s = 0; s < sos.slots.size(); ++s) {
    const Eigen::MatrixXd g = 0.5 * (sol.blocks[s] + sol.blocks[s].transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
    slot_lmin[s] = eig.eigenvalues()(0);
    report.min_eigenvalue = std::min(report.min_eigenvalue, slot_lmin[s]);
  }
  if (!std::isfinite(report.min_eigenvalue)) report.min_eigenvalue = 0;

  for (size_t id = 0; id < sos.identities.size(); ++id) {
    const SosIdentity& ident = sos.identities[id];
    const FloatPolynomial lhs = p + ident.offset;
    FloatPolynomial rhs(sos.universe);
    double eig_mass = 0;
    for (size_t s = 0; s < sos.slots.size(); ++s) {
      const GramSlot& slot = sos.slots[s];
      if (slot.identity != static_cast<int>(id)) continue;
      rhs += slot.multiplier * gram_polynomial(sos.universe, slot.basis, sol.blocks[s]);
      if (slot_lmin[s] < 0) {
        double basis_mass = 0;
        for (const Monomial& b : slot.basis) basis_mass += std::pow(monomial_bound(b, bounds), 2);
        double mult_mass = 0;
        for (const auto& [m, c] : slot.multiplier.terms()) {
          mult_mass += std::fabs(c) * monomial_bound(m, bounds);
        }
        eig_mass += -slot_lmin[s] * basis_mass * mult_mass;
      }
    }
    const FloatPolynomial residual = lhs - rhs;
    IdentityResidual ir;
    ir.label = ident.label;
    double weighted = 0;
    for (const auto& [m, c] : residual.terms()) {
      ir.max_abs_residual = std::max(ir.max_abs_residual, std::fabs(c));
      weighted += std::fabs(c) * monomial_bound(m, bounds);
    }
    for (const auto& [m, c] : lhs.terms()) ir.lhs_max_coef = std::max(ir.lhs_max_coef, std::fabs(c));
    ir.relative_residual = ir.max_abs_residual / (1.0 + ir.lhs_max_coef);
    report.max_relative_residual = std::max(report.max_relative_residual, ir.relative_residual);
    if (id == 0) report.soundness_bound = weighted + eig_mass;
    report.identities.push_back(ir);
  }
  report.flagged =
      report.max_relative_residual > relative_threshold || report.min_eigenvalue < -eig_tol;
  return report;
}

}  // namespace semialg
