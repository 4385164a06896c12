#include "semialg/ipm.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace semialg {

namespace {

constexpr double kNearFeasTol = 1e-6;
constexpr int kProgressWindow = 15;

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Largest step t with M + t * D positive semidefinite (capped at `cap`).
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& d, double cap = 1e30) {
  const auto& l = chol.matrixL();
  MatrixXd s = l.solve(d);
  s = l.solve(s.transpose()).transpose();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  if (lmin >= 0) return cap;
  return std::min(cap, -1.0 / lmin);
}

double frob_inner(const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).sum(); }

class InteriorPoint {
 public:
  InteriorPoint(const SdpProblem& prob, const SolverSettings& settings)
      : prob_(prob), settings_(settings) {}

  SdpSolution run();

 private:
  bool presolve(SdpSolution& sol);
  void setup_components();
  void initial_point();
  std::vector<double> apply_a(const std::vector<MatrixXd>& y) const;
  void apply_a_block(int j, const MatrixXd& y, std::vector<double>& out) const;
  MatrixXd apply_at_block(int j, const std::vector<double>& y) const;
  void residuals();
  bool factor();
  // Solves M dy + B dp = h, B^T dy = g.
  void solve_newton(const std::vector<double>& h, const std::vector<double>& g,
                    std::vector<double>& dy, std::vector<double>& dp) const;
  // M dy applied through the blocks, without the formed Schur complement.
  std::vector<double> apply_schur(const std::vector<double>& dy) const;
  void schur_block(int j, const MatrixXd& zi, MatrixXd& m);
  void fill_solution(SdpSolution& sol) const;

  const SdpProblem& prob_;
  const SolverSettings& settings_;

  int nb_ = 0;
  int total_dim_ = 0;
  std::vector<bool> row_active_;
  std::vector<bool> free_active_;
  std::vector<int> comp_of_row_;
  std::vector<int> local_row_;
  std::vector<int> comp_of_block_;
  std::vector<std::vector<int>> comp_rows_;
  std::vector<MatrixXd> comp_b_;  // dense B restricted to the component rows

  std::vector<MatrixXd> x_, z_, zi_;
  std::vector<Eigen::LLT<MatrixXd>> x_chol_, z_chol_;
  std::vector<double> y_, p_;

  std::vector<double> rp_, rf_;
  std::vector<MatrixXd> rd_;
  double pobj_ = 0, dobj_ = 0, gap_ = 0, mu_ = 0;
  double pinf_ = 0, dinf_ = 0, relgap_ = 0;
  double rhs_norm_ = 0, obj_norm_ = 0;

  std::vector<Eigen::LLT<MatrixXd>> m_chol_;
  std::vector<MatrixXd> w_;  // M_c^-1 B_c
  Eigen::LDLT<MatrixXd> k_ldlt_;
  std::vector<double> schur_buffer_;
  Stopwatch started_;
  bool timed_out_ = false;
  bool trace_ = std::getenv("SEMIALG_INV_IPM_TRACE") != nullptr;
};

bool InteriorPoint::presolve(SdpSolution& sol) {
  const int m = prob_.num_rows;
  row_active_.assign(m, false);
  for (const auto& blk : prob_.blocks) {
    for (const auto& rows : blk.class_rows) {
      for (const auto& rc : rows) {
        if (rc.coef != 0) row_active_[rc.row] = true;
      }
    }
  }
  free_active_.assign(prob_.num_free(), false);
  for (int k = 0; k < prob_.num_free(); ++k) {
    for (const auto& rc : prob_.free_columns[k]) {
      if (rc.coef != 0) {
        free_active_[k] = true;
        row_active_[rc.row] = true;
      }
    }
    if (!free_active_[k] && prob_.objective[k] != 0) {
      sol.status = SdpStatus::kUnbounded;
      sol.message = "free variable " + std::to_string(k) + " is unconstrained";
      return false;
    }
  }
  const double tol = settings_.feas_tol * (1.0 + rhs_norm_);
  for (int r = 0; r < m; ++r) {
    if (!row_active_[r] && std::fabs(prob_.rhs[r]) > tol) {
      sol.status = SdpStatus::kInfeasible;
      sol.message = "row " + std::to_string(r) + " reads 0 = " + double_to_string(prob_.rhs[r]);
      return false;
    }
  }
  return true;
}

void InteriorPoint::setup_components() {
  const int m = prob_.num_rows;
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<int> block_root(nb_, -1);
  for (int j = 0; j < nb_; ++j) {
    for (const auto& rows : prob_.blocks[j].class_rows) {
      for (const auto& rc : rows) {
        if (!row_active_[rc.row]) continue;
        if (block_root[j] < 0) {
          block_root[j] = rc.row;
        } else {
          parent[find(rc.row)] = find(block_root[j]);
        }
      }
    }
  }
  std::vector<int> comp_id(m, -1);
  comp_of_row_.assign(m, -1);
  local_row_.assign(m, -1);
  comp_rows_.clear();
  for (int r = 0; r < m; ++r) {
    if (!row_active_[r]) continue;
    const int root = find(r);
    if (comp_id[root] < 0) {
      comp_id[root] = static_cast<int>(comp_rows_.size());
      comp_rows_.emplace_back();
    }
    const int c = comp_id[root];
    comp_of_row_[r] = c;
    local_row_[r] = static_cast<int>(comp_rows_[c].size());
    comp_rows_[c].push_back(r);
  }
  comp_of_block_.assign(nb_, -1);
  for (int j = 0; j < nb_; ++j) {
    if (block_root[j] >= 0) comp_of_block_[j] = comp_of_row_[block_root[j]];
  }
  const int nf = prob_.num_free();
  comp_b_.clear();
  for (const auto& rows : comp_rows_) comp_b_.push_back(MatrixXd::Zero(rows.size(), nf));
  for (int k = 0; k < nf; ++k) {
    if (!free_active_[k]) continue;
    for (const auto& rc : prob_.free_columns[k]) {
      comp_b_[comp_of_row_[rc.row]](local_row_[rc.row], k) += rc.coef;
    }
  }
}

void InteriorPoint::initial_point() {
  const int m = prob_.num_rows;
  // Frobenius norms of each row's part in each block.
  x_.clear();
  z_.clear();
  for (int j = 0; j < nb_; ++j) {
    const SdpBlock& blk = prob_.blocks[j];
    const int n = blk.dim;
    std::vector<int> class_size(blk.class_rows.size(), 0);
    for (int e : blk.entry_class) {
      if (e >= 0) ++class_size[e];
    }
    std::vector<double> normsq;
    double max_norm = 0;
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    std::vector<std::pair<int, double>> contrib;
    for (size_t c = 0; c < blk.class_rows.size(); ++c) {
      for (const auto& rc : blk.class_rows[c]) contrib.push_back({rc.row, rc.coef * rc.coef * class_size[c]});
    }
    std::sort(contrib.begin(), contrib.end());
    for (size_t i = 0; i < contrib.size();) {
      size_t k = i;
      double s = 0;
      while (k < contrib.size() && contrib[k].first == contrib[i].first) s += contrib[k++].second;
      const double nrm = std::sqrt(s);
      max_norm = std::max(max_norm, nrm);
      const int r = contrib[i].first;
      xi = std::max(xi, n * (1.0 + std::fabs(prob_.rhs[r])) / (1.0 + nrm));
      i = k;
    }
    const double c_norm = prob_.block_costs.empty() ? 0.0 : prob_.block_costs[j].norm();
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), max_norm, c_norm});
    x_.push_back(xi * MatrixXd::Identity(n, n));
    z_.push_back(eta * MatrixXd::Identity(n, n));
  }
  y_.assign(m, 0.0);
  p_.assign(prob_.num_free(), 0.0);
}

void InteriorPoint::apply_a_block(int j, const MatrixXd& y, std::vector<double>& out) const {
  const SdpBlock& blk = prob_.blocks[j];
  const int n = blk.dim;
  std::vector<double> acc(blk.class_rows.size(), 0.0);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const int c = blk.entry_class[static_cast<size_t>(a) * n + b];
      if (c >= 0) acc[c] += y(a, b);
    }
  }
  for (size_t c = 0; c < acc.size(); ++c) {
    if (acc[c] == 0) continue;
    for (const auto& rc : blk.class_rows[c]) out[rc.row] += rc.coef * acc[c];
  }
}

std::vector<double> InteriorPoint::apply_a(const std::vector<MatrixXd>& y) const {
  std::vector<double> out(prob_.num_rows, 0.0);
  for (int j = 0; j < nb_; ++j) apply_a_block(j, y[j], out);
  return out;
}

MatrixXd InteriorPoint::apply_at_block(int j, const std::vector<double>& y) const {
  const SdpBlock& blk = prob_.blocks[j];
  const int n = blk.dim;
  std::vector<double> val(blk.class_rows.size(), 0.0);
  for (size_t c = 0; c < val.size(); ++c) {
    for (const auto& rc : blk.class_rows[c]) val[c] += rc.coef * y[rc.row];
  }
  MatrixXd s(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const int c = blk.entry_class[static_cast<size_t>(a) * n + b];
      s(a, b) = c >= 0 ? val[c] : 0.0;
    }
  }
  return s;
}

void InteriorPoint::residuals() {
  const int m = prob_.num_rows;
  const int nf = prob_.num_free();
  std::vector<double> ax = apply_a(x_);
  rp_.assign(m, 0.0);
  for (int k = 0; k < nf; ++k) {
    for (const auto& rc : prob_.free_columns[k]) ax[rc.row] += rc.coef * p_[k];
  }
  double rp_max = 0;
  for (int r = 0; r < m; ++r) {
    if (!row_active_[r]) continue;
    rp_[r] = prob_.rhs[r] - ax[r];
    rp_max = std::max(rp_max, std::fabs(rp_[r]));
  }
  rd_.resize(nb_);
  double rd_max = 0;
  gap_ = 0;
  pobj_ = 0;
  for (int j = 0; j < nb_; ++j) {
    rd_[j] = -apply_at_block(j, y_) - z_[j];
    if (!prob_.block_costs.empty()) {
      rd_[j] += prob_.block_costs[j];
      pobj_ += frob_inner(prob_.block_costs[j], x_[j]);
    }
    rd_max = std::max(rd_max, rd_[j].cwiseAbs().maxCoeff());
    gap_ += frob_inner(x_[j], z_[j]);
  }
  rf_.assign(nf, 0.0);
  double rf_max = 0;
  for (int k = 0; k < nf; ++k) {
    double bty = 0;
    for (const auto& rc : prob_.free_columns[k]) bty += rc.coef * y_[rc.row];
    rf_[k] = free_active_[k] ? prob_.objective[k] - bty : 0.0;
    rf_max = std::max(rf_max, std::fabs(rf_[k]));
    pobj_ += prob_.objective[k] * p_[k];
  }
  dobj_ = 0;
  for (int r = 0; r < m; ++r) dobj_ += prob_.rhs[r] * y_[r];
  mu_ = gap_ / std::max(1, total_dim_);
  pinf_ = rp_max / (1.0 + rhs_norm_);
  dinf_ = std::max(rd_max, rf_max) / (1.0 + obj_norm_);
  relgap_ = std::max(std::fabs(gap_), std::fabs(pobj_ - dobj_)) /
            (1.0 + std::fabs(pobj_) + std::fabs(dobj_));
}

void InteriorPoint::schur_block(int j, const MatrixXd& zi, MatrixXd& m) {
  const SdpBlock& blk = prob_.blocks[j];
  const int n = blk.dim;
  const int nc = static_cast<int>(blk.class_rows.size());
  const MatrixXd& x = x_[j];
  schur_buffer_.assign(static_cast<size_t>(nc) * nc, 0.0);
  double* t = schur_buffer_.data();
  const int* ec = blk.entry_class.data();
  // T(mu, nu) = sum over (a,b) in mu, (c,d) in nu of X(b,c) * Zi(d,a).
  for (int a = 0; a < n; ++a) {
    for (int d = 0; d < n; ++d) {
      const double z = zi(d, a);
      const int* row_d = ec + static_cast<size_t>(d) * n;
      for (int b = 0; b < n; ++b) {
        const int mu = ec[static_cast<size_t>(a) * n + b];
        if (mu < 0) continue;
        double* trow = t + static_cast<size_t>(mu) * nc;
        const double* xb = x.data() + static_cast<size_t>(b) * n;
        for (int c = 0; c < n; ++c) {
          const int nu = row_d[c];
          if (nu >= 0) trow[nu] += z * xb[c];
        }
      }
    }
  }
  for (int mu = 0; mu < nc; ++mu) {
    const auto& rows_mu = blk.class_rows[mu];
    if (rows_mu.empty()) continue;
    const double* trow = t + static_cast<size_t>(mu) * nc;
    for (int nu = 0; nu < nc; ++nu) {
      const double v = trow[nu];
      if (v == 0) continue;
      for (const auto& r : rows_mu) {
        const int lr = local_row_[r.row];
        const double rv = r.coef * v;
        for (const auto& s : blk.class_rows[nu]) m(lr, local_row_[s.row]) += rv * s.coef;
      }
    }
  }
}

bool InteriorPoint::factor() {
  const int nc = static_cast<int>(comp_rows_.size());
  std::vector<MatrixXd> ms;
  for (int c = 0; c < nc; ++c) {
    ms.push_back(MatrixXd::Zero(comp_rows_[c].size(), comp_rows_[c].size()));
  }
  for (int j = 0; j < nb_; ++j) {
    if (comp_of_block_[j] < 0) continue;
    schur_block(j, zi_[j], ms[comp_of_block_[j]]);
    if (settings_.time_limit > 0 && started_.seconds() > settings_.time_limit) {
      timed_out_ = true;
      return false;
    }
  }
  m_chol_.assign(nc, Eigen::LLT<MatrixXd>());
  w_.assign(nc, MatrixXd());
  const int nf = prob_.num_free();
  MatrixXd k = MatrixXd::Zero(nf, nf);
  for (int c = 0; c < nc; ++c) {
    MatrixXd& mc = ms[c];
    mc = 0.5 * (mc + mc.transpose());
    const double scale = std::max(1e-300, mc.diagonal().cwiseAbs().maxCoeff());
    double reg = 0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      MatrixXd trial = mc;
      if (reg > 0) trial.diagonal().array() += reg * scale;
      m_chol_[c].compute(trial);
      if (m_chol_[c].info() == Eigen::Success) break;
      reg = reg == 0 ? 1e-14 : reg * 100;
    }
    if (m_chol_[c].info() != Eigen::Success) return false;
    if (nf > 0) {
      w_[c] = m_chol_[c].solve(comp_b_[c]);
      k += comp_b_[c].transpose() * w_[c];
    }
  }
  if (nf > 0) {
    for (int f = 0; f < nf; ++f) {
      if (!free_active_[f]) k(f, f) = 1.0;
    }
    k = 0.5 * (k + k.transpose());
    k_ldlt_.compute(k);
    if (k_ldlt_.info() != Eigen::Success) return false;
  }
  return true;
}

std::vector<double> InteriorPoint::apply_schur(const std::vector<double>& dy) const {
  std::vector<double> out(prob_.num_rows, 0.0);
  for (int j = 0; j < nb_; ++j) {
    if (comp_of_block_[j] < 0) continue;
    const MatrixXd s = apply_at_block(j, dy);
    apply_a_block(j, x_[j] * s * zi_[j], out);
  }
  return out;
}

void InteriorPoint::solve_newton(const std::vector<double>& h, const std::vector<double>& g,
                                 std::vector<double>& dy, std::vector<double>& dp) const {
  const int nc = static_cast<int>(comp_rows_.size());
  const int nf = prob_.num_free();
  std::vector<VectorXd> u(nc);
  VectorXd rhs_k = VectorXd::Zero(nf);
  for (int c = 0; c < nc; ++c) {
    VectorXd hc(comp_rows_[c].size());
    for (size_t i = 0; i < comp_rows_[c].size(); ++i) hc(i) = h[comp_rows_[c][i]];
    u[c] = m_chol_[c].solve(hc);
    if (nf > 0) rhs_k += comp_b_[c].transpose() * u[c];
  }
  dp.assign(nf, 0.0);
  if (nf > 0) {
    for (int f = 0; f < nf; ++f) rhs_k(f) -= free_active_[f] ? g[f] : 0.0;
    for (int f = 0; f < nf; ++f) {
      if (!free_active_[f]) rhs_k(f) = 0.0;
    }
    VectorXd d = k_ldlt_.solve(rhs_k);
    for (int f = 0; f < nf; ++f) dp[f] = free_active_[f] ? d(f) : 0.0;
  }
  dy.assign(prob_.num_rows, 0.0);
  for (int c = 0; c < nc; ++c) {
    VectorXd dyc = u[c];
    if (nf > 0) {
      VectorXd dpv = Eigen::Map<const VectorXd>(dp.data(), nf);
      dyc -= w_[c] * dpv;
    }
    for (size_t i = 0; i < comp_rows_[c].size(); ++i) dy[comp_rows_[c][i]] = dyc(i);
  }
}

void InteriorPoint::fill_solution(SdpSolution& sol) const {
  sol.blocks = x_;
  sol.free_values = p_;
  sol.dual = y_;
  sol.primal_objective = pobj_;
  sol.dual_objective = dobj_;
  sol.primal_residual = pinf_;
  sol.dual_residual = dinf_;
  sol.relative_gap = relgap_;
  double lmin = INFINITY;
  for (const auto& x : x_) {
    if (x.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (x + x.transpose()), Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, eig.eigenvalues()(0));
  }
  sol.min_eigenvalue = std::isfinite(lmin) ? lmin : 0.0;
}

SdpSolution InteriorPoint::run() {
  Stopwatch clock;
  SdpSolution sol;
  sol.feas_tol = settings_.feas_tol;
  sol.eig_tol = settings_.eig_tol;
  nb_ = static_cast<int>(prob_.blocks.size());
  total_dim_ = 0;
  for (const auto& b : prob_.blocks) total_dim_ += b.dim;
  rhs_norm_ = 0;
  for (double v : prob_.rhs) rhs_norm_ = std::max(rhs_norm_, std::fabs(v));
  obj_norm_ = 0;
  for (double v : prob_.objective) obj_norm_ = std::max(obj_norm_, std::fabs(v));
  for (const auto& c : prob_.block_costs) {
    if (c.size() > 0) obj_norm_ = std::max(obj_norm_, c.cwiseAbs().maxCoeff());
  }

  if (!presolve(sol)) {
    sol.solve_seconds = clock.seconds();
    return sol;
  }
  setup_components();
  initial_point();

  const double feas_tol = settings_.feas_tol;
  const double gap_tol = settings_.gap_tol;
  x_chol_.resize(nb_);
  z_chol_.resize(nb_);
  zi_.resize(nb_);
  int iter = 0;
  auto finish = [&](SdpStatus status, std::string message) {
    fill_solution(sol);
    sol.status = status;
    if (status == SdpStatus::kNearOptimal) sol.feas_tol = std::max(feas_tol, kNearFeasTol);
    sol.message = std::move(message);
    sol.iterations = iter;
    sol.solve_seconds = clock.seconds();
    return sol;
  };
  auto near_optimal = [&]() {
    return pinf_ <= std::max(feas_tol, kNearFeasTol) && dinf_ <= 1e-6 && relgap_ <= 1e-5;
  };

  int stalled = 0;
  double best_pinf = INFINITY, best_gap = INFINITY;
  int since_progress = 0;
  for (iter = 0; iter <= settings_.max_iters; ++iter) {
    residuals();
    if (pinf_ <= feas_tol && dinf_ <= feas_tol && relgap_ <= gap_tol) {
      return finish(SdpStatus::kOptimal, "converged");
    }
    // Infeasibility rays.
    if (dobj_ > 0) {
      double rd_max = 0;
      for (int j = 0; j < nb_; ++j) {
        const MatrixXd ray = prob_.block_costs.empty() ? MatrixXd(rd_[j])
                                                       : MatrixXd(rd_[j] - prob_.block_costs[j]);
        rd_max = std::max(rd_max, ray.cwiseAbs().maxCoeff());
      }
      double bty = 0;
      for (int k = 0; k < prob_.num_free(); ++k) bty = std::max(bty, std::fabs(prob_.objective[k] - rf_[k]));
      if (dobj_ > 1e8 * (1.0 + obj_norm_) && std::max(rd_max, bty) / dobj_ < 1e-8) {
        return finish(SdpStatus::kInfeasible, "dual ray certifies primal infeasibility");
      }
    }
    if (pobj_ < 0 && -pobj_ > 1e8 * (1.0 + rhs_norm_)) {
      double ax_max = 0;
      for (int r = 0; r < prob_.num_rows; ++r) {
        if (row_active_[r]) ax_max = std::max(ax_max, std::fabs(prob_.rhs[r] - rp_[r]));
      }
      if (ax_max / -pobj_ < 1e-8) {
        return finish(SdpStatus::kUnbounded, "primal ray certifies unboundedness");
      }
    }
    if (iter == settings_.max_iters) break;
    if (pinf_ < 0.5 * best_pinf || relgap_ < 0.5 * best_gap) {
      since_progress = 0;
    } else if (++since_progress >= kProgressWindow) {
      return finish(near_optimal() ? SdpStatus::kNearOptimal : SdpStatus::kNumericalFailure,
                    "progress stalled");
    }
    best_pinf = std::min(best_pinf, pinf_);
    best_gap = std::min(best_gap, relgap_);
    if (settings_.time_limit > 0 && clock.seconds() > settings_.time_limit) {
      return finish(near_optimal() ? SdpStatus::kNearOptimal : SdpStatus::kNumericalFailure,
                    "time limit reached");
    }

    bool ok = true;
    for (int j = 0; j < nb_ && ok; ++j) {
      x_chol_[j].compute(x_[j]);
      z_chol_[j].compute(z_[j]);
      ok = x_chol_[j].info() == Eigen::Success && z_chol_[j].info() == Eigen::Success;
      if (ok) zi_[j] = z_chol_[j].solve(MatrixXd::Identity(x_[j].rows(), x_[j].rows()));
    }
    if (!ok) {
      return finish(near_optimal() ? SdpStatus::kNearOptimal : SdpStatus::kNumericalFailure,
                    "iterate lost definiteness");
    }
    if (!factor()) {
      return finish(near_optimal() ? SdpStatus::kNearOptimal : SdpStatus::kNumericalFailure,
                    timed_out_ ? "time limit reached" : "Schur complement factorization failed");
    }

    std::vector<MatrixXd> dx(nb_), dz(nb_);
    std::vector<double> dy, dp;
    auto direction = [&](const std::vector<MatrixXd>& rc) {
      // h = rp - A(Rc - X Rd Zi)
      std::vector<double> h = rp_;
      std::vector<double> ay(prob_.num_rows, 0.0);
      for (int j = 0; j < nb_; ++j) {
        MatrixXd yj = rc[j] - x_[j] * rd_[j] * zi_[j];
        apply_a_block(j, yj, ay);
      }
      for (int r = 0; r < prob_.num_rows; ++r) h[r] = row_active_[r] ? h[r] - ay[r] : 0.0;
      solve_newton(h, rf_, dy, dp);
      // Iterative refinement against the unformed operator.
      double h_max = 0;
      for (int r = 0; r < prob_.num_rows; ++r) h_max = std::max(h_max, std::fabs(h[r]));
      for (int round = 0; round < 3; ++round) {
        std::vector<double> e1 = apply_schur(dy);
        for (int k = 0; k < prob_.num_free(); ++k) {
          for (const auto& rc : prob_.free_columns[k]) e1[rc.row] += rc.coef * dp[k];
        }
        double e_max = 0;
        for (int r = 0; r < prob_.num_rows; ++r) {
          e1[r] = row_active_[r] ? h[r] - e1[r] : 0.0;
          e_max = std::max(e_max, std::fabs(e1[r]));
        }
        std::vector<double> e2(prob_.num_free(), 0.0);
        for (int k = 0; k < prob_.num_free(); ++k) {
          if (!free_active_[k]) continue;
          double bty = 0;
          for (const auto& rc : prob_.free_columns[k]) bty += rc.coef * dy[rc.row];
          e2[k] = rf_[k] - bty;
        }
        if (e_max <= 1e-15 * (1.0 + h_max)) break;
        std::vector<double> cy, cp;
        solve_newton(e1, e2, cy, cp);
        for (size_t r = 0; r < dy.size(); ++r) dy[r] += cy[r];
        for (size_t k = 0; k < dp.size(); ++k) dp[k] += cp[k];
      }
      for (int j = 0; j < nb_; ++j) {
        dz[j] = rd_[j] - apply_at_block(j, dy);
        MatrixXd d = rc[j] - x_[j] * dz[j] * zi_[j];
        dx[j] = 0.5 * (d + d.transpose());
      }
    };
    auto step_lengths = [&](double& ap, double& ad) {
      ap = 1e30;
      ad = 1e30;
      for (int j = 0; j < nb_; ++j) {
        ap = std::min(ap, max_step(x_chol_[j], dx[j]));
        ad = std::min(ad, max_step(z_chol_[j], dz[j]));
      }
    };

    // Predictor.
    std::vector<MatrixXd> rc(nb_);
    for (int j = 0; j < nb_; ++j) rc[j] = -x_[j];
    direction(rc);
    double ap = 0, ad = 0;
    step_lengths(ap, ad);
    const double ap_aff = std::min(1.0, ap);
    const double ad_aff = std::min(1.0, ad);
    double gap_aff = 0;
    for (int j = 0; j < nb_; ++j) {
      gap_aff += frob_inner(x_[j] + ap_aff * dx[j], z_[j] + ad_aff * dz[j]);
    }
    const double mu_aff = gap_aff / std::max(1, total_dim_);
    const double expo = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu_, expo), 0.0, 1.0);

    // Corrector with the second-order term.
    for (int j = 0; j < nb_; ++j) {
      rc[j] = sigma * mu_ * zi_[j] - x_[j] - dx[j] * dz[j] * zi_[j];
    }
    direction(rc);
    step_lengths(ap, ad);
    const double tau = 0.9 + 0.09 * std::min({ap_aff, ad_aff, 1.0});
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalled > 3) {
        return finish(near_optimal() ? SdpStatus::kNearOptimal : SdpStatus::kNumericalFailure,
                      "step length stalled");
      }
    } else {
      stalled = 0;
    }
    // Rounding can cost definiteness near the boundary; shrink the step
    // until the Cholesky factorization succeeds.
    auto take = [&](std::vector<MatrixXd>& v, const std::vector<MatrixXd>& dv, double& alpha) {
      std::vector<MatrixXd> trial(nb_);
      for (int attempt = 0; attempt < 30; ++attempt) {
        bool pd = true;
        for (int j = 0; j < nb_ && pd; ++j) {
          trial[j] = v[j] + alpha * dv[j];
          trial[j] = 0.5 * (trial[j] + trial[j].transpose());
          Eigen::LLT<MatrixXd> chol(trial[j]);
          pd = chol.info() == Eigen::Success;
        }
        if (pd) {
          v = std::move(trial);
          return;
        }
        alpha *= 0.8;
      }
      alpha = 0;
    };
    take(x_, dx, ap);
    take(z_, dz, ad);
    if (trace_) {
      std::fprintf(stderr, "%3d pobj %.8e dobj %.8e pinf %.2e dinf %.2e mu %.2e ap %.3f ad %.3f sig %.3f\n",
                   iter, pobj_, dobj_, pinf_, dinf_, mu_, ap, ad, sigma);
    }
    for (size_t k = 0; k < p_.size(); ++k) p_[k] += ap * dp[k];
    for (size_t r = 0; r < y_.size(); ++r) y_[r] += ad * dy[r];
  }
  residuals();
  return finish(near_optimal() ? SdpStatus::kNearOptimal : SdpStatus::kNumericalFailure,
                "iteration limit reached");
}

}  // namespace

SdpSolution solve_interior_point(const SdpProblem& prob, const SolverSettings& settings) {
  InteriorPoint ipm(prob, settings);
  return ipm.run();
}

}  // namespace semialg
