#include "semialg/sdpa_format.h"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "semialg/errors.h"

namespace semialg {

namespace fs = std::filesystem;

SdpaProblem to_sdpa(const SdpProblem& prob) {
  SdpaProblem out;
  out.num_constraints = prob.num_rows;
  out.c = prob.rhs;
  const int nb = static_cast<int>(prob.blocks.size());
  const int nf = prob.num_free();
  for (const auto& blk : prob.blocks) out.block_struct.push_back(blk.dim);
  if (nf > 0) out.block_struct.push_back(-2 * nf);
  for (const auto& e : prob.entries()) {
    out.entries.push_back({e.row + 1, e.block + 1, e.i + 1, e.j + 1, e.value});
  }
  for (int k = 0; k < nf; ++k) {
    for (const auto& rc : prob.free_columns[k]) {
      out.entries.push_back({rc.row + 1, nb + 1, k + 1, k + 1, rc.coef});
      out.entries.push_back({rc.row + 1, nb + 1, nf + k + 1, nf + k + 1, -rc.coef});
    }
    if (prob.objective[k] != 0) {
      out.entries.push_back({0, nb + 1, k + 1, k + 1, -prob.objective[k]});
      out.entries.push_back({0, nb + 1, nf + k + 1, nf + k + 1, prob.objective[k]});
    }
  }
  for (int j = 0; j < static_cast<int>(prob.block_costs.size()); ++j) {
    const Eigen::MatrixXd& c = prob.block_costs[j];
    for (int a = 0; a < c.rows(); ++a) {
      for (int b = a; b < c.cols(); ++b) {
        if (c(a, b) != 0) out.entries.push_back({0, j + 1, a + 1, b + 1, -c(a, b)});
      }
    }
  }
  return out;
}

void write_sdpa(const SdpaProblem& sdpa, std::ostream& out) {
  out << "\"semialg-inv\"\n";
  out << sdpa.num_constraints << "\n" << sdpa.block_struct.size() << "\n";
  for (size_t b = 0; b < sdpa.block_struct.size(); ++b) {
    out << (b ? " " : "") << sdpa.block_struct[b];
  }
  out << "\n";
  for (size_t i = 0; i < sdpa.c.size(); ++i) out << (i ? " " : "") << double_to_string(sdpa.c[i]);
  out << "\n";
  for (const auto& e : sdpa.entries) {
    out << e.matrix << " " << e.block << " " << e.i << " " << e.j << " "
        << double_to_string(e.value) << "\n";
  }
}

namespace {

// Reads the next whitespace/punctuation separated token; SDPA files may use
// commas, braces and parentheses as separators in the header.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '"' || ch == '*') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(ch) || ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') {
      if (!tok.empty()) return true;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return !tok.empty();
}

double to_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ParseError("bad number '" + tok + "'", 0, 0);
  return v;
}

int to_int(const std::string& tok) {
  const double v = to_double(tok);
  if (v != std::floor(v)) throw ParseError("expected an integer, got '" + tok + "'", 0, 0);
  return static_cast<int>(v);
}

}  // namespace

SdpaProblem read_sdpa(std::istream& in) {
  SdpaProblem p;
  std::string tok;
  auto need = [&]() {
    if (!next_token(in, tok)) throw ParseError("unexpected end of SDPA input", 0, 0);
    return tok;
  };
  p.num_constraints = to_int(need());
  const int nblocks = to_int(need());
  for (int b = 0; b < nblocks; ++b) p.block_struct.push_back(to_int(need()));
  for (int i = 0; i < p.num_constraints; ++i) p.c.push_back(to_double(need()));
  while (next_token(in, tok)) {
    SdpaProblem::Entry e{};
    e.matrix = to_int(tok);
    e.block = to_int(need());
    e.i = to_int(need());
    e.j = to_int(need());
    e.value = to_double(need());
    if (e.matrix < 0 || e.matrix > p.num_constraints || e.block < 1 || e.block > nblocks) {
      throw ParseError("SDPA entry out of range", 0, 0);
    }
    const int dim = std::abs(p.block_struct[e.block - 1]);
    if (e.i < 1 || e.j < 1 || e.i > dim || e.j > dim) throw ParseError("SDPA index out of range", 0, 0);
    p.entries.push_back(e);
  }
  return p;
}

SdpProblem from_sdpa(const SdpaProblem& sdpa) {
  SdpBuilder builder;
  // Map (SDPA block, index) to (our block, local index).
  std::vector<std::vector<std::pair<int, int>>> where(sdpa.block_struct.size());
  std::vector<int> dims;
  for (size_t b = 0; b < sdpa.block_struct.size(); ++b) {
    const int s = sdpa.block_struct[b];
    if (s > 0) {
      const int id = builder.add_block("B" + std::to_string(b + 1), s);
      dims.push_back(s);
      for (int i = 0; i < s; ++i) where[b].push_back({id, i});
    } else {
      for (int i = 0; i < -s; ++i) {
        const int id = builder.add_block("B" + std::to_string(b + 1) + "[" + std::to_string(i + 1) + "]", 1);
        dims.push_back(1);
        where[b].push_back({id, 0});
      }
    }
  }
  for (int r = 0; r < sdpa.num_constraints; ++r) builder.add_row(sdpa.c[r]);
  std::vector<Eigen::MatrixXd> costs;
  for (int d : dims) costs.push_back(Eigen::MatrixXd::Zero(d, d));
  for (const auto& e : sdpa.entries) {
    const size_t b = e.block - 1;
    const bool diagonal = sdpa.block_struct[b] < 0;
    if (diagonal && e.i != e.j) throw ParseError("off-diagonal entry in a diagonal block", 0, 0);
    const auto [blk, i] = where[b][e.i - 1];
    const int j = where[b][e.j - 1].second;
    if (e.matrix == 0) {
      costs[blk](i, j) -= e.value;
      if (i != j) costs[blk](j, i) -= e.value;
    } else {
      builder.add_entry(e.matrix - 1, blk, i, j, e.value);
    }
  }
  SdpProblem prob = builder.build();
  prob.block_costs = std::move(costs);
  return prob;
}

namespace {

void write_matrix_list(const std::vector<Eigen::MatrixXd>& mats,
                       const std::vector<int>& block_struct, std::ostream& out) {
  out << "{\n";
  for (size_t b = 0; b < mats.size(); ++b) {
    const Eigen::MatrixXd& m = mats[b];
    if (block_struct[b] < 0) {
      out << "{";
      for (int i = 0; i < m.rows(); ++i) out << (i ? "," : "") << double_to_string(m(i, i));
      out << "}\n";
      continue;
    }
    out << "{";
    for (int i = 0; i < m.rows(); ++i) {
      out << (i ? "," : "") << "{";
      for (int j = 0; j < m.cols(); ++j) out << (j ? "," : "") << double_to_string(m(i, j));
      out << "}";
    }
    out << "}\n";
  }
  out << "}\n";
}

// Collects all numbers of the braced group that starts at the next '{'.
std::vector<double> read_group(std::istream& in) {
  int ch;
  while ((ch = in.get()) != EOF && ch != '{') {
  }
  if (ch == EOF) throw ParseError("missing '{' in SDPA result", 0, 0);
  std::vector<double> values;
  int depth = 1;
  std::string num;
  auto flush = [&]() {
    if (!num.empty()) values.push_back(to_double(num));
    num.clear();
  };
  while (depth > 0 && (ch = in.get()) != EOF) {
    if (ch == '{') {
      flush();
      ++depth;
    } else if (ch == '}') {
      flush();
      --depth;
    } else if (ch == ',' || std::isspace(ch)) {
      flush();
    } else {
      num.push_back(static_cast<char>(ch));
    }
  }
  if (depth != 0) throw ParseError("unbalanced braces in SDPA result", 0, 0);
  return values;
}

std::vector<Eigen::MatrixXd> unpack(const std::vector<double>& flat, const std::vector<int>& bs) {
  std::vector<Eigen::MatrixXd> out;
  size_t pos = 0;
  for (int s : bs) {
    const int n = std::abs(s);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (s < 0) {
      for (int i = 0; i < n; ++i) {
        if (pos >= flat.size()) throw ParseError("truncated matrix in SDPA result", 0, 0);
        m(i, i) = flat[pos++];
      }
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (pos >= flat.size()) throw ParseError("truncated matrix in SDPA result", 0, 0);
          m(i, j) = flat[pos++];
        }
      }
    }
    out.push_back(std::move(m));
  }
  if (pos != flat.size()) throw ParseError("extra values in SDPA result matrix", 0, 0);
  return out;
}

}  // namespace

void write_sdpa_result(const SdpaResult& result, const std::vector<int>& block_struct,
                       std::ostream& out) {
  out << "phase.value = " << result.phase << "\n";
  out << "objValPrimal = " << double_to_string(result.primal_objective) << "\n";
  out << "objValDual   = " << double_to_string(result.dual_objective) << "\n";
  out << "xVec = \n{";
  for (size_t i = 0; i < result.x.size(); ++i) out << (i ? "," : "") << double_to_string(result.x[i]);
  out << "}\n";
  out << "xMat = \n";
  write_matrix_list(result.x_mat, block_struct, out);
  out << "yMat = \n";
  write_matrix_list(result.y_mat, block_struct, out);
}

SdpaResult read_sdpa_result(std::istream& in, const std::vector<int>& block_struct) {
  SdpaResult r;
  std::string line;
  bool have_x = false, have_ymat = false;
  while (std::getline(in, line)) {
    auto value_after_eq = [&]() {
      const auto eq = line.find('=');
      std::string v = eq == std::string::npos ? "" : line.substr(eq + 1);
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    if (line.rfind("phase.value", 0) == 0) {
      r.phase = value_after_eq();
    } else if (line.rfind("objValPrimal", 0) == 0) {
      r.primal_objective = to_double(value_after_eq());
    } else if (line.rfind("objValDual", 0) == 0) {
      r.dual_objective = to_double(value_after_eq());
    } else if (line.rfind("xVec", 0) == 0) {
      r.x = read_group(in);
      have_x = true;
    } else if (line.rfind("xMat", 0) == 0) {
      r.x_mat = unpack(read_group(in), block_struct);
    } else if (line.rfind("yMat", 0) == 0) {
      r.y_mat = unpack(read_group(in), block_struct);
      have_ymat = true;
    }
  }
  if (r.phase.empty()) throw ParseError("SDPA result has no phase.value", 0, 0);
  if (!have_x || !have_ymat) {
    if (r.phase == "pdOPT" || r.phase == "pdFEAS") {
      throw ParseError("SDPA result is missing xVec or yMat", 0, 0);
    }
  }
  return r;
}

void evaluate_solution(const SdpProblem& prob, SdpSolution& sol) {
  double rhs_norm = 0;
  for (double v : prob.rhs) rhs_norm = std::max(rhs_norm, std::fabs(v));
  double obj_norm = 0;
  for (double v : prob.objective) obj_norm = std::max(obj_norm, std::fabs(v));
  const std::vector<double> ax = prob.apply(sol.blocks, sol.free_values);
  double rp = 0;
  for (int r = 0; r < prob.num_rows; ++r) rp = std::max(rp, std::fabs(prob.rhs[r] - ax[r]));
  sol.primal_residual = rp / (1.0 + rhs_norm);

  double pobj = 0;
  for (int k = 0; k < prob.num_free(); ++k) pobj += prob.objective[k] * sol.free_values[k];
  for (size_t j = 0; j < prob.block_costs.size(); ++j) {
    pobj += (prob.block_costs[j].array() * sol.blocks[j].array()).sum();
  }
  sol.primal_objective = pobj;
  double dobj = 0;
  double dres = 0;
  if (sol.dual.size() == static_cast<size_t>(prob.num_rows)) {
    for (int r = 0; r < prob.num_rows; ++r) dobj += prob.rhs[r] * sol.dual[r];
    for (int k = 0; k < prob.num_free(); ++k) {
      double bty = 0;
      for (const auto& rc : prob.free_columns[k]) bty += rc.coef * sol.dual[rc.row];
      dres = std::max(dres, std::fabs(prob.objective[k] - bty));
    }
    for (size_t j = 0; j < prob.blocks.size(); ++j) {
      const SdpBlock& blk = prob.blocks[j];
      std::vector<double> val(blk.class_rows.size(), 0.0);
      for (size_t c = 0; c < val.size(); ++c) {
        for (const auto& rc : blk.class_rows[c]) val[c] += rc.coef * sol.dual[rc.row];
      }
      Eigen::MatrixXd z = prob.block_costs.empty() ? Eigen::MatrixXd::Zero(blk.dim, blk.dim)
                                                   : prob.block_costs[j];
      for (int a = 0; a < blk.dim; ++a) {
        for (int b = 0; b < blk.dim; ++b) {
          const int c = blk.cls(a, b);
          if (c >= 0) z(a, b) -= val[c];
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z, Eigen::EigenvaluesOnly);
      dres = std::max(dres, -eig.eigenvalues()(0));
    }
  }
  sol.dual_objective = dobj;
  sol.dual_residual = dres / (1.0 + obj_norm);
  sol.relative_gap = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));
  double lmin = INFINITY;
  for (const auto& x : sol.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (x + x.transpose()),
                                                       Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, eig.eigenvalues()(0));
  }
  sol.min_eigenvalue = std::isfinite(lmin) ? lmin : 0.0;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

SdpSolution solve_file_exchange(const SdpProblem& prob, const SolverSettings& settings) {
  SdpSolution sol;
  sol.feas_tol = settings.feas_tol;
  sol.eig_tol = settings.eig_tol;
  std::string command = settings.exchange_command;
  if (command.empty()) {
    const char* env = std::getenv("SEMIALG_INV_SDPA_COMMAND");
    command = env && *env ? env : "sdpa";
  }
  fs::path dir;
  bool own_dir = false;
  if (!settings.exchange_dir.empty()) {
    dir = settings.exchange_dir;
    fs::create_directories(dir);
  } else {
    std::string tmpl = (fs::temp_directory_path() / "semialg_sdpa_XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw ConfigError("cannot create a temporary directory");
    dir = tmpl;
    own_dir = true;
  }
  const fs::path in_path = dir / "problem.dat-s";
  const fs::path out_path = dir / "problem.out";
  fs::remove(out_path);
  const SdpaProblem sdpa = to_sdpa(prob);
  {
    std::ofstream f(in_path);
    if (!f) throw ConfigError("cannot write " + in_path.string());
    write_sdpa(sdpa, f);
  }
  const auto start = std::chrono::steady_clock::now();
  const std::string cmd = command + " " + shell_quote(in_path.string()) + " " +
                          shell_quote(out_path.string()) + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  sol.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ifstream f(out_path);
  if (!f) {
    sol.status = SdpStatus::kNumericalFailure;
    sol.message = "solver command '" + command + "' produced no result (exit " +
                  std::to_string(rc) + ")";
    if (own_dir) fs::remove_all(dir);
    return sol;
  }
  SdpaResult res;
  try {
    res = read_sdpa_result(f, sdpa.block_struct);
  } catch (const ParseError& e) {
    sol.status = SdpStatus::kNumericalFailure;
    sol.message = std::string("unreadable solver result: ") + e.what();
    if (own_dir) fs::remove_all(dir);
    return sol;
  }
  if (own_dir) fs::remove_all(dir);

  // SDPA's primal is our dual and vice versa.
  if (res.phase == "pdOPT") {
    sol.status = SdpStatus::kOptimal;
  } else if (res.phase == "pdFEAS") {
    sol.status = SdpStatus::kNearOptimal;
  } else if (res.phase == "pFEAS_dINF" || res.phase == "pUNBD") {
    sol.status = SdpStatus::kInfeasible;
  } else if (res.phase == "pINF_dFEAS" || res.phase == "dUNBD") {
    sol.status = SdpStatus::kUnbounded;
  } else {
    sol.status = SdpStatus::kNumericalFailure;
  }
  sol.message = "external phase " + res.phase;
  const int nb = static_cast<int>(prob.blocks.size());
  const int nf = prob.num_free();
  if (res.y_mat.size() == sdpa.block_struct.size()) {
    for (int j = 0; j < nb; ++j) sol.blocks.push_back(res.y_mat[j]);
    sol.free_values.assign(nf, 0.0);
    for (int k = 0; k < nf; ++k) {
      sol.free_values[k] = res.y_mat[nb](k, k) - res.y_mat[nb](nf + k, nf + k);
    }
    sol.dual.assign(prob.num_rows, 0.0);
    for (int r = 0; r < prob.num_rows && r < static_cast<int>(res.x.size()); ++r) {
      sol.dual[r] = -res.x[r];
    }
    evaluate_solution(prob, sol);
    if (sol.usable() && sol.primal_residual > settings.feas_tol) {
      sol.status = SdpStatus::kNumericalFailure;
      sol.message += "; primal residual " + double_to_string(sol.primal_residual) +
                     " exceeds tolerance";
    }
  } else if (sol.usable()) {
    sol.status = SdpStatus::kNumericalFailure;
    sol.message += "; result has no primal blocks";
  }
  return sol;
}

}  // namespace semialg
