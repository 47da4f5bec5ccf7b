#include "mmsched/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mmsched {

int LinearModel::add_var(double lower, double upper, double cost, bool integer) {
  lb.push_back(lower);
  ub.push_back(upper);
  obj.push_back(cost);
  is_integer.push_back(integer ? 1 : 0);
  return num_vars() - 1;
}

int LinearModel::add_row(RowSense s, double right) {
  sense.push_back(s);
  rhs.push_back(right);
  return num_rows() - 1;
}

void LinearModel::add_entry(int row, int col, double val) {
  entries.push_back({row, col, val});
}

void LinearModel::check() const {
  const int n = num_vars();
  const int m = num_rows();
  if (static_cast<int>(lb.size()) != n || static_cast<int>(ub.size()) != n ||
      static_cast<int>(is_integer.size()) != n) {
    throw std::invalid_argument("LinearModel: inconsistent variable arrays");
  }
  if (static_cast<int>(sense.size()) != m) {
    throw std::invalid_argument("LinearModel: inconsistent row arrays");
  }
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lb[j]) || std::isnan(ub[j]) || lb[j] > ub[j]) {
      throw std::invalid_argument("LinearModel: bad bounds on variable " +
                                  std::to_string(j));
    }
    if (!std::isfinite(obj[j])) {
      throw std::invalid_argument("LinearModel: non-finite objective");
    }
    if (is_integer[j] && (!std::isfinite(lb[j]) || !std::isfinite(ub[j]))) {
      throw std::invalid_argument(
          "LinearModel: integer variable with unbounded domain");
    }
  }
  for (double b : rhs) {
    if (!std::isfinite(b)) {
      throw std::invalid_argument("LinearModel: non-finite rhs");
    }
  }
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n ||
        !std::isfinite(e.val)) {
      throw std::invalid_argument("LinearModel: bad triplet");
    }
  }
}

std::string LinearModel::to_text() const {
  std::ostringstream os;
  os << "maximize";
  for (int j = 0; j < num_vars(); ++j) {
    if (obj[j] != 0.0) os << " " << (obj[j] >= 0 ? "+" : "") << obj[j] << " x" << j;
  }
  os << "\nsubject to\n";
  std::vector<std::vector<std::pair<int, double>>> rows(num_rows());
  for (const Entry& e : entries) rows[e.row].push_back({e.col, e.val});
  for (int r = 0; r < num_rows(); ++r) {
    os << "  r" << r << ":";
    for (auto& [c, v] : rows[r]) os << " " << (v >= 0 ? "+" : "") << v << " x" << c;
    os << (sense[r] == RowSense::LE ? " <= " : sense[r] == RowSense::EQ ? " = " : " >= ");
    os << rhs[r] << "\n";
  }
  os << "bounds\n";
  for (int j = 0; j < num_vars(); ++j) {
    os << "  " << lb[j] << " <= x" << j << " <= " << ub[j];
    if (is_integer[j]) os << " integer";
    os << "\n";
  }
  return os.str();
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "?";
}

namespace {

// Bounded-variable revised simplex. The basis always splits into unit
// columns (slacks, artificials) and structural columns; only the square
// "kernel" coupling structural basic columns to their rows is factorized,
// which keeps per-iteration cost quadratic in the number of structural
// basics rather than in the row count.
class Simplex {
 public:
  Simplex(const LinearModel& model, const LpOptions& opts)
      : model_(model), opts_(opts) {
    n_ = model.num_vars();
    m_ = model.num_rows();
    build_columns();
  }

  LpSolution run(const Basis* warm, Basis* basis_out, bool keep_state = false);

  // ---- incremental-session hooks ----------------------------------------

  // reflects one structural variable appended to the model (entries already
  // added there); the live basis and factorization stay valid
  void sync_append(const std::vector<std::pair<int, double>>& column) {
    int j = n_;  // index of the new variable
    std::vector<std::pair<int, double>> ents(column);
    std::sort(ents.begin(), ents.end());
    int start = static_cast<int>(colrow_.size());
    for (auto& [r, v] : ents) {
      if (static_cast<int>(colrow_.size()) > start && colrow_.back() == r) {
        colval_.back() += v;
      } else {
        colrow_.push_back(r);
        colval_.push_back(v);
      }
    }
    colstart_.push_back(static_cast<int>(colrow_.size()));
    vlb_.insert(vlb_.begin() + n_, model_.lb[j]);
    vub_.insert(vub_.begin() + n_, model_.ub[j]);
    if (!stat_.empty()) {
      for (int& jj : jcols_)
        if (jj >= n_) ++jj;
      for (int& uu : unit_basic_)
        if (uu >= n_) ++uu;
      double v = nearest_bound(n_);
      stat_.insert(stat_.begin() + n_, nonbasic_status_at(n_, v));
      x_.insert(x_.begin() + n_, v);
      col_jpos_.insert(col_jpos_.begin() + n_, -1);
    }
    ++n_;
    ++ncols_;
  }

  void set_bounds(int j, double lower, double upper) {
    vlb_[j] = lower;
    vub_[j] = upper;
  }

 private:
  enum class Outcome { OptimalPhase, Unbounded, IterLimit, Singular };

  const LinearModel& model_;
  LpOptions opts_;
  int n_ = 0;       // structural
  int m_ = 0;       // rows
  int ncols_ = 0;   // structural + slacks + artificials

  // structural columns, CSC
  std::vector<int> colstart_;
  std::vector<int> colrow_;
  std::vector<double> colval_;

  std::vector<double> vlb_, vub_;  // per column (structural, slack, artificial)
  std::vector<double> cost2_;      // phase-2 costs
  std::vector<double> cost1_;      // phase-1 costs
  std::vector<int> art_row_;       // artificial column -> row
  std::vector<double> art_sign_;

  std::vector<VarStatus> stat_;
  std::vector<double> x_;
  std::vector<int> unit_basic_;  // row -> basic unit column, or -1
  std::vector<int> trows_;       // kernel rows
  std::vector<int> jcols_;       // structural basic columns
  std::vector<int> row_tpos_;    // row -> position in trows_, or -1
  std::vector<int> col_jpos_;    // column -> position in jcols_, or -1
  std::vector<double> kinv_;     // kernel inverse, stride ks_
  int ks_ = 0;

  std::vector<double> y_;      // row duals, scratch
  std::vector<double> dj_;     // kernel part of entering direction
  std::vector<double> accs_;   // scratch, per row; zero outside accs_touched_
  std::vector<int> accs_touched_;
  long pivots_since_factor_ = 0;
  long degen_streak_ = 0;
  bool bland_ = false;
  bool kernel_dirty_ = false;  // an update used a near-zero pivot
  bool perturbed_ = false;     // cost vector carries anti-degeneracy noise
  int perturb_salt_ = 0;       // varies per restart so retries differ
  bool state_valid_ = false;   // basis/factorization usable for a re-solve

  int kdim() const { return static_cast<int>(jcols_.size()); }

  void build_columns() {
    std::vector<int> count(n_, 0);
    for (const auto& e : model_.entries) count[e.col]++;
    colstart_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) colstart_[j + 1] = colstart_[j] + count[j];
    colrow_.resize(model_.entries.size());
    colval_.resize(model_.entries.size());
    std::vector<int> fill(colstart_.begin(), colstart_.end() - 1);
    for (const auto& e : model_.entries) {
      colrow_[fill[e.col]] = e.row;
      colval_[fill[e.col]] = e.val;
      fill[e.col]++;
    }
    // duplicate triplets for the same cell are merged
    for (int j = 0; j < n_; ++j) {
      int b = colstart_[j], e = colstart_[j + 1];
      std::vector<std::pair<int, double>> tmp;
      for (int t = b; t < e; ++t) tmp.push_back({colrow_[t], colval_[t]});
      std::sort(tmp.begin(), tmp.end());
      int w = b;
      for (size_t t = 0; t < tmp.size(); ++t) {
        if (t > 0 && tmp[t].first == colrow_[w - 1]) {
          colval_[w - 1] += tmp[t].second;
        } else {
          colrow_[w] = tmp[t].first;
          colval_[w] = tmp[t].second;
          ++w;
        }
      }
      count[j] = w - b;
    }
    // recompact after merging
    int w = 0;
    std::vector<int> nstart(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) {
      int b = colstart_[j];
      for (int t = 0; t < count[j]; ++t) {
        colrow_[w] = colrow_[b + t];
        colval_[w] = colval_[b + t];
        ++w;
      }
      nstart[j + 1] = w;
    }
    colstart_ = nstart;
    colrow_.resize(w);
    colval_.resize(w);

    vlb_.assign(n_ + m_, 0.0);
    vub_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      vlb_[j] = model_.lb[j];
      vub_[j] = model_.ub[j];
    }
    for (int r = 0; r < m_; ++r) {
      switch (model_.sense[r]) {
        case RowSense::LE: vlb_[n_ + r] = 0.0; vub_[n_ + r] = kInf; break;
        case RowSense::GE: vlb_[n_ + r] = -kInf; vub_[n_ + r] = 0.0; break;
        case RowSense::EQ: vlb_[n_ + r] = 0.0; vub_[n_ + r] = 0.0; break;
      }
    }
    ncols_ = n_ + m_;
  }

  bool is_slack(int col) const { return col >= n_ && col < n_ + m_; }
  bool is_artificial(int col) const { return col >= n_ + m_; }
  int unit_row(int col) const {
    return is_slack(col) ? col - n_ : art_row_[col - n_ - m_];
  }
  double unit_sign(int col) const {
    return is_slack(col) ? 1.0 : art_sign_[col - n_ - m_];
  }

  double col_value_at_row(int col, int row) const {
    if (col < n_) {
      for (int t = colstart_[col]; t < colstart_[col + 1]; ++t) {
        if (colrow_[t] == row) return colval_[t];
      }
      return 0.0;
    }
    return unit_row(col) == row ? unit_sign(col) : 0.0;
  }

  double nearest_bound(int col) const {
    if (std::isfinite(vlb_[col])) return vlb_[col];
    if (std::isfinite(vub_[col])) return vub_[col];
    return 0.0;
  }

  VarStatus nonbasic_status_at(int col, double v) const {
    if (std::isfinite(vlb_[col]) && v == vlb_[col]) return VarStatus::AtLower;
    if (std::isfinite(vub_[col]) && v == vub_[col]) return VarStatus::AtUpper;
    return VarStatus::FreeNonbasic;
  }

  // ---- basis construction ------------------------------------------------

  void cold_start() {
    stat_.assign(ncols_, VarStatus::AtLower);
    x_.assign(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double v = nearest_bound(j);
      x_[j] = v;
      stat_[j] = nonbasic_status_at(j, v);
    }
    std::vector<double> resid(model_.rhs);
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (int t = colstart_[j]; t < colstart_[j + 1]; ++t) {
        resid[colrow_[t]] -= colval_[t] * x_[j];
      }
    }
    unit_basic_.assign(m_, -1);
    trows_.clear();
    jcols_.clear();
    row_tpos_.assign(m_, -1);
    col_jpos_.assign(ncols_, -1);
    art_row_.clear();
    art_sign_.clear();
    for (int r = 0; r < m_; ++r) {
      int sc = n_ + r;
      double v = resid[r];
      if (v >= vlb_[sc] - opts_.feas_tol && v <= vub_[sc] + opts_.feas_tol) {
        unit_basic_[r] = sc;
        stat_[sc] = VarStatus::Basic;
        x_[sc] = v;
      } else {
        double clamped = std::clamp(v, vlb_[sc], vub_[sc]);
        x_[sc] = clamped;
        stat_[sc] = nonbasic_status_at(sc, clamped);
        double excess = v - clamped;
        art_row_.push_back(r);
        art_sign_.push_back(excess >= 0 ? 1.0 : -1.0);
        int ac = ncols_;
        vlb_.push_back(0.0);
        vub_.push_back(kInf);
        stat_.push_back(VarStatus::Basic);
        x_.push_back(std::abs(excess));
        col_jpos_.push_back(-1);
        unit_basic_[r] = ac;
        ++ncols_;
      }
    }
    ks_ = 0;
    kinv_.clear();
  }

  bool warm_start(const Basis& warm) {
    if (static_cast<int>(warm.slack.size()) != m_) return false;
    if (static_cast<int>(warm.structural.size()) > n_) return false;
    stat_.assign(ncols_, VarStatus::AtLower);
    x_.assign(ncols_, 0.0);
    unit_basic_.assign(m_, -1);
    trows_.clear();
    jcols_.clear();
    row_tpos_.assign(m_, -1);
    col_jpos_.assign(ncols_, -1);
    int basics = 0;
    for (int j = 0; j < n_; ++j) {
      VarStatus s = j < static_cast<int>(warm.structural.size())
                        ? warm.structural[j]
                        : nonbasic_status_at(j, nearest_bound(j));
      if (s == VarStatus::Basic) {
        col_jpos_[j] = static_cast<int>(jcols_.size());
        jcols_.push_back(j);
        stat_[j] = VarStatus::Basic;
        ++basics;
      } else {
        if (s == VarStatus::AtLower && !std::isfinite(vlb_[j])) {
          s = nonbasic_status_at(j, nearest_bound(j));
        }
        if (s == VarStatus::AtUpper && !std::isfinite(vub_[j])) {
          s = nonbasic_status_at(j, nearest_bound(j));
        }
        stat_[j] = s;
        x_[j] = s == VarStatus::AtLower   ? vlb_[j]
                : s == VarStatus::AtUpper ? vub_[j]
                                          : 0.0;
      }
    }
    for (int r = 0; r < m_; ++r) {
      int sc = n_ + r;
      VarStatus s = warm.slack[r];
      if (s == VarStatus::Basic) {
        unit_basic_[r] = sc;
        stat_[sc] = VarStatus::Basic;
        ++basics;
      } else {
        if ((s == VarStatus::AtLower && !std::isfinite(vlb_[sc])) ||
            (s == VarStatus::AtUpper && !std::isfinite(vub_[sc]))) {
          s = nonbasic_status_at(sc, nearest_bound(sc));
        }
        stat_[sc] = s;
        x_[sc] = s == VarStatus::AtLower   ? vlb_[sc]
                 : s == VarStatus::AtUpper ? vub_[sc]
                                           : 0.0;
        row_tpos_[r] = 0;  // provisional marker, fixed below
      }
    }
    if (basics != m_) return false;
    int t = 0;
    for (int r = 0; r < m_; ++r) {
      if (unit_basic_[r] == -1) {
        row_tpos_[r] = t;
        trows_.push_back(r);
        ++t;
      } else {
        row_tpos_[r] = -1;
      }
    }
    if (t != kdim()) return false;
    if (!factorize()) return false;
    compute_basic_values();
    // a stale basis that is no longer primal feasible falls back to cold
    for (int p = 0; p < kdim(); ++p) {
      int j = jcols_[p];
      if (x_[j] < vlb_[j] - 1e-6 || x_[j] > vub_[j] + 1e-6) return false;
    }
    for (int r = 0; r < m_; ++r) {
      int u = unit_basic_[r];
      if (u >= 0 && (x_[u] < vlb_[u] - 1e-6 || x_[u] > vub_[u] + 1e-6)) {
        return false;
      }
    }
    return true;
  }

  // ---- factorization -----------------------------------------------------

  bool factorize() {
    int t = kdim();
    ks_ = std::max(t, ks_);
    std::vector<double> k(static_cast<size_t>(t) * t, 0.0);
    for (int p = 0; p < t; ++p) {
      int j = jcols_[p];
      for (int e = colstart_[j]; e < colstart_[j + 1]; ++e) {
        int a = row_tpos_[colrow_[e]];
        if (a >= 0) k[static_cast<size_t>(a) * t + p] = colval_[e];
      }
    }
    // Gauss-Jordan with partial pivoting
    std::vector<double> inv(static_cast<size_t>(t) * t, 0.0);
    for (int i = 0; i < t; ++i) inv[static_cast<size_t>(i) * t + i] = 1.0;
    std::vector<int> perm(t);
    for (int i = 0; i < t; ++i) perm[i] = i;
    for (int c = 0; c < t; ++c) {
      int piv = -1;
      double best = 1e-11;
      for (int r = c; r < t; ++r) {
        double v = std::abs(k[static_cast<size_t>(r) * t + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) return false;
      if (piv != c) {
        for (int q = 0; q < t; ++q) {
          std::swap(k[static_cast<size_t>(piv) * t + q], k[static_cast<size_t>(c) * t + q]);
          std::swap(inv[static_cast<size_t>(piv) * t + q], inv[static_cast<size_t>(c) * t + q]);
        }
      }
      double d = 1.0 / k[static_cast<size_t>(c) * t + c];
      for (int q = 0; q < t; ++q) {
        k[static_cast<size_t>(c) * t + q] *= d;
        inv[static_cast<size_t>(c) * t + q] *= d;
      }
      for (int r = 0; r < t; ++r) {
        if (r == c) continue;
        double f = k[static_cast<size_t>(r) * t + c];
        if (f == 0.0) continue;
        for (int q = 0; q < t; ++q) {
          k[static_cast<size_t>(r) * t + q] -= f * k[static_cast<size_t>(c) * t + q];
          inv[static_cast<size_t>(r) * t + q] -= f * inv[static_cast<size_t>(c) * t + q];
        }
      }
    }
    // inv now holds K^-1 with plain t stride; copy into the strided store
    kinv_.assign(static_cast<size_t>(ks_) * ks_, 0.0);
    for (int i = 0; i < t; ++i) {
      std::memcpy(&kinv_[static_cast<size_t>(i) * ks_], &inv[static_cast<size_t>(i) * t],
                  sizeof(double) * t);
    }
    pivots_since_factor_ = 0;
    return true;
  }

  // mends a singular basis in place: drops kernel columns that are linearly
  // dependent on the others and covers the rows left behind with their slacks.
  // The repaired basis is nonsingular but may be primal infeasible; the caller
  // runs repair_feasibility afterwards. Returns false if nothing was mended.
  bool repair_basis() {
    int t = kdim();
    if (t == 0) return false;
    std::vector<double> k(static_cast<size_t>(t) * t, 0.0);
    for (int p = 0; p < t; ++p) {
      int j = jcols_[p];
      for (int e = colstart_[j]; e < colstart_[j + 1]; ++e) {
        int a = row_tpos_[colrow_[e]];
        if (a >= 0) k[static_cast<size_t>(a) * t + p] = colval_[e];
      }
    }
    // rank-revealing elimination: pivot rows are consumed one per independent
    // column; columns with no usable pivot among the free rows are dependent
    std::vector<char> row_used(t, 0), col_dep(t, 0);
    int dropped = 0;
    for (int c = 0; c < t; ++c) {
      int piv = -1;
      double best = 1e-11;
      for (int r = 0; r < t; ++r) {
        if (row_used[r]) continue;
        double v = std::abs(k[static_cast<size_t>(r) * t + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) {
        col_dep[c] = 1;
        ++dropped;
        continue;
      }
      row_used[piv] = 1;
      double d = 1.0 / k[static_cast<size_t>(piv) * t + c];
      for (int r = 0; r < t; ++r) {
        if (row_used[r]) continue;
        double f = k[static_cast<size_t>(r) * t + c] * d;
        if (f == 0.0) continue;
        for (int q = c; q < t; ++q) {
          k[static_cast<size_t>(r) * t + q] -= f * k[static_cast<size_t>(piv) * t + q];
        }
      }
    }
    if (dropped == 0) return false;
    std::vector<int> keep;
    keep.reserve(t - dropped);
    for (int p = 0; p < t; ++p) {
      int j = jcols_[p];
      if (col_dep[p]) {
        double v = nearest_bound(j);
        x_[j] = v;
        stat_[j] = nonbasic_status_at(j, v);
        col_jpos_[j] = -1;
      } else {
        keep.push_back(j);
      }
    }
    for (int a = 0; a < t; ++a) {
      if (row_used[a]) continue;
      int r = trows_[a];
      int sc = n_ + r;  // this slack was nonbasic while the kernel held its row
      unit_basic_[r] = sc;
      stat_[sc] = VarStatus::Basic;
    }
    jcols_ = keep;
    trows_.clear();
    row_tpos_.assign(m_, -1);
    for (int r = 0; r < m_; ++r) {
      if (unit_basic_[r] >= 0) continue;
      row_tpos_[r] = static_cast<int>(trows_.size());
      trows_.push_back(r);
    }
    for (std::size_t p = 0; p < jcols_.size(); ++p) col_jpos_[jcols_[p]] = static_cast<int>(p);
    if (static_cast<int>(trows_.size()) != kdim()) return false;
    if (!factorize()) return false;
    kernel_dirty_ = false;
    compute_basic_values();
    return true;
  }

  void ensure_capacity(int t) {
    if (t <= ks_) return;
    int nks = std::max(t, ks_ + ks_ / 2 + 8);
    std::vector<double> nk(static_cast<size_t>(nks) * nks, 0.0);
    int old = kdim() - 1;  // called right before appending row/col data
    for (int i = 0; i <= old; ++i) {
      std::memcpy(&nk[static_cast<size_t>(i) * nks], &kinv_[static_cast<size_t>(i) * ks_],
                  sizeof(double) * (old + 1));
    }
    kinv_.swap(nk);
    ks_ = nks;
  }

  void compute_basic_values() {
    std::vector<double> resid(model_.rhs);
    for (int c = 0; c < ncols_; ++c) {
      if (stat_[c] == VarStatus::Basic || x_[c] == 0.0) continue;
      if (c < n_) {
        for (int t = colstart_[c]; t < colstart_[c + 1]; ++t) {
          resid[colrow_[t]] -= colval_[t] * x_[c];
        }
      } else {
        resid[unit_row(c)] -= unit_sign(c) * x_[c];
      }
    }
    int t = kdim();
    std::vector<double> xt(t, 0.0);
    for (int p = 0; p < t; ++p) {
      const double* row = &kinv_[static_cast<size_t>(p) * ks_];
      double acc = 0.0;
      for (int a = 0; a < t; ++a) acc += row[a] * resid[trows_[a]];
      xt[p] = acc;
    }
    std::vector<double> acc(m_, 0.0);
    for (int p = 0; p < t; ++p) {
      int j = jcols_[p];
      x_[j] = xt[p];
      if (xt[p] == 0.0) continue;
      for (int e = colstart_[j]; e < colstart_[j + 1]; ++e) {
        acc[colrow_[e]] += colval_[e] * xt[p];
      }
    }
    for (int r = 0; r < m_; ++r) {
      int u = unit_basic_[r];
      if (u >= 0) x_[u] = (resid[r] - acc[r]) / unit_sign(u);
    }
  }

  void compute_duals(const std::vector<double>& c) {
    // every row is covered by either a unit basic or a kernel row, so each
    // entry of y_ is written exactly once and no pre-clear is needed
    y_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      int u = unit_basic_[r];
      y_[r] = u >= 0 ? c[u] / unit_sign(u) : 0.0;
    }
    int t = kdim();
    std::vector<double> rhs(t, 0.0);
    for (int p = 0; p < t; ++p) {
      int j = jcols_[p];
      double acc = c[j];
      for (int e = colstart_[j]; e < colstart_[j + 1]; ++e) {
        int r = colrow_[e];
        if (row_tpos_[r] < 0) acc -= colval_[e] * y_[r];
      }
      rhs[p] = acc;
    }
    std::vector<double> acc(t, 0.0);
    for (int p = 0; p < t; ++p) {
      if (rhs[p] == 0.0) continue;
      const double* row = &kinv_[static_cast<size_t>(p) * ks_];
      for (int a = 0; a < t; ++a) acc[a] += rhs[p] * row[a];
    }
    for (int a = 0; a < t; ++a) y_[trows_[a]] = acc[a];
  }

  double reduced_cost(const std::vector<double>& c, int col) const {
    double d = c[col];
    if (col < n_) {
      for (int t = colstart_[col]; t < colstart_[col + 1]; ++t) {
        d -= colval_[t] * y_[colrow_[t]];
      }
    } else {
      d -= unit_sign(col) * y_[unit_row(col)];
    }
    return d;
  }

  // entering direction: solves B * dir = A_entering
  void ftran(int q) {
    int t = kdim();
    std::vector<std::pair<int, double>> at;  // sparse entering column in kernel rows
    if (q < n_) {
      for (int e = colstart_[q]; e < colstart_[q + 1]; ++e) {
        int a = row_tpos_[colrow_[e]];
        if (a >= 0) at.emplace_back(a, colval_[e]);
      }
    } else {
      int a = row_tpos_[unit_row(q)];
      if (a >= 0) at.emplace_back(a, unit_sign(q));
    }
    dj_.assign(t, 0.0);
    if (static_cast<int>(at.size()) * 8 < t) {
      // few nonzeros: strided column walks touch far less of the inverse
      for (auto [a, v] : at) {
        const double* col = &kinv_[a];
        for (int p = 0; p < t; ++p) dj_[p] += col[static_cast<size_t>(p) * ks_] * v;
      }
    } else {
      std::vector<double> full(t, 0.0);
      for (auto [a, v] : at) full[a] = v;
      for (int p = 0; p < t; ++p) {
        const double* row = &kinv_[static_cast<size_t>(p) * ks_];
        double acc = 0.0;
        for (int a = 0; a < t; ++a) acc += row[a] * full[a];
        dj_[p] = acc;
      }
    }
    accs_.resize(m_, 0.0);
    for (int r : accs_touched_) accs_[r] = 0.0;
    accs_touched_.clear();
    for (int p = 0; p < t; ++p) {
      if (dj_[p] == 0.0) continue;
      int j = jcols_[p];
      for (int e = colstart_[j]; e < colstart_[j + 1]; ++e) {
        int r = colrow_[e];
        if (accs_[r] == 0.0) accs_touched_.push_back(r);
        accs_[r] += colval_[e] * dj_[p];
      }
    }
  }

  double unit_direction(int r, int q) const {
    // direction component of the basic unit variable on row r
    double aq = 0.0;
    if (q < n_) {
      aq = col_value_at_row(q, r);
    } else if (unit_row(q) == r) {
      aq = unit_sign(q);
    }
    return (aq - accs_[r]) / unit_sign(unit_basic_[r]);
  }

  // ---- kernel updates ----------------------------------------------------

  void kernel_grow(int new_row, int new_col) {
    int t = kdim();
    ensure_capacity(t + 1);
    std::vector<double> u(t, 0.0);  // new kernel column over old rows
    for (int e = colstart_[new_col]; e < colstart_[new_col + 1]; ++e) {
      int a = row_tpos_[colrow_[e]];
      if (a >= 0) u[a] = colval_[e];
    }
    std::vector<double> v(t, 0.0);  // new kernel row over old columns
    for (int p = 0; p < t; ++p) v[p] = col_value_at_row(jcols_[p], new_row);
    double w = col_value_at_row(new_col, new_row);
    std::vector<double> ku(t, 0.0), vk(t, 0.0);
    for (int p = 0; p < t; ++p) {
      const double* row = &kinv_[static_cast<size_t>(p) * ks_];
      double acc = 0.0;
      for (int a = 0; a < t; ++a) acc += row[a] * u[a];
      ku[p] = acc;
    }
    for (int p = 0; p < t; ++p) {
      if (v[p] == 0.0) continue;
      const double* row = &kinv_[static_cast<size_t>(p) * ks_];
      for (int a = 0; a < t; ++a) vk[a] += v[p] * row[a];
    }
    double s = w;
    for (int p = 0; p < t; ++p) s -= v[p] * ku[p];
    // a marginal pivot poisons the incremental inverse; refactorize right after
    if (std::abs(s) < 1e-7) kernel_dirty_ = true;
    if (std::abs(s) < 1e-11) s = s >= 0 ? 1e-11 : -1e-11;
    for (int p = 0; p < t; ++p) {
      double f = ku[p] / s;
      double* row = &kinv_[static_cast<size_t>(p) * ks_];
      for (int a = 0; a < t; ++a) row[a] += f * vk[a];
      row[t] = -f;
    }
    double* last = &kinv_[static_cast<size_t>(t) * ks_];
    for (int a = 0; a < t; ++a) last[a] = -vk[a] / s;
    last[t] = 1.0 / s;
    row_tpos_[new_row] = t;
    trows_.push_back(new_row);
    col_jpos_[new_col] = t;
    jcols_.push_back(new_col);
  }

  void kernel_replace_col(int pos, int new_col) {
    // dj_ already holds K^-1 * (A_newcol)_T from the ftran
    int t = kdim();
    double piv = dj_[pos];
    if (std::abs(piv) < 1e-7) kernel_dirty_ = true;
    double* rp = &kinv_[static_cast<size_t>(pos) * ks_];
    double inv = 1.0 / piv;
    for (int a = 0; a < t; ++a) rp[a] *= inv;
    for (int p = 0; p < t; ++p) {
      if (p == pos || dj_[p] == 0.0) continue;
      double f = dj_[p];
      double* row = &kinv_[static_cast<size_t>(p) * ks_];
      for (int a = 0; a < t; ++a) row[a] -= f * rp[a];
    }
    col_jpos_[jcols_[pos]] = -1;
    jcols_[pos] = new_col;
    col_jpos_[new_col] = pos;
  }

  void kernel_replace_row(int pos, int new_row) {
    int t = kdim();
    std::vector<double> v(t, 0.0);
    for (int p = 0; p < t; ++p) v[p] = col_value_at_row(jcols_[p], new_row);
    std::vector<double> g(t, 0.0);
    for (int p = 0; p < t; ++p) {
      if (v[p] == 0.0) continue;
      const double* row = &kinv_[static_cast<size_t>(p) * ks_];
      for (int a = 0; a < t; ++a) g[a] += v[p] * row[a];
    }
    double piv = g[pos];
    if (std::abs(piv) < 1e-7) kernel_dirty_ = true;
    if (std::abs(piv) < 1e-11) piv = piv >= 0 ? 1e-11 : -1e-11;
    double inv = 1.0 / piv;
    for (int p = 0; p < t; ++p) kinv_[static_cast<size_t>(p) * ks_ + pos] *= inv;
    for (int a = 0; a < t; ++a) {
      if (a == pos || g[a] == 0.0) continue;
      double f = g[a];
      for (int p = 0; p < t; ++p) {
        kinv_[static_cast<size_t>(p) * ks_ + a] -=
            f * kinv_[static_cast<size_t>(p) * ks_ + pos];
      }
    }
    row_tpos_[trows_[pos]] = -1;
    trows_[pos] = new_row;
    row_tpos_[new_row] = pos;
  }

  bool kernel_shrink(int rpos, int cpos) {
    int t = kdim();
    double piv = kinv_[static_cast<size_t>(cpos) * ks_ + rpos];
    if (std::abs(piv) < 1e-11) return false;
    if (std::abs(piv) < 1e-7) kernel_dirty_ = true;
    for (int p = 0; p < t; ++p) {
      if (p == cpos) continue;
      double f = kinv_[static_cast<size_t>(p) * ks_ + rpos] / piv;
      if (f == 0.0) continue;
      double* row = &kinv_[static_cast<size_t>(p) * ks_];
      const double* prow = &kinv_[static_cast<size_t>(cpos) * ks_];
      for (int a = 0; a < t; ++a) row[a] -= f * prow[a];
    }
    int last = t - 1;
    row_tpos_[trows_[rpos]] = -1;
    col_jpos_[jcols_[cpos]] = -1;
    // move last kernel row (column position) into cpos
    if (cpos != last) {
      std::memcpy(&kinv_[static_cast<size_t>(cpos) * ks_],
                  &kinv_[static_cast<size_t>(last) * ks_], sizeof(double) * t);
      jcols_[cpos] = jcols_[last];
      col_jpos_[jcols_[cpos]] = cpos;
    }
    // move last kernel column (row position) into rpos
    if (rpos != last) {
      for (int p = 0; p < last; ++p) {
        kinv_[static_cast<size_t>(p) * ks_ + rpos] =
            kinv_[static_cast<size_t>(p) * ks_ + last];
      }
      trows_[rpos] = trows_[last];
      row_tpos_[trows_[rpos]] = rpos;
    }
    jcols_.pop_back();
    trows_.pop_back();
    return true;
  }

  // ---- iteration ---------------------------------------------------------

  int price(const std::vector<double>& c, double* score_out) {
    int best = -1;
    double best_score = opts_.opt_tol;
    for (int col = 0; col < ncols_; ++col) {
      if (stat_[col] == VarStatus::Basic) continue;
      if (is_artificial(col)) continue;  // artificials never re-enter
      if (vub_[col] - vlb_[col] < 1e-13) continue;
      double d = reduced_cost(c, col);
      double score = 0.0;
      if (stat_[col] == VarStatus::AtLower && d > opts_.opt_tol) {
        score = d;
      } else if (stat_[col] == VarStatus::AtUpper && d < -opts_.opt_tol) {
        score = -d;
      } else if (stat_[col] == VarStatus::FreeNonbasic &&
                 std::abs(d) > opts_.opt_tol) {
        score = std::abs(d);
      } else {
        continue;
      }
      if (bland_) {
        *score_out = d;
        return col;  // lowest index eligible
      }
      if (score > best_score) {
        best_score = score;
        best = col;
        *score_out = d;
      }
    }
    return best;
  }

  // deterministic tie-breaking noise on the objective; resolved by a clean
  // re-optimization pass once the perturbed problem is optimal
  void perturb_costs(std::vector<double>& c, int salt) {
    for (int j = 0; j < ncols_; ++j) {
      if (is_artificial(j)) continue;
      if (vub_[j] - vlb_[j] < 1e-13) continue;
      std::uint64_t h = (static_cast<std::uint64_t>(j) + 1 +
                         (static_cast<std::uint64_t>(salt) << 32)) *
                        0x9E3779B97F4A7C15ull;
      h ^= h >> 31;
      h *= 0xBF58476D1CE4E5B9ull;
      h ^= h >> 27;
      double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      c[j] += 1e-6 * (1.0 + std::abs(c[j])) * u;
    }
  }

  Outcome simplex_loop(std::vector<double>& c, bool phase1, long* iters,
                       bool allow_perturb) {
    while (*iters < opts_.max_iters) {
      compute_duals(c);
      double d_enter = 0.0;
      int q = price(c, &d_enter);
      if (q < 0) return Outcome::OptimalPhase;
      ++(*iters);
      double sigma;
      if (stat_[q] == VarStatus::AtLower) {
        sigma = 1.0;
      } else if (stat_[q] == VarStatus::AtUpper) {
        sigma = -1.0;
      } else {
        sigma = d_enter > 0 ? 1.0 : -1.0;
      }
      ftran(q);
      // ratio test
      double limit = vub_[q] - vlb_[q];  // inf for one-sided/free
      double best = limit;
      int leave_col = -1;  // -1: entering hits its own opposite bound
      int leave_kind = 0;  // 1: structural basic, 2: unit basic
      int leave_pos = -1;
      int leave_bound = 0;    // 0 lower, 1 upper
      double leave_rate = 0;  // |pivot| of the current pick
      const double piv_tol = 1e-9;
      int t = kdim();
      for (int p = 0; p < t; ++p) {
        double rate = -sigma * dj_[p];
        if (std::abs(rate) <= piv_tol) continue;
        int j = jcols_[p];
        double room, hit;
        if (rate > 0) {
          if (!std::isfinite(vub_[j])) continue;
          room = (vub_[j] - x_[j]) / rate;
          hit = 1;
        } else {
          if (!std::isfinite(vlb_[j])) continue;
          room = (x_[j] - vlb_[j]) / (-rate);
          hit = 0;
        }
        if (room < -1e-12) room = 0.0;
        // ties go to the largest pivot for numerical stability
        if (room < best - 1e-12 ||
            (room < best + 1e-12 &&
             (leave_col == -1 || std::abs(rate) > leave_rate + 1e-12 ||
              (std::abs(rate) > leave_rate - 1e-12 && j < leave_col)))) {
          best = std::max(room, 0.0);
          leave_col = j;
          leave_kind = 1;
          leave_pos = p;
          leave_bound = static_cast<int>(hit);
          leave_rate = std::abs(rate);
        }
      }
      for (int r = 0; r < m_; ++r) {
        int u = unit_basic_[r];
        if (u < 0) continue;
        double db = unit_direction(r, q);
        double rate = -sigma * db;
        if (std::abs(rate) <= piv_tol) continue;
        double room, hit;
        if (rate > 0) {
          if (!std::isfinite(vub_[u])) continue;
          room = (vub_[u] - x_[u]) / rate;
          hit = 1;
        } else {
          if (!std::isfinite(vlb_[u])) continue;
          room = (x_[u] - vlb_[u]) / (-rate);
          hit = 0;
        }
        if (room < -1e-12) room = 0.0;
        if (room < best - 1e-12 ||
            (room < best + 1e-12 &&
             (leave_col == -1 || std::abs(rate) > leave_rate + 1e-12 ||
              (std::abs(rate) > leave_rate - 1e-12 && u < leave_col)))) {
          best = std::max(room, 0.0);
          leave_col = u;
          leave_kind = 2;
          leave_pos = r;
          leave_bound = static_cast<int>(hit);
          leave_rate = std::abs(rate);
        }
      }
      if (!std::isfinite(best)) {
        return phase1 ? Outcome::Singular : Outcome::Unbounded;
      }
      double step = best;
      degen_streak_ = step < 1e-12 ? degen_streak_ + 1 : 0;
      if (allow_perturb && !perturbed_ && !phase1 && degen_streak_ > 200) {
        perturb_costs(c, perturb_salt_);
        perturbed_ = true;
        continue;  // reprice under the perturbed objective
      }
      if (degen_streak_ > 500) bland_ = true;
      if (degen_streak_ == 0 && bland_) bland_ = false;

      // apply the step to all basic variables
      if (step != 0.0) {
        for (int p = 0; p < t; ++p) {
          if (dj_[p] != 0.0) x_[jcols_[p]] -= sigma * step * dj_[p];
        }
        for (int r = 0; r < m_; ++r) {
          int u = unit_basic_[r];
          if (u < 0) continue;
          x_[u] -= sigma * step * unit_direction(r, q);
        }
        x_[q] += sigma * step;
      }

      if (leave_col == -1) {
        // bound flip, no basis change
        stat_[q] = sigma > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
        x_[q] = sigma > 0 ? vub_[q] : vlb_[q];
        continue;
      }
      // snap the leaving variable exactly onto its bound
      x_[leave_col] = leave_bound ? vub_[leave_col] : vlb_[leave_col];
      stat_[leave_col] = leave_bound ? VarStatus::AtUpper : VarStatus::AtLower;
      stat_[q] = VarStatus::Basic;

      bool ok = true;
      if (q < n_) {
        if (leave_kind == 1) {
          kernel_replace_col(leave_pos, q);
        } else {
          int r = leave_pos;
          unit_basic_[r] = -1;
          kernel_grow(r, q);
        }
      } else {
        int r = unit_row(q);
        if (leave_kind == 2 && leave_pos == r) {
          unit_basic_[r] = q;  // unit-for-unit on the same row
        } else if (leave_kind == 2) {
          // a drifted direction can nominate this exchange while another unit
          // variable still covers row r; the basis would be singular
          if (row_tpos_[r] < 0) { std::fprintf(stderr, "DBG singular: row_tpos guard\n"); return Outcome::Singular; }
          unit_basic_[leave_pos] = -1;
          unit_basic_[r] = q;
          kernel_replace_row(row_tpos_[r], leave_pos);
        } else {
          int rpos = row_tpos_[r];
          ok = kernel_shrink(rpos, leave_pos);
          if (ok) unit_basic_[r] = q;
        }
      }
      ++pivots_since_factor_;
      if (!ok || kernel_dirty_ || pivots_since_factor_ >= 64) {
        if (!factorize()) { std::fprintf(stderr, "DBG singular: factorize fail (ok=%d dirty=%d)\n", (int)ok, (int)kernel_dirty_); return Outcome::Singular; }
        kernel_dirty_ = false;
        compute_basic_values();
      }
    }
    return Outcome::IterLimit;
  }

  // puts every nonbasic variable back onto a bound after bound edits
  void snap_nonbasics() {
    for (int col = 0; col < ncols_; ++col) {
      switch (stat_[col]) {
        case VarStatus::Basic:
          break;
        case VarStatus::AtLower:
          if (std::isfinite(vlb_[col])) {
            x_[col] = vlb_[col];
          } else {
            x_[col] = nearest_bound(col);
            stat_[col] = nonbasic_status_at(col, x_[col]);
          }
          break;
        case VarStatus::AtUpper:
          if (std::isfinite(vub_[col])) {
            x_[col] = vub_[col];
          } else {
            x_[col] = nearest_bound(col);
            stat_[col] = nonbasic_status_at(col, x_[col]);
          }
          break;
        case VarStatus::FreeNonbasic:
          break;
      }
    }
  }

  // warm phase 1 from the current basis: relax the bounds of the violated
  // basic variables to their current values and drive the total violation to
  // zero. Returns 1 on success, 0 if the problem is infeasible, -1 on
  // numerical trouble (caller falls back to a cold start).
  int repair_feasibility(long* iters) {
    std::vector<std::tuple<int, double, double>> saved;
    std::vector<double> costr(ncols_, 0.0);
    for (int col = 0; col < ncols_; ++col) {
      if (stat_[col] != VarStatus::Basic) continue;
      if (x_[col] > vub_[col] + opts_.feas_tol) {
        saved.push_back({col, vlb_[col], vub_[col]});
        vub_[col] = x_[col];
        costr[col] = -1.0;
      } else if (x_[col] < vlb_[col] - opts_.feas_tol) {
        saved.push_back({col, vlb_[col], vub_[col]});
        vlb_[col] = x_[col];
        costr[col] = 1.0;
      }
    }
    if (saved.empty()) return 1;
    Outcome o = simplex_loop(costr, true, iters, false);
    double viol = 0.0;
    for (auto& [col, lo, hi] : saved) {
      viol += std::max(0.0, x_[col] - hi) + std::max(0.0, lo - x_[col]);
    }
    for (auto& [col, lo, hi] : saved) {
      vlb_[col] = lo;
      vub_[col] = hi;
    }
    if (o != Outcome::OptimalPhase) return -1;
    double scale = 1.0;
    for (double b : model_.rhs) scale = std::max(scale, std::abs(b));
    if (viol > 1e-6 * scale) return 0;
    // snap any repaired variable that went nonbasic onto its restored bound
    bool snapped = false;
    for (auto& [col, lo, hi] : saved) {
      if (stat_[col] == VarStatus::Basic) continue;
      double want = stat_[col] == VarStatus::AtUpper ? hi : lo;
      if (x_[col] != want) {
        x_[col] = want;
        snapped = true;
      }
    }
    if (snapped) compute_basic_values();
    return 1;
  }

  bool basics_feasible(double tol) const {
    for (int col = 0; col < ncols_; ++col) {
      if (stat_[col] != VarStatus::Basic) continue;
      if (x_[col] < vlb_[col] - tol || x_[col] > vub_[col] + tol) return false;
    }
    return true;
  }

  void export_basis(Basis* out) const {
    out->structural.assign(stat_.begin(), stat_.begin() + n_);
    out->slack.assign(stat_.begin() + n_, stat_.begin() + n_ + m_);
    // a basic artificial stands in for its row's slack in the snapshot
    for (int r = 0; r < m_; ++r) {
      int u = unit_basic_[r];
      if (u >= 0 && is_artificial(u)) out->slack[r] = VarStatus::Basic;
    }
  }
};

LpSolution Simplex::run(const Basis* warm, Basis* basis_out, bool keep_state) {
  LpSolution sol;
  accs_.assign(m_, 0.0);
  bool from_state = keep_state && state_valid_;
  state_valid_ = false;
  bool warmed = !from_state && warm != nullptr && warm_start(*warm);
  // a singular basis is first mended in place (repair_basis); once the repair
  // budget is spent it triggers a cold restart with a fresh iteration budget
  int repairs = 0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (from_state) {
      snap_nonbasics();
      compute_basic_values();
    } else if (!warmed) {
      // drop any artificial columns left over from a previous attempt
      ncols_ = n_ + m_;
      vlb_.resize(ncols_);
      vub_.resize(ncols_);
      cold_start();
    }
    bland_ = false;
    degen_streak_ = 0;
    kernel_dirty_ = false;
    perturbed_ = false;
    cost2_.assign(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) cost2_[j] = model_.obj[j];
    long iters = 0;
    bool singular = false;

    if (from_state) {
      from_state = false;  // one shot; failures fall back to cold attempts
      int r = repair_feasibility(&iters);
      if (r == 0) {
        // a mended basis may still carry drift; only a clean warm state is
        // trusted to declare infeasibility, a repair falls back to cold
        if (repairs > 0) {
          warmed = false;
          continue;
        }
        sol.status = SolveStatus::Infeasible;
        state_valid_ = true;  // the basis itself is still coherent
        return sol;
      }
      if (r < 0) {
        std::fprintf(stderr, "DBG repair failed attempt=%d\n", attempt);
        warmed = false;
        continue;
      }
      cost1_.assign(ncols_, 0.0);
    } else if (!art_row_.empty()) {
      cost1_.assign(ncols_, 0.0);
      for (int a = 0; a < static_cast<int>(art_row_.size()); ++a) {
        cost1_[n_ + m_ + a] = -1.0;
      }
      Outcome o = simplex_loop(cost1_, true, &iters, false);
      if (o == Outcome::IterLimit) {
        std::fprintf(stderr, "DBG phase1 iterlimit attempt=%d iters=%ld\n", attempt, iters);
        sol.status = SolveStatus::NumericalFailure;
        return sol;
      }
      if (o != Outcome::OptimalPhase) singular = true;
      if (!singular) {
        double infeas = 0.0;
        for (int a = 0; a < static_cast<int>(art_row_.size()); ++a) {
          infeas += std::max(0.0, x_[n_ + m_ + a]);
        }
        double scale = 1.0;
        for (double b : model_.rhs) scale = std::max(scale, std::abs(b));
        if (infeas > 1e-6 * scale) {
          sol.status = SolveStatus::Infeasible;
          return sol;
        }
        for (int a = 0; a < static_cast<int>(art_row_.size()); ++a) {
          vub_[n_ + m_ + a] = 0.0;
          if (stat_[n_ + m_ + a] != VarStatus::Basic) x_[n_ + m_ + a] = 0.0;
        }
      }
    } else {
      cost1_.assign(ncols_, 0.0);
    }

    if (!singular) {
      const std::vector<double> clean = cost2_;
      perturb_salt_ = attempt;
      if (attempt > 0) {
        // a restart replays the same pivots unless the costs change up front
        perturb_costs(cost2_, attempt);
        perturbed_ = true;
      }
      Outcome o = Outcome::OptimalPhase;
      for (int round = 0; round < 4; ++round) {
        o = simplex_loop(cost2_, false, &iters, round == 0);
        if (o == Outcome::OptimalPhase && perturbed_) {
          // optimal for the perturbed costs; finish on the clean objective
          cost2_ = clean;
          perturbed_ = false;
          continue;
        }
        break;
      }
      if (o == Outcome::Unbounded) {
        sol.status = SolveStatus::Unbounded;
        return sol;
      }
      if (o == Outcome::IterLimit) {
        std::fprintf(stderr, "DBG phase2 iterlimit attempt=%d iters=%ld\n", attempt, iters);
        sol.status = SolveStatus::NumericalFailure;
        return sol;
      }
      if (o != Outcome::OptimalPhase) singular = true;
    }

    if (!singular) {
      // sanity-check the final point; refactorize and retry once on drift
      bool settled = false;
      compute_basic_values();
      if (basics_feasible(1e-6)) {
        settled = true;
      } else {
        for (int pass = 0; pass < 2 && !singular; ++pass) {
          if (!factorize()) {
            singular = true;
            break;
          }
          kernel_dirty_ = false;
          compute_basic_values();
          if (basics_feasible(1e-6)) {
            settled = true;
            break;
          }
          if (pass == 1) break;
          Outcome o = simplex_loop(cost2_, false, &iters, false);
          if (o != Outcome::OptimalPhase) singular = true;
        }
      }
      if (!singular && !settled) { std::fprintf(stderr, "DBG singular: persistent drift\n"); singular = true; }  // persistent drift: restart
    }

    if (singular) {
      std::fprintf(stderr, "DBG singular attempt=%d iters=%ld\n", attempt, iters);
      from_state = false;
      warmed = false;
      // repairing is only sound once phase 1 has pinned the artificials to 0
      bool art_open = false;
      for (std::size_t a = 0; a < art_row_.size(); ++a) {
        if (vub_[n_ + m_ + static_cast<int>(a)] == kInf) art_open = true;
      }
      if (!art_open && repairs < 3 && repair_basis()) {
        ++repairs;
        std::fprintf(stderr, "DBG repaired basis attempt=%d\n", attempt);
        from_state = true;  // resume phase 2 from the mended basis
      }
      continue;
    }

    compute_duals(cost2_);
    state_valid_ = true;
    sol.status = SolveStatus::Optimal;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.row_duals = y_;
    sol.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = reduced_cost(cost2_, j);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += model_.obj[j] * sol.x[j];
    sol.objective = obj;
    if (basis_out != nullptr) export_basis(basis_out);
    return sol;
  }
  std::fprintf(stderr, "DBG all attempts failed\n");
  sol.status = SolveStatus::NumericalFailure;
  return sol;
}

}  // namespace

LpSolution solve_lp(const LinearModel& model, const LpOptions& opts,
                    const Basis* warm_start, Basis* basis_out) {
  model.check();
  Simplex s(model, opts);
  return s.run(warm_start, basis_out);
}

struct IncrementalLp::Impl {
  LinearModel model;
  Simplex simplex;

  Impl(const LinearModel& m, const LpOptions& opts) : model(m), simplex(model, opts) {}
};

IncrementalLp::IncrementalLp(const LinearModel& model, const LpOptions& opts) {
  model.check();
  impl_ = std::make_unique<Impl>(model, opts);
}

IncrementalLp::~IncrementalLp() = default;
IncrementalLp::IncrementalLp(IncrementalLp&&) noexcept = default;
IncrementalLp& IncrementalLp::operator=(IncrementalLp&&) noexcept = default;

int IncrementalLp::add_var(double lower, double upper, double cost,
                           const std::vector<std::pair<int, double>>& column) {
  LinearModel& m = impl_->model;
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("IncrementalLp::add_var: bad bounds");
  }
  int j = m.add_var(lower, upper, cost, false);
  for (auto& [row, val] : column) {
    if (row < 0 || row >= m.num_rows() || !std::isfinite(val)) {
      throw std::invalid_argument("IncrementalLp::add_var: bad column entry");
    }
    m.add_entry(row, j, val);
  }
  impl_->simplex.sync_append(column);
  return j;
}

void IncrementalLp::set_bounds(int var, double lower, double upper) {
  LinearModel& m = impl_->model;
  if (var < 0 || var >= m.num_vars() || std::isnan(lower) || std::isnan(upper) ||
      lower > upper) {
    throw std::invalid_argument("IncrementalLp::set_bounds: bad arguments");
  }
  m.lb[var] = lower;
  m.ub[var] = upper;
  impl_->simplex.set_bounds(var, lower, upper);
}

const LinearModel& IncrementalLp::model() const { return impl_->model; }

LpSolution IncrementalLp::solve() {
  return impl_->simplex.run(nullptr, nullptr, /*keep_state=*/true);
}

namespace {

struct BnbNode {
  double bound;
  long id;
  int parent;
  int fix_var;
  char fix_val;
};

struct NodeOrder {
  bool operator()(const std::pair<double, long>& a,
                  const std::pair<double, long>& b) const {
    if (a.first != b.first) return a.first < b.first;  // best bound first
    return a.second > b.second;                        // then FIFO
  }
};

}  // namespace

IpSolution solve_bip(const LinearModel& model, const IpOptions& opts) {
  model.check();
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.is_integer[j] && (model.lb[j] < -1e-9 || model.ub[j] > 1 + 1e-9)) {
      throw std::invalid_argument("solve_bip: integer variable outside [0,1]");
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  if (const char* dump = std::getenv("MMSCHED_DUMP")) {
    if (FILE* f = std::fopen(dump, "w")) {
      std::fprintf(f, "%d %d %zu\n", model.num_vars(), model.num_rows(),
                   model.entries.size());
      for (int j = 0; j < model.num_vars(); ++j)
        std::fprintf(f, "%.17g %.17g %.17g %d\n", model.lb[j], model.ub[j],
                     model.obj[j], (int)model.is_integer[j]);
      for (int i = 0; i < model.num_rows(); ++i)
        std::fprintf(f, "%d %.17g\n", (int)model.sense[i], model.rhs[i]);
      for (const auto& e : model.entries)
        std::fprintf(f, "%d %d %.17g\n", e.row, e.col, e.val);
      std::fclose(f);
    }
    unsetenv("MMSCHED_DUMP");  // first model only
  }

  IpSolution out;
  IncrementalLp engine(model, opts.lp);
  std::vector<char> applied(model.num_vars(), -1);  // -1 free, else fixed value
  std::vector<char> want(model.num_vars(), -1);
  std::vector<BnbNode> nodes;
  std::priority_queue<std::pair<double, long>, std::vector<std::pair<double, long>>,
                      NodeOrder>
      open;

  double incumbent_obj = -kInf;
  std::vector<double> incumbent_x;
  long node_count = 0;
  bool hit_limit = false;

  nodes.push_back({kInf, 0, -1, -1, 0});
  open.push({kInf, 0});

  auto prune_tol = [&] {
    return std::max(1e-9 * (1.0 + std::abs(incumbent_obj)),
                    opts.rel_gap * std::abs(incumbent_obj));
  };

  std::vector<std::pair<int, char>> fixes;
  while (!open.empty() && !hit_limit) {
    auto [bound, idx] = open.top();
    open.pop();
    if (bound <= incumbent_obj + prune_tol()) {
      continue;
    }
    // plunge: follow the LP rounding downward, queueing each sibling; the
    // engine re-solves each child from the live parent basis
    long current = idx;
    while (true) {
      if (elapsed() > opts.time_limit_s || node_count >= opts.node_limit) {
        hit_limit = true;
        break;
      }
      // collect bound fixes along the path to the root
      fixes.clear();
      for (int p = static_cast<int>(current); p >= 0; p = nodes[p].parent) {
        if (nodes[p].fix_var >= 0)
          fixes.push_back({nodes[p].fix_var, nodes[p].fix_val});
      }
      std::fill(want.begin(), want.end(), static_cast<char>(-1));
      for (auto& [v, val] : fixes) want[v] = val;
      for (int j = 0; j < model.num_vars(); ++j) {
        if (want[j] == applied[j]) continue;
        if (want[j] < 0) {
          engine.set_bounds(j, model.lb[j], model.ub[j]);
        } else {
          engine.set_bounds(j, want[j], want[j]);
        }
        applied[j] = want[j];
      }
      ++node_count;
      LpSolution lp = engine.solve();
      if (lp.status == SolveStatus::Infeasible) break;
      if (lp.status == SolveStatus::Unbounded) {
        out.status = SolveStatus::Unbounded;
        out.node_count = node_count;
        return out;
      }
      if (lp.status != SolveStatus::Optimal) {
        std::fprintf(stderr, "DBG bnb node lp failure status=%d node=%ld\n",
                     (int)lp.status, node_count);
        out.status = SolveStatus::NumericalFailure;
        out.node_count = node_count;
        return out;
      }
      if (lp.objective <= incumbent_obj + prune_tol()) {
        break;
      }
      // branch on the most fractional flagged variable, preferring variables
      // that carry objective weight (they decide the bound; the zero-cost
      // indicators mostly follow)
      int branch_var = -1;
      double best_frac = opts.int_tol;
      bool best_costed = false;
      for (int j = 0; j < model.num_vars(); ++j) {
        if (!model.is_integer[j]) continue;
        double f = std::abs(lp.x[j] - std::round(lp.x[j]));
        if (f <= opts.int_tol) continue;
        bool costed = model.obj[j] != 0.0;
        if ((costed && !best_costed) ||
            (costed == best_costed && f > best_frac + 1e-12)) {
          best_frac = f;
          branch_var = j;
          best_costed = costed;
        }
      }
      if (branch_var < 0) {
        // integral: new incumbent
        incumbent_obj = lp.objective;
        incumbent_x = lp.x;
        for (int j = 0; j < model.num_vars(); ++j) {
          if (model.is_integer[j]) incumbent_x[j] = std::round(incumbent_x[j]);
        }
        break;
      }
      char toward = lp.x[branch_var] >= 0.5 ? 1 : 0;
      long away = static_cast<long>(nodes.size());
      nodes.push_back({lp.objective, away, static_cast<int>(current), branch_var,
                       static_cast<char>(1 - toward)});
      open.push({lp.objective, away});
      long next = static_cast<long>(nodes.size());
      nodes.push_back({lp.objective, next, static_cast<int>(current), branch_var,
                       toward});
      current = next;
    }
  }

  double open_bound = incumbent_obj;
  if (hit_limit) {
    // bound over the remaining open nodes
    std::priority_queue<std::pair<double, long>,
                        std::vector<std::pair<double, long>>, NodeOrder>
        rest = open;
    if (!rest.empty()) open_bound = std::max(open_bound, rest.top().first);
  }
  out.node_count = node_count;
  if (incumbent_x.empty()) {
    out.status = hit_limit ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
    out.best_bound = hit_limit ? open_bound : -kInf;
    return out;
  }
  out.status = hit_limit ? SolveStatus::TimeLimit : SolveStatus::Optimal;
  out.objective = incumbent_obj;
  out.x = incumbent_x;
  out.best_bound = hit_limit ? open_bound : incumbent_obj;
  return out;
}

}  // namespace mmsched
