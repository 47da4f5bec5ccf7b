#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mmsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LE, EQ, GE };

/// Sparse linear model, maximization sense. Rows and variables are created
/// through add_row/add_var; coefficients are collected in triplet form.
struct LinearModel {
  std::vector<double> obj;
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<char> is_integer;

  std::vector<RowSense> sense;
  std::vector<double> rhs;

  struct Entry {
    int row;
    int col;
    double val;
  };
  std::vector<Entry> entries;

  int num_vars() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  int add_var(double lower, double upper, double cost, bool integer = false);
  int add_row(RowSense s, double right);
  void add_entry(int row, int col, double val);

  /// Throws std::invalid_argument on inconsistent dimensions, non-finite
  /// data, or integer variables with unbounded domains.
  void check() const;

  /// Plain-text listing for debugging.
  std::string to_text() const;
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  NumericalFailure,
  TimeLimit,
};

const char* to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
};

enum class VarStatus : char { AtLower, AtUpper, Basic, FreeNonbasic };

/// Simplex basis snapshot. Usable as a warm start as long as the model's
/// rows are unchanged; columns appended after the snapshot default to
/// nonbasic at a bound.
struct Basis {
  std::vector<VarStatus> structural;
  std::vector<VarStatus> slack;
};

struct LpOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  long max_iters = 500000;
};

/// Bounded-variable revised simplex. Integrality flags are ignored.
/// Deterministic: fixed pricing and ratio-test tie-breaking.
LpSolution solve_lp(const LinearModel& model, const LpOptions& opts = {},
                    const Basis* warm_start = nullptr,
                    Basis* basis_out = nullptr);

/// Reusable LP session. Keeps the simplex state (basis, factorization,
/// solution) alive between solves, so appending columns or changing variable
/// bounds re-solves in a handful of pivots instead of from scratch. Bound
/// tightenings that leave the old basis infeasible are repaired in place by a
/// warm phase-1 pass.
class IncrementalLp {
 public:
  explicit IncrementalLp(const LinearModel& model, const LpOptions& opts = {});
  ~IncrementalLp();
  IncrementalLp(IncrementalLp&&) noexcept;
  IncrementalLp& operator=(IncrementalLp&&) noexcept;

  /// Appends a structural variable with the given column; returns its index.
  int add_var(double lower, double upper, double cost,
              const std::vector<std::pair<int, double>>& column);
  void set_bounds(int var, double lower, double upper);
  const LinearModel& model() const;
  LpSolution solve();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct IpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  double best_bound = 0.0;
  long node_count = 0;
};

struct IpOptions {
  double int_tol = 1e-6;
  double time_limit_s = kInf;
  long node_limit = 2000000;
  double rel_gap = 0.0;  // stop once the bound is within this relative gap
  LpOptions lp;
};

/// Branch and bound for binary integer programs: best-bound node selection
/// with LP-guided plunging, most-fractional branching preferring variables
/// with objective weight. All flagged variables must have bounds within
/// [0, 1]. A nonzero rel_gap prunes nodes whose bound cannot improve the
/// incumbent by more than that fraction; the result is still reported as
/// Optimal.
IpSolution solve_bip(const LinearModel& model, const IpOptions& opts = {});

}  // namespace mmsched
