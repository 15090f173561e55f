#pragma once

// Dense two-phase tableau simplex with Bland's pivoting rule.
//
//   minimize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
//
// Sized for a few hundred variables and a few thousand rows.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace stochorder::lp {

struct Problem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Optimal;
  Eigen::VectorXd x;
  double value = 0.0;
};

namespace detail {

class Tableau {
 public:
  static constexpr double kPivotEps = 1e-9;
  static constexpr double kCostEps = 1e-11;

  Tableau(const Problem& p) : n_(static_cast<int>(p.c.size())) {
    const int m_ub = static_cast<int>(p.b_ub.size());
    const int m_eq = static_cast<int>(p.b_eq.size());
    m_ = m_ub + m_eq;
    int n_art = m_eq;
    for (int i = 0; i < m_ub; ++i)
      if (p.b_ub(i) < 0) ++n_art;
    art_begin_ = n_ + m_ub;
    cols_ = art_begin_ + n_art;
    t_ = Dense::Zero(m_ + 2, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(m_), -1);

    int art = art_begin_;
    for (int i = 0; i < m_ub; ++i) {
      const double sign = p.b_ub(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * p.a_ub.row(i);
      t_(i, n_ + i) = sign;
      t_(i, cols_) = sign * p.b_ub(i);
      if (sign < 0) {
        t_(i, art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = n_ + i;
      }
    }
    for (int k = 0; k < m_eq; ++k) {
      const int i = m_ub + k;
      const double sign = p.b_eq(k) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * p.a_eq.row(k);
      t_(i, cols_) = sign * p.b_eq(k);
      t_(i, art) = 1.0;
      basis_[static_cast<std::size_t>(i)] = art++;
    }
    // Row m_: phase-two reduced costs. Row m_+1: phase-one reduced costs.
    t_.row(m_).head(n_) = p.c.transpose();
    for (int i = 0; i < m_; ++i)
      if (is_artificial(basis_[static_cast<std::size_t>(i)])) t_.row(m_ + 1) -= t_.row(i);
    for (int j = art_begin_; j < cols_; ++j) t_(m_ + 1, j) = 0.0;
  }

  Status run(int max_iter) {
    if (cols_ > art_begin_) {
      const Status s = optimize(m_ + 1, cols_, max_iter);
      if (s != Status::Optimal) return s;
      if (-t_(m_ + 1, cols_) > 1e-9) return Status::Infeasible;
      drive_out_artificials();
    }
    return optimize(m_, art_begin_, max_iter);
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b < n_) x(b) = t_(i, cols_);
    }
    return x;
  }

 private:
  bool is_artificial(int j) const { return j >= art_begin_; }

  void pivot(int r, int e) {
    t_.row(r) /= t_(r, e);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = t_(i, e);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = e;
  }

  // Bland: lowest-index improving column, then lowest basis index among ratio ties.
  Status optimize(int obj, int allowed_cols, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
      int e = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t_(obj, j) < -kCostEps) {
          e = j;
          break;
        }
      }
      if (e < 0) return Status::Optimal;
      int r = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = t_(i, e);
        if (a <= kPivotEps) continue;
        const double ratio = t_(i, cols_) / a;
        if (r < 0 || ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)])) {
          r = i;
          best = ratio;
        }
      }
      if (r < 0) return Status::Unbounded;
      pivot(r, e);
    }
    return Status::IterationLimit;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      for (int j = 0; j < art_begin_; ++j) {
        if (std::fabs(t_(i, j)) > kPivotEps) {
          pivot(i, j);
          break;
        }
      }
      // A row left with an artificial basic is redundant: it is zero on every
      // structural column and never changes again.
    }
  }

  int n_;
  int m_ = 0;
  int art_begin_ = 0;
  int cols_ = 0;
  using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Dense t_;
  std::vector<int> basis_;
};

}  // namespace detail

inline Solution solve(const Problem& p, int max_iter = 200000) {
  detail::Tableau tab(p);
  Solution s;
  s.status = tab.run(max_iter);
  if (s.status == Status::Optimal) {
    s.x = tab.primal();
    s.value = p.c.dot(s.x);
  }
  return s;
}

}  // namespace stochorder::lp
