#pragma once

// Independent reference computations used to check the library.

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "topicpref/evaluation.hpp"
#include "topicpref/factorization.hpp"

namespace oracles {

// Per-cell objective: (r - p.q)^2 + lp |p|^2 + lq |q|^2.
inline double cell_objective(const std::vector<double>& p, const std::vector<double>& q, double r, double lp,
                             double lq) {
  double pq = 0.0, pp = 0.0, qq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    pq += p[i] * q[i];
    pp += p[i] * p[i];
    qq += q[i] * q[i];
  }
  return (r - pq) * (r - pq) + lp * pp + lq * qq;
}

// Central-difference gradient of cell_objective; first p's entries, then q's.
inline std::vector<double> numeric_gradient(std::vector<double> p, std::vector<double> q, double r, double lp,
                                            double lq, double h = 1e-6) {
  std::vector<double> g;
  for (auto* v : {&p, &q}) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      const double keep = (*v)[i];
      (*v)[i] = keep + h;
      const double up = cell_objective(p, q, r, lp, lq);
      (*v)[i] = keep - h;
      const double down = cell_objective(p, q, r, lp, lq);
      (*v)[i] = keep;
      g.push_back((up - down) / (2.0 * h));
    }
  }
  return g;
}

struct Counted {
  std::size_t correct = 0;
  std::size_t kept = 0;
  std::size_t users = 0;
};

// Straight loop over the test cells: count each user's training cells by
// scanning, recompute p.q from the raw factor arrays, compare signs.
inline Counted brute_sign_accuracy(const topicpref::FactorModel& model,
                                   const std::vector<topicpref::HeldOutCell>& test, std::size_t theta,
                                   const topicpref::SparseMatrix& train) {
  Counted c;
  std::map<std::size_t, bool> users;
  const std::size_t k = model.k();
  for (const auto& cell : test) {
    std::size_t known = 0;
    for (const auto& t : train.cells()) known += t.row == cell.row ? 1 : 0;
    if (known <= theta) continue;
    double pred = 0.0;
    for (std::size_t d = 0; d < k; ++d) pred += model.p()[cell.row * k + d] * model.q()[cell.col * k + d];
    const bool pred_pos = !(pred < 0.0);
    const bool ref_pos = !(cell.value < 0.0);
    c.correct += pred_pos == ref_pos ? 1 : 0;
    ++c.kept;
    users[cell.row] = true;
  }
  c.users = users.size();
  return c;
}

}  // namespace oracles
