#include "esenc/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace esenc::opt {

namespace {
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double tol,
                             int max_evals) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult res;
  res.x = x0;

  std::vector<Eigen::VectorXd> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(x0);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = x0;
    // fminsearch-style initial displacement.
    v[i] += (v[i] != 0.0) ? 0.05 * v[i] : 0.00025;
    simplex.push_back(v);
  }

  std::vector<double> fv(n + 1);
  int evals = 0;
  for (int i = 0; i <= n; ++i) {
    fv[i] = f(simplex[i]);
    ++evals;
  }

  std::vector<int> order(n + 1);
  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<Eigen::VectorXd> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) {
      s2[i] = simplex[order[i]];
      f2[i] = fv[order[i]];
    }
    simplex.swap(s2);
    fv.swap(f2);
  };
  sort_simplex();

  while (evals < max_evals) {
    if (fv[n] - fv[0] <= tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + kReflect * (centroid - simplex[n]);
    const double fr = f(xr);
    ++evals;

    if (fr < fv[0]) {
      const Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      if (fr < fv[n]) {
        // Outside contraction.
        const Eigen::VectorXd xc = centroid + kContract * (xr - centroid);
        const double fc = f(xc);
        ++evals;
        if (fc <= fr) {
          simplex[n] = xc;
          fv[n] = fc;
        } else {
          for (int i = 1; i <= n; ++i) {
            simplex[i] = simplex[0] + kShrink * (simplex[i] - simplex[0]);
            fv[i] = f(simplex[i]);
            ++evals;
          }
        }
      } else {
        // Inside contraction.
        const Eigen::VectorXd xc = centroid - kContract * (centroid - simplex[n]);
        const double fc = f(xc);
        ++evals;
        if (fc < fv[n]) {
          simplex[n] = xc;
          fv[n] = fc;
        } else {
          for (int i = 1; i <= n; ++i) {
            simplex[i] = simplex[0] + kShrink * (simplex[i] - simplex[0]);
            fv[i] = f(simplex[i]);
            ++evals;
          }
        }
      }
    }
    sort_simplex();
  }

  sort_simplex();
  res.x = simplex[0];
  res.fx = fv[0];
  res.evals = evals;
  return res;
}

}  // namespace esenc::opt
