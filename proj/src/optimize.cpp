#include "qkdguess/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qkdguess/error.hpp"

namespace qkdguess {

ScalarMax golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
}

ScalarMax grid_then_golden_max(const std::function<double(double)>& f, double lo, double hi, int grid_points,
                               double tol) {
  if (hi <= lo) return {lo, f(lo)};
  const int n = std::max(grid_points, 3);
  std::vector<double> xs(n);
  std::vector<double> fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
    fs[i] = f(xs[i]);
  }
  const auto best = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  ScalarMax result{xs[best], fs[best]};
  const double a = xs[std::max(best - 1, 0)];
  const double b = xs[std::min(best + 1, n - 1)];
  if (b - a > tol) {
    const ScalarMax refined = golden_section_max(f, a, b, tol);
    if (refined.value > result.value) result = refined;
  }
  return result;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double xtol, int max_iterations) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw Error(ErrorKind::NoCrossing, "no sign change on the bracket");
  for (int it = 0; it < max_iterations && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SimplexResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                              const SimplexOptions& options) {
  const auto n = static_cast<int>(x0.size());
  // Standard coefficients; minimizes g = -f.
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  SimplexResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    return -f(x);
  };
  for (int i = 0; i < n; ++i) pts[i + 1](i) += options.initial_step;
  for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<int> order(n + 1);
  while (res.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second = order[n - 1];

    double spread = 0.0;
    for (int i = 0; i <= n; ++i) spread = std::max(spread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (std::abs(vals[worst] - vals[best]) <= options.ftol && spread <= options.xtol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + kReflect * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + kContract * (xr - centroid))
                : Eigen::VectorXd(centroid + kContract * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + kShrink * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[best];
  res.value = -vals[best];
  return res;
}

}  // namespace qkdguess
