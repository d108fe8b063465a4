#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace sauce {

struct NelderMeadOptions {
  int max_evaluations = 200;
  // Stop when the spread of objective values across the simplex falls below this.
  double value_tolerance = 1e-9;
  // ... or when every vertex lies within this distance of the best one.
  double size_tolerance = 1e-6;
};

template <typename Scalar, int Dim>
struct NelderMeadResult {
  Eigen::Matrix<Scalar, Dim, 1> x;
  Scalar value = std::numeric_limits<Scalar>::infinity();
  int evaluations = 0;
};

/// Downhill simplex with the standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite objective values are treated as
/// +infinity, so such points are never accepted over finite ones.
/// `on_evaluation(x, value)` is called after every objective evaluation.
template <typename Scalar, int Dim, typename Objective, typename Callback>
NelderMeadResult<Scalar, Dim> minimize_nelder_mead(Objective&& objective, const Eigen::Matrix<Scalar, Dim, 1>& start,
                                                   const Eigen::Matrix<Scalar, Dim, 1>& step,
                                                   const NelderMeadOptions& options, Callback&& on_evaluation) {
  using Vector = Eigen::Matrix<Scalar, Dim, 1>;
  NelderMeadResult<Scalar, Dim> result;
  auto eval = [&](const Vector& x) {
    Scalar v = objective(x);
    if (!std::isfinite(v)) v = std::numeric_limits<Scalar>::infinity();
    ++result.evaluations;
    on_evaluation(x, v);
    return v;
  };

  std::array<Vector, Dim + 1> simplex;
  std::array<Scalar, Dim + 1> values;
  simplex[0] = start;
  values[0] = eval(start);
  for (int i = 0; i < Dim; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1](i) += step(i);
    values[i + 1] = eval(simplex[i + 1]);
  }

  std::array<int, Dim + 1> order;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  };

  while (result.evaluations < options.max_evaluations) {
    sort_simplex();
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[Dim - 1];

    Scalar max_dist = 0;
    for (const Vector& v : simplex) max_dist = std::max(max_dist, (v - simplex[best]).norm());
    const bool flat = std::isfinite(values[worst]) && values[worst] - values[best] <= options.value_tolerance;
    if (flat || max_dist <= options.size_tolerance) break;

    Vector centroid = Vector::Zero(start.size());
    for (int i = 0; i < Dim; ++i) centroid += simplex[order[i]];
    centroid /= Scalar(Dim);

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const Scalar f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Vector expanded = centroid + Scalar(2) * (centroid - simplex[worst]);
      const Scalar f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    // Contract toward the better of the worst point and its reflection.
    const bool outside = f_reflected < values[worst];
    const Vector contracted = outside ? Vector(centroid + Scalar(0.5) * (reflected - centroid))
                                      : Vector(centroid + Scalar(0.5) * (simplex[worst] - centroid));
    const Scalar f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (int i = 0; i <= Dim; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + Scalar(0.5) * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  sort_simplex();
  result.x = simplex[order.front()];
  result.value = values[order.front()];
  return result;
}

template <typename Scalar, int Dim, typename Objective>
NelderMeadResult<Scalar, Dim> minimize_nelder_mead(Objective&& objective, const Eigen::Matrix<Scalar, Dim, 1>& start,
                                                   const Eigen::Matrix<Scalar, Dim, 1>& step,
                                                   const NelderMeadOptions& options = {}) {
  return minimize_nelder_mead(std::forward<Objective>(objective), start, step, options,
                              [](const Eigen::Matrix<Scalar, Dim, 1>&, Scalar) {});
}

}  // namespace sauce
