#include "pdl/prox.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pdl {

Vector soft_threshold(const Vector& v, double tau) {
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

Vector project_l1_ball(const Vector& v, double radius) {
  const double l1 = v.lpNorm<1>();
  if (l1 <= radius) {
    return v;
  }
  // Sort |v| descending and locate the largest k with
  // |v|_(k) > (sum_{i<=k} |v|_(i) - radius) / k; that quotient is the
  // threshold theta.
  std::vector<double> mags(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(v[i]);
  }
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] > candidate) {
      theta = candidate;
    } else {
      break;
    }
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - theta;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

Vector prox_linf(const Vector& v, double tau) {
  if (tau == 0.0) {
    return v;
  }
  if (v.lpNorm<1>() <= tau) {
    return Vector::Zero(v.size());
  }
  return v - tau * project_l1_ball(v / tau, 1.0);
}

Vector prox_l1_linf(const Vector& v, const ProxParams& p) {
  if (p.tau1 == 0.0) {
    return prox_linf(v, p.tau2);
  }
  return prox_linf(soft_threshold(v, p.tau1), p.tau2);
}

Matrix project_box(const Matrix& M, double lo, double hi) {
  return M.cwiseMax(lo).cwiseMin(hi);
}

void project_box_inplace(Matrix& M, double lo, double hi) {
  M = M.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace pdl
