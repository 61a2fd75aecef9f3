#pragma once

#include "pdl/core_types.hpp"

namespace pdl {

/// Step-scaled weights for the composite row penalty
/// tau1*||x||_1 + tau2*||x||_inf.
struct ProxParams {
  double tau1 = 0.0;
  double tau2 = 0.0;
};

/// out_j = sign(v_j) * max(|v_j| - tau, 0).
Vector soft_threshold(const Vector& v, double tau);

/// Euclidean projection onto {x : ||x||_1 <= radius}, exact via full sort and
/// threshold.
Vector project_l1_ball(const Vector& v, double radius);

/// prox of tau*||.||_inf through the Moreau identity:
/// v - tau * project_l1_ball(v / tau, 1). Identity map when tau = 0.
Vector prox_linf(const Vector& v, double tau);

/// Exact minimizer of (1/2)||x - v||^2 + tau1*||x||_1 + tau2*||x||_inf,
/// computed as prox_linf(soft_threshold(v, tau1), tau2).
Vector prox_l1_linf(const Vector& v, const ProxParams& p);

/// Elementwise clamp to [lo, hi].
Matrix project_box(const Matrix& M, double lo, double hi);
void project_box_inplace(Matrix& M, double lo, double hi);

}  // namespace pdl
