#pragma once

#include <span>

#include "gshs/potentials.hpp"
#include "gshs/quadrature.hpp"
#include "gshs/test_functions.hpp"

namespace gshs {

// L^eps f = (1/eps^2)(Lap_v f - grad Phi2 . grad_v f) + (1/eps)(grad Phi2 . grad_x f - grad Phi1 . grad_v f)
// at p = (x, v). Throws domain-violation outside {Phi1 < inf} x {Phi2 < inf}.
double apply_gshs_generator(const PotentialSpec& phi1, const PotentialSpec& phi2, double eps,
                            const TestFunction& f, std::span<const double> p);

// L f = Lap f - grad Phi1 . grad f at x.
double apply_overdamped_generator(const PotentialSpec& phi1, const TestFunction& f,
                                  std::span<const double> x);

struct Decomposition {
  double s_part = 0.0;  // symmetric: Lap_v f - grad Phi2 . grad_v f
  double a_part = 0.0;  // antisymmetric: grad Phi2 . grad_x f - grad Phi1 . grad_v f
};

// eps = 1 convention; s_part + a_part reproduces apply_gshs_generator(eps = 1).
Decomposition decompose(const PotentialSpec& phi1, const PotentialSpec& phi2, const TestFunction& f,
                        std::span<const double> p);

// (1/eps^2) S f - (1/eps) A f; needs a symmetric Phi2 (precondition-violation otherwise).
double apply_adjoint_generator(const PotentialSpec& phi1, const PotentialSpec& phi2, double eps,
                               const TestFunction& f, std::span<const double> p);

// (2/eps^2)|grad_v f|^2, cross-checked against L(f^2) - 2 f L f (numeric-failure
// if they disagree beyond 1e-10 relative).
double carre_du_champ(const PotentialSpec& phi1, const PotentialSpec& phi2, const TestFunction& f,
                      std::span<const double> p, double eps = 1.0);

struct InvarianceResult {
  double residual = 0.0;      // integral of L f against the normalized measure
  double abs_integral = 0.0;  // integral of |L f|
  double relative = 0.0;      // |residual| / abs_integral
};

// Needs a compactly supported f whose support ball lies in the finite domain.
InvarianceResult invariance_residual(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                     const TestFunction& f, const QuadratureConfig& cfg = {});

InvarianceResult overdamped_invariance_residual(const PotentialSpec& phi1, const TestFunction& f,
                                                const QuadratureConfig& cfg = {});

}  // namespace gshs
