#pragma once

#include <array>
#include <span>
#include <vector>

#include "gshs/potentials.hpp"
#include "gshs/report.hpp"
#include "gshs/test_functions.hpp"

namespace gshs {

// q(r) = 1 - s(r - 1) on [1, 2] with s the quintic smoothstep; q = 1 below,
// 0 above. C^2.
double cutoff_profile(double r);
double cutoff_profile_d1(double r);
double cutoff_profile_d2(double r);

// eta_eps(v) = q(|v| eps^2): 1 on |v| <= eps^-2, 0 on |v| >= 2 eps^-2.
struct CutoffFunction {
  double eps = 1.0;
  std::size_t d = 1;
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  // |grad eta| <= C eps^2 and |Lap eta| <= C eps^4.
  double C = 0.0;

  double value(std::span<const double> v) const;
  void gradient(std::span<const double> v, std::span<double> g) const;
  void hessian_diag(std::span<const double> v, std::span<double> h) const;
  double laplacian(std::span<const double> v) const;
};

CutoffFunction build_cutoff(double eps, std::size_t d = 1);

// (x, v) -> f(x + v) eta(v) on R^{2d}.
TestFn embed(TestFn f, const CutoffFunction& eta);

struct ScalingOptions {
  double rel_tol = 1e-10;  // nested Gauss-Kronrod tolerance for d = 1 (1e-7 in d = 2)
};

struct NormPoint {
  double eps = 0.0;
  double norm_direct = 0.0;       // ||Psi_eps f||_{H_eps}, (v outer, x inner)
  double norm_convolution = 0.0;  // same via the convolution identity
  double norm_limit = 0.0;        // ||f||_{H_0}
  double alpha = 0.0;             // integral of eta^2 d mu_{Phi2^eps}
  double alpha_tail_bound = 0.0;  // mu_{Phi2^eps}(|v| > eps^-2)
  double relative_error() const { return std::abs(norm_direct - norm_limit) / norm_limit; }
  double route_gap() const { return std::abs(norm_direct - norm_convolution) / norm_direct; }
};

// Needs d <= 2, a compactly supported f, and a nonsingular Phi2.
NormPoint embedded_norm(const TestFunction& f, const PotentialSpec& phi1, const PotentialSpec& phi2,
                        double eps, const ScalingOptions& opts = {});

// Columns eps, norm_direct, norm_convolution, norm_limit, alpha_eps,
// relative_error, route_gap; checks for monotone decrease, 1% at the
// smallest eps, route agreement 1e-4, alpha within 1e-6 at the smallest eps.
ConvergenceReport norm_convergence_curve(const TestFunction& f, const PotentialSpec& phi1,
                                         const PotentialSpec& phi2, std::vector<double> eps_grid,
                                         const ScalingOptions& opts = {});

// Pointwise summands of L_eps Psi_eps f, with L_eps the eps = 1 generator of
// (Phi1, Phi2^eps):
//   T1 = f(s) Lap eta, T2 = 2 grad f(s) . grad eta, T3 = -(grad Phi1 . grad eta) f(s),
//   T4 = -(grad Phi2^eps . grad eta) f(s), T5 = Lap f(s) eta, T6 = -(grad Phi1 . grad f(s)) eta
// with s = x + v.
std::array<double, 6> generator_summands(const TestFunction& f, const PotentialSpec& phi1,
                                         const PotentialSpec& phi2_eps, const CutoffFunction& eta,
                                         std::span<const double> p);

struct SummandNorms {
  double eps = 0.0;
  std::array<double, 6> norms{};  // H_eps norms of T1..T6
  double laplacian_limit = 0.0;   // ||Lap f||_{H_0}
  double drift_limit = 0.0;       // ||grad Phi1 . grad f||_{H_0}
  // Relative norm gaps of T5, T6 to their limits.
  double term5_distance = 0.0;
  double term6_distance = 0.0;
  // ||T5 - Psi_eps(Lap f)||, ||T6 + Psi_eps(grad Phi1 . grad f)|| relative to the limit norms.
  double term5_embedding_distance = 0.0;
  double term6_embedding_distance = 0.0;
  // Worst |sum T_k - L_eps Psi_eps f| / (1 + |L_eps Psi_eps f|) over random points.
  double reconstruction_error = 0.0;
};

SummandNorms generator_summand_norms(const TestFunction& f, const PotentialSpec& phi1,
                                     const PotentialSpec& phi2, double eps,
                                     const ScalingOptions& opts = {}, std::uint64_t seed = 1);

// (Psi_eps u, Psi_eps phi)_{H_eps} and its limit (u, phi)_{H_0}.
double embedded_pairing(const TestFunction& u, const TestFunction& phi, const PotentialSpec& phi1,
                        const PotentialSpec& phi2, double eps, const ScalingOptions& opts = {});
double limit_pairing(const TestFunction& u, const TestFunction& phi, const PotentialSpec& phi1,
                     const ScalingOptions& opts = {});

// Combined report: norm columns plus term1..term4 norms and term5/term6
// distances, with the convergence checks of both.
ConvergenceReport semigroup_report(const TestFunction& f, const PotentialSpec& phi1,
                                   const PotentialSpec& phi2, std::vector<double> eps_grid,
                                   const ScalingOptions& opts = {});

}  // namespace gshs
