#include "gshs/generator.hpp"

#include <array>
#include <cmath>

#include "gshs/error.hpp"
#include "gshs/measures.hpp"

namespace gshs {

namespace {

constexpr std::size_t kMaxState = 2 * kMaxDim;

struct Derivs {
  double value = 0.0;
  std::array<double, kMaxState> g{};
  std::array<double, kMaxState> h{};
};

Derivs derivs(const TestFunction& f, std::span<const double> p) {
  Derivs d;
  const std::size_t n = f.dim();
  d.value = f.value(p);
  f.gradient(p, std::span<double>(d.g.data(), n));
  f.hessian_diag(p, std::span<double>(d.h.data(), n));
  return d;
}

void check_phase_point(const PotentialSpec& phi1, const PotentialSpec& phi2, const TestFunction& f,
                       std::span<const double> p) {
  const std::size_t d = phi1.dim();
  require(phi2.dim() == d && f.dim() == 2 * d && p.size() == 2 * d, ErrorKind::DimensionMismatch,
          "phase-space point, potentials and test function must agree on d");
  require(phi1.finite_domain(p.subspan(0, d)) && phi2.finite_domain(p.subspan(d, d)),
          ErrorKind::DomainViolation, "generator evaluated outside the finite domain");
}

// S and A parts from the derivatives of a function at p.
Decomposition parts(const PotentialSpec& phi1, const PotentialSpec& phi2, std::span<const double> p,
                    const double* g, const double* h) {
  const std::size_t d = phi1.dim();
  std::array<double, kMaxDim> g1{}, g2{};
  phi1.grad_at(p.subspan(0, d), std::span<double>(g1.data(), d));
  phi2.grad_at(p.subspan(d, d), std::span<double>(g2.data(), d));
  double lap_v = 0.0, drift_v = 0.0, transport = 0.0, force = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lap_v += h[d + i];
    drift_v += g2[i] * g[d + i];
    transport += g2[i] * g[i];
    force += g1[i] * g[d + i];
  }
  return {lap_v - drift_v, transport - force};
}

// s/eps^2 + sign * a/eps with the two velocity-gradient couplings paired per
// coordinate, so that transport and drift cancel before meeting lap_v.
double combine(const PotentialSpec& phi1, const PotentialSpec& phi2, std::span<const double> p,
               const double* g, const double* h, double eps, double sign) {
  const std::size_t d = phi1.dim();
  std::array<double, kMaxDim> g1{}, g2{};
  phi1.grad_at(p.subspan(0, d), std::span<double>(g1.data(), d));
  phi2.grad_at(p.subspan(d, d), std::span<double>(g2.data(), d));
  const double e2 = eps * eps;
  double lap_v = 0.0, coupled = 0.0, force = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lap_v += h[d + i];
    coupled += g2[i] * (sign * g[i] / eps - g[d + i] / e2);
    force += g1[i] * g[d + i];
  }
  return lap_v / e2 + (coupled - sign * force / eps);
}

}  // namespace

double apply_gshs_generator(const PotentialSpec& phi1, const PotentialSpec& phi2, double eps,
                            const TestFunction& f, std::span<const double> p) {
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  check_phase_point(phi1, phi2, f, p);
  Derivs dv = derivs(f, p);
  return combine(phi1, phi2, p, dv.g.data(), dv.h.data(), eps, 1.0);
}

double apply_overdamped_generator(const PotentialSpec& phi1, const TestFunction& f,
                                  std::span<const double> x) {
  const std::size_t d = phi1.dim();
  require(f.dim() == d && x.size() == d, ErrorKind::DimensionMismatch,
          "overdamped generator: dimensions disagree");
  require(phi1.finite_domain(x), ErrorKind::DomainViolation,
          "overdamped generator evaluated outside the finite domain");
  Derivs dv = derivs(f, x);
  std::array<double, kMaxDim> g1{};
  phi1.grad_at(x, std::span<double>(g1.data(), d));
  double lap = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lap += dv.h[i];
    drift += g1[i] * dv.g[i];
  }
  return lap - drift;
}

Decomposition decompose(const PotentialSpec& phi1, const PotentialSpec& phi2, const TestFunction& f,
                        std::span<const double> p) {
  check_phase_point(phi1, phi2, f, p);
  Derivs dv = derivs(f, p);
  return parts(phi1, phi2, p, dv.g.data(), dv.h.data());
}

double apply_adjoint_generator(const PotentialSpec& phi1, const PotentialSpec& phi2, double eps,
                               const TestFunction& f, std::span<const double> p) {
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  require(phi2.symmetric(), ErrorKind::PreconditionViolation,
          "adjoint via velocity reversal needs a symmetric velocity potential");
  check_phase_point(phi1, phi2, f, p);
  Derivs dv = derivs(f, p);
  return combine(phi1, phi2, p, dv.g.data(), dv.h.data(), eps, -1.0);
}

double carre_du_champ(const PotentialSpec& phi1, const PotentialSpec& phi2, const TestFunction& f,
                      std::span<const double> p, double eps) {
  require(eps > 0, ErrorKind::InvalidParameter, "eps must be positive");
  check_phase_point(phi1, phi2, f, p);
  const std::size_t d = phi1.dim();
  Derivs dv = derivs(f, p);
  double gv2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) gv2 += dv.g[d + i] * dv.g[d + i];
  const double gamma = 2.0 * gv2 / (eps * eps);

  // Derivatives of f^2: 2 f grad f and 2 |d_i f|^2 + 2 f d_ii f.
  std::array<double, kMaxState> g2{}, h2{};
  for (std::size_t i = 0; i < 2 * d; ++i) {
    g2[i] = 2.0 * dv.value * dv.g[i];
    h2[i] = 2.0 * dv.g[i] * dv.g[i] + 2.0 * dv.value * dv.h[i];
  }
  Decomposition sq = parts(phi1, phi2, p, g2.data(), h2.data());
  Decomposition lin = parts(phi1, phi2, p, dv.g.data(), dv.h.data());
  double l_sq = sq.s_part / (eps * eps) + sq.a_part / eps;
  double l_f = lin.s_part / (eps * eps) + lin.a_part / eps;
  double check = l_sq - 2.0 * dv.value * l_f;
  double scale = 1.0 + std::abs(l_sq) + std::abs(2.0 * dv.value * l_f);
  if (std::abs(check - gamma) > 1e-10 * scale)
    fail(ErrorKind::NumericFailure, "carre du champ identity L(f^2) - 2fLf = 2|grad_v f|^2 failed");
  return gamma;
}

namespace {

void require_support(const PotentialSpec& phi, const TestFunction& f, std::size_t offset) {
  double r = f.support_radius();
  require(std::isfinite(r), ErrorKind::PreconditionViolation,
          "invariance residual needs a compactly supported test function");
  if (!phi.singular()) return;
  auto c = f.support_center();
  const std::size_t d = phi.dim();
  std::span<const double> cx(c.data() + offset, d);
  require(phi.finite_domain(cx) && phi.distance_to_singularity(cx) > r,
          ErrorKind::PreconditionViolation,
          "test function support reaches the singular set of " + phi.name());
}

// |L f| has kinks along the zero set of L f; it only scales the residual, so
// a loose tolerance suffices there.
GibbsMeasure loose(const GibbsMeasure& mu) {
  QuadratureConfig c = mu.quadrature_config();
  c.rel_tol = std::max(c.rel_tol, 1e-6);
  return mu.has_velocity() && mu.has_position() ? GibbsMeasure::joint(mu.phi1(), mu.phi2(), c)
                                                : GibbsMeasure::position(mu.phi1(), c);
}

InvarianceResult finish(double residual, double abs_int) {
  InvarianceResult r;
  r.residual = residual;
  r.abs_integral = abs_int;
  r.relative = abs_int > 0 ? std::abs(residual) / abs_int : 0.0;
  return r;
}

}  // namespace

InvarianceResult invariance_residual(const PotentialSpec& phi1, const PotentialSpec& phi2,
                                     const TestFunction& f, const QuadratureConfig& cfg) {
  require(f.dim() == 2 * phi1.dim(), ErrorKind::DimensionMismatch, "test function dimension");
  require_support(phi1, f, 0);
  require_support(phi2, f, phi1.dim());
  auto mu = GibbsMeasure::joint(phi1, phi2, cfg);
  auto c = f.support_center();
  double r = f.support_radius();
  double res = integrate_on_ball(
      mu, [&](std::span<const double> p) { return apply_gshs_generator(phi1, phi2, 1.0, f, p); }, c, r);
  double abs_int = integrate_on_ball(
      loose(mu), [&](std::span<const double> p) { return std::abs(apply_gshs_generator(phi1, phi2, 1.0, f, p)); },
      c, r);
  return finish(res, abs_int);
}

InvarianceResult overdamped_invariance_residual(const PotentialSpec& phi1, const TestFunction& f,
                                                const QuadratureConfig& cfg) {
  require(f.dim() == phi1.dim(), ErrorKind::DimensionMismatch, "test function dimension");
  require_support(phi1, f, 0);
  auto mu = GibbsMeasure::position(phi1, cfg);
  auto c = f.support_center();
  double r = f.support_radius();
  double res = integrate_on_ball(
      mu, [&](std::span<const double> x) { return apply_overdamped_generator(phi1, f, x); }, c, r);
  double abs_int = integrate_on_ball(
      loose(mu), [&](std::span<const double> x) { return std::abs(apply_overdamped_generator(phi1, f, x)); }, c,
      r);
  return finish(res, abs_int);
}

}  // namespace gshs
