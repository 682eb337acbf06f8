#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gshs/potentials.hpp"

namespace gshs {

// A C^2 function with exact first derivatives and Hessian diagonal.
// Functions on the phase space use the layout (x_1..x_d, v_1..v_d).
class TestFunction {
 public:
  virtual ~TestFunction() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> p) const = 0;
  virtual void gradient(std::span<const double> p, std::span<double> g) const = 0;
  virtual void hessian_diag(std::span<const double> p, std::span<double> h) const = 0;
  // Support is contained in the closed ball B(support_center, support_radius).
  virtual double support_radius() const { return kInf; }
  virtual std::vector<double> support_center() const { return std::vector<double>(dim(), 0.0); }
  // False for unbounded members (coordinate functions) and for C^k-only bumps.
  virtual bool smooth() const { return true; }
  virtual std::string describe() const = 0;
};

using TestFn = std::shared_ptr<const TestFunction>;

TestFn constant_function(std::size_t dim, double c);
// amplitude * (1 - |p - c|^2 / r^2)^4 on the ball, 0 outside (C^3).
TestFn bump(std::vector<double> center, double radius, double amplitude = 1.0);
// a . p + b
TestFn affine(std::vector<double> a, double b = 0.0);
// f_i = x_i + v_i and g_i = v_i on R^{2d}; i is 0-based.
TestFn coordinate_f(std::size_t d, std::size_t i);
TestFn coordinate_g(std::size_t d, std::size_t i);
// x_i on R^{2d}
TestFn position_coordinate(std::size_t d, std::size_t i);
// sum_k c_k p_j^k on R^dim
TestFn polynomial(std::size_t dim, std::size_t coord, std::vector<double> coeffs);
// Probabilists' Hermite polynomial He_k(p_j).
TestFn hermite(std::size_t dim, std::size_t coord, int k);
TestFn square(TestFn f);
TestFn product(TestFn f, TestFn g);
TestFn linear_combination(std::vector<double> coeffs, std::vector<TestFn> fs);
// U f(x, v) = f(x, -v)
TestFn velocity_reversed(TestFn f);
// F(x, v) = f(x) for f on R^d
TestFn lift_position(TestFn f);

// Central-difference check of gradient and Hessian diagonal at p.
// Returns the worst relative error (normalized by 1 + |analytic|).
double derivative_check(const TestFunction& f, std::span<const double> p, double h = 1e-5);

}  // namespace gshs
