#include "haplitz/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace haplitz {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Matrix circle_trapezoid(const CircleSampler& f, int nodes) {
  Matrix acc = f(0.0);
  for (int j = 1; j < nodes; ++j) {
    acc += f(kTwoPi * j / nodes);
  }
  return acc / static_cast<double>(nodes);
}

Matrix circle_trapezoid_adaptive(const CircleSampler& f, double tol,
                                 int min_nodes, int max_nodes) {
  int nodes = min_nodes;
  Matrix prev = circle_trapezoid(f, nodes);
  while (nodes < max_nodes) {
    nodes *= 2;
    Matrix next = circle_trapezoid(f, nodes);
    if ((next - prev).cwiseAbs().maxCoeff() <= tol) return next;
    prev = std::move(next);
  }
  throw QuadratureError("circle quadrature did not converge at " +
                        std::to_string(max_nodes) + " nodes");
}

Matrix fourier_coefficient(const CircleSampler& f, int k, int nodes) {
  auto g = [&f, k](double theta) {
    return Matrix(f(theta) * std::exp(Complex(0.0, -k * theta)));
  };
  return circle_trapezoid(g, nodes);
}

Matrix fourier_coefficient_adaptive(const CircleSampler& f, int k, double tol,
                                    int min_nodes, int max_nodes) {
  auto g = [&f, k](double theta) {
    return Matrix(f(theta) * std::exp(Complex(0.0, -k * theta)));
  };
  return circle_trapezoid_adaptive(g, tol, min_nodes, max_nodes);
}

Matrix poisson_integral(const CircleSampler& f, Complex z, double tol,
                        int min_nodes, int max_nodes) {
  const double r2 = std::norm(z);
  auto g = [&f, z, r2](double theta) {
    const Complex w = std::exp(Complex(0.0, theta));
    const double kernel = (1.0 - r2) / std::norm(1.0 - std::conj(z) * w);
    return Matrix(f(theta) * kernel);
  };
  return circle_trapezoid_adaptive(g, tol, min_nodes, max_nodes);
}

}  // namespace haplitz
