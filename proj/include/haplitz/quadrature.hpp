#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>

namespace haplitz {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Matrix-valued sampler on the unit circle, theta in [0, 2*pi).
using CircleSampler = std::function<Matrix(double)>;

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Periodic trapezoid rule with `nodes` equispaced samples:
/// (1/nodes) * sum_j f(2*pi*j/nodes).
Matrix circle_trapezoid(const CircleSampler& f, int nodes);

/// Doubles the node count (powers of two, starting at `min_nodes`) until two
/// successive values agree entrywise within `tol`. Throws QuadratureError on
/// failure to converge below `max_nodes`.
Matrix circle_trapezoid_adaptive(const CircleSampler& f, double tol,
                                 int min_nodes = 2048,
                                 int max_nodes = 1 << 21);

/// k-th Fourier coefficient of a circle sampler: integral of f(theta)
/// exp(-i k theta) d theta / (2 pi), by fixed-node trapezoid rule.
Matrix fourier_coefficient(const CircleSampler& f, int k, int nodes);

/// Adaptive version of fourier_coefficient.
Matrix fourier_coefficient_adaptive(const CircleSampler& f, int k, double tol,
                                    int min_nodes = 2048,
                                    int max_nodes = 1 << 21);

/// Poisson integral of a circle sampler at z, |z| < 1.
Matrix poisson_integral(const CircleSampler& f, Complex z, double tol,
                        int min_nodes = 2048, int max_nodes = 1 << 21);

}  // namespace haplitz
