#pragma once
#include <vector>

namespace lluv {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

// n-point Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Spherical Bessel j0(x) = sin(x)/x and its derivative, stable near 0.
double sph_j0(double x);
double sph_j0_prime(double x);

}  // namespace lluv
