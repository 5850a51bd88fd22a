#pragma once

#include <span>
#include <vector>

namespace pinchflow::periodic {

// Fourth-order centred stencils on a uniform periodic grid. `jump` is the
// increment of the sampled function over one period (f_{j+N} = f_j + jump);
// it lets unwrapped angles be differentiated without reducing them.

void first_derivative(std::span<const double> f, double spacing, std::span<double> out,
                      double jump = 0.0);
void second_derivative(std::span<const double> f, double spacing, std::span<double> out,
                       double jump = 0.0);

std::vector<double> first_derivative(std::span<const double> f, double spacing, double jump = 0.0);
std::vector<double> second_derivative(std::span<const double> f, double spacing,
                                      double jump = 0.0);

/// Solves the periodic tridiagonal system
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]   (indices mod n)
/// via Thomas elimination plus a Sherman-Morrison correction for the corners.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs);

/// Interpolating cubic spline through equally spaced samples of a periodic
/// function on [0, period).
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> values, double period);

  double operator()(double x) const;
  double derivative(double x) const;

  std::size_t size() const noexcept { return values_.size(); }
  double period() const noexcept { return period_; }

 private:
  std::size_t locate(double x, double& t) const;

  std::vector<double> values_;
  std::vector<double> moments_;  // second derivatives at the nodes
  double period_;
  double spacing_;
};

/// Trigonometric coefficient (1/pi) * sum f_j cos(k u_j) du on the uniform grid u_j = 2 pi j / N.
double cosine_coefficient(std::span<const double> f, int k);

}  // namespace pinchflow::periodic
