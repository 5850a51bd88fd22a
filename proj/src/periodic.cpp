#include "pinchflow/periodic.hpp"

#include <cmath>
#include <numbers>

#include "pinchflow/errors.hpp"

namespace pinchflow::periodic {

namespace {

// f at index j + offset with the periodic jump applied.
inline double shifted(std::span<const double> f, std::ptrdiff_t j, double jump) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  std::ptrdiff_t wraps = 0;
  while (j < 0) {
    j += n;
    --wraps;
  }
  while (j >= n) {
    j -= n;
    ++wraps;
  }
  return f[static_cast<std::size_t>(j)] + static_cast<double>(wraps) * jump;
}

}  // namespace

void first_derivative(std::span<const double> f, double spacing, std::span<double> out,
                      double jump) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const double inv = 1.0 / (12.0 * spacing);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const bool interior = j >= 2 && j + 2 < n;
    const double fm2 = interior ? f[j - 2] : shifted(f, j - 2, jump);
    const double fm1 = interior ? f[j - 1] : shifted(f, j - 1, jump);
    const double fp1 = interior ? f[j + 1] : shifted(f, j + 1, jump);
    const double fp2 = interior ? f[j + 2] : shifted(f, j + 2, jump);
    out[static_cast<std::size_t>(j)] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) * inv;
  }
}

void second_derivative(std::span<const double> f, double spacing, std::span<double> out,
                       double jump) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const double inv = 1.0 / (12.0 * spacing * spacing);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const bool interior = j >= 2 && j + 2 < n;
    const double fm2 = interior ? f[j - 2] : shifted(f, j - 2, jump);
    const double fm1 = interior ? f[j - 1] : shifted(f, j - 1, jump);
    const double fp1 = interior ? f[j + 1] : shifted(f, j + 1, jump);
    const double fp2 = interior ? f[j + 2] : shifted(f, j + 2, jump);
    out[static_cast<std::size_t>(j)] =
        (-fm2 + 16.0 * fm1 - 30.0 * f[static_cast<std::size_t>(j)] + 16.0 * fp1 - fp2) * inv;
  }
}

std::vector<double> first_derivative(std::span<const double> f, double spacing, double jump) {
  std::vector<double> out(f.size());
  first_derivative(f, spacing, out, jump);
  return out;
}

std::vector<double> second_derivative(std::span<const double> f, double spacing, double jump) {
  std::vector<double> out(f.size());
  second_derivative(f, spacing, out, jump);
  return out;
}

namespace {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n);
  double denom = diag[0];
  if (denom == 0.0) throw DegeneracyError("singular tridiagonal system");
  c[0] = upper[0] / denom;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c[i - 1];
    if (denom == 0.0) throw DegeneracyError("singular tridiagonal system");
    c[i] = upper[i] / denom;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3 || lower.size() != n || upper.size() != n || rhs.size() != n)
    throw DegeneracyError("cyclic tridiagonal system needs n >= 3 and matching sizes");
  const double alpha = upper[n - 1];  // row n-1, column 0
  const double beta = lower[0];       // row 0, column n-1
  const double gamma = -diag[0];
  std::vector<double> b(diag.begin(), diag.end());
  b[0] -= gamma;
  b[n - 1] -= alpha * beta / gamma;
  std::vector<double> lo(lower.begin(), lower.end()), up(upper.begin(), upper.end());
  lo[0] = 0.0;
  up[n - 1] = 0.0;
  std::vector<double> x = solve_tridiagonal(lo, b, up, rhs);
  std::vector<double> uvec(n, 0.0);
  uvec[0] = gamma;
  uvec[n - 1] = alpha;
  const std::vector<double> z = solve_tridiagonal(lo, b, up, uvec);
  const double vx = x[0] + beta / gamma * x[n - 1];
  const double vz = z[0] + beta / gamma * z[n - 1];
  const double factor = vx / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
  return x;
}

PeriodicSpline::PeriodicSpline(std::vector<double> values, double period)
    : values_(std::move(values)), period_(period) {
  const std::size_t n = values_.size();
  if (n < 4) throw DegeneracyError("periodic spline needs at least four samples");
  spacing_ = period_ / static_cast<double>(n);
  std::vector<double> lower(n, 1.0), diag(n, 4.0), upper(n, 1.0), rhs(n);
  const double scale = 6.0 / (spacing_ * spacing_);
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = values_[(i + n - 1) % n];
    const double next = values_[(i + 1) % n];
    rhs[i] = scale * (prev - 2.0 * values_[i] + next);
  }
  moments_ = solve_cyclic_tridiagonal(lower, diag, upper, rhs);
  for (double m : moments_) {
    if (!std::isfinite(m)) throw DegeneracyError("periodic spline interpolation failed");
  }
}

std::size_t PeriodicSpline::locate(double x, double& t) const {
  double y = std::fmod(x, period_);
  if (y < 0.0) y += period_;
  const double s = y / spacing_;
  auto i = static_cast<std::size_t>(s);
  if (i >= values_.size()) i = values_.size() - 1;
  t = s - static_cast<double>(i);
  return i;
}

double PeriodicSpline::operator()(double x) const {
  double t;
  const std::size_t i = locate(x, t);
  const std::size_t j = (i + 1) % values_.size();
  const double a = 1.0 - t;
  const double h2 = spacing_ * spacing_;
  return a * values_[i] + t * values_[j] +
         ((a * a * a - a) * moments_[i] + (t * t * t - t) * moments_[j]) * h2 / 6.0;
}

double PeriodicSpline::derivative(double x) const {
  double t;
  const std::size_t i = locate(x, t);
  const std::size_t j = (i + 1) % values_.size();
  const double a = 1.0 - t;
  return (values_[j] - values_[i]) / spacing_ +
         (-(3.0 * a * a - 1.0) * moments_[i] + (3.0 * t * t - 1.0) * moments_[j]) * spacing_ / 6.0;
}

double cosine_coefficient(std::span<const double> f, int k) {
  const std::size_t n = f.size();
  const double du = 2.0 * std::numbers::pi / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += f[j] * std::cos(k * du * static_cast<double>(j));
  return sum * du / std::numbers::pi;
}

}  // namespace pinchflow::periodic
