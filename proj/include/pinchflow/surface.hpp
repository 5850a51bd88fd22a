#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pinchflow {

/// Curvature profile families a surface can be built from.
///
/// - constant_curvature: K = -a^2, closed-form warp sinh(a r)/a.
/// - tanh_pinch:         K(r) = -a^2 - (b^2 - a^2) tanh(c r^2).
/// - rational_pinch:     K(r) = -(a^2 + b^2 c r^2) / (1 + c r^2).
/// - tabulated:          user-supplied grid of (r, phi, phi', phi'').
enum class ProfileFamily { constant_curvature, tanh_pinch, rational_pinch, tabulated };

std::string to_string(ProfileFamily family);
ProfileFamily profile_family_from_string(const std::string& name);

struct WarpSample {
  double phi = 0.0;
  double dphi = 0.0;
  double ddphi = 0.0;
};

/// Absolute tolerances used by the post-construction invariant checks. Every
/// curvature comparison is scaled by b^2 and every psi comparison by max(1, phi'^2).
struct ProfileTolerances {
  static constexpr double curvature = 1e-8;
  static constexpr double psi = 1e-8;
  static constexpr double primitive = 1e-8;
};

/// Rotationally symmetric metric dr^2 + phi(r)^2 du^2 with pinched Gauss
/// curvature -b^2 <= K <= -a^2. Immutable after construction; copies share the
/// underlying table.
class SurfaceProfile {
 public:
  /// Closed-form model space of curvature -a^2. r_max defaults to 20/a.
  static SurfaceProfile constant_curvature(double a, std::optional<double> r_max = {},
                                           double grid_step = 1e-3);

  /// Integrates phi'' = -K(r) phi from the Taylor seed at r = grid_step with
  /// classical RK4 and tabulates phi, phi', the area primitive and psi. Every
  /// invariant is checked afterwards; failures throw ConstructionError.
  /// `constant_curvature` is accepted here too (K = -a^2, tabulated path).
  static SurfaceProfile from_curvature(ProfileFamily family, double a, double b, double c,
                                       double r_max, double grid_step);

  /// Uniform grid starting at r = 0 or r = step; phi'' is interpolated through K = -phi''/phi.
  static SurfaceProfile from_table(double a, double b, const std::vector<double>& r,
                                   const std::vector<double>& phi, const std::vector<double>& dphi,
                                   const std::vector<double>& ddphi);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double r_max() const noexcept { return r_max_; }
  double grid_step() const noexcept { return grid_step_; }
  ProfileFamily family() const noexcept { return family_; }
  bool is_closed_form() const noexcept { return table_ == nullptr; }

  /// Short identifier such as "tanh_pinch(a=1,b=2,c=1)".
  std::string id() const;

  WarpSample warp(double r) const;
  double phi(double r) const { return warp(r).phi; }
  double dphi(double r) const { return warp(r).dphi; }
  double ddphi(double r) const { return warp(r).ddphi; }

  /// Phi(r) = int_0^r phi; the area enclosed by the geodesic circle of radius r is 2 pi Phi(r).
  double area_primitive(double r) const;

  double gauss_curvature(double r) const;

  /// psi = phi'^2 - phi phi''. On tabulated curvature families this is the
  /// integrated form 1 + int_0^r K' phi^2, which avoids the cancellation of the
  /// direct formula when phi is large.
  double psi(double r) const;

  /// int_0^r K phi = 1 - phi'(r).
  double curvature_primitive(double r) const { return 1.0 - dphi(r); }

  /// Smallest r > 0 with phi(r) = value, for 0 <= value <= phi(r_max).
  double inverse_phi(double value) const;

  /// True if r lies in the annulus [grid_step, r_max] where curves may live.
  bool in_annulus(double r) const noexcept { return r >= grid_step_ && r <= r_max_; }

 private:
  struct Table;

  SurfaceProfile() = default;
  double curvature_law(double r) const;
  void check_invariants() const;

  ProfileFamily family_ = ProfileFamily::constant_curvature;
  double a_ = 1.0;
  double b_ = 1.0;
  double c_ = 0.0;
  double r_max_ = 20.0;
  double grid_step_ = 1e-3;
  std::shared_ptr<const Table> table_;
};

/// Curvature phi'/phi of the geodesic circle of radius r about the pole.
/// Throws DomainError unless 0 < r <= r_max.
double geodesic_circle_curvature(const SurfaceProfile& surface, double r);

struct DiskMeasures {
  double length = 0.0;
  double area = 0.0;
};

/// Length and area of a geodesic disk of radius rho in the plane of constant curvature -a^2.
DiskMeasures model_disk(double a, double rho);

/// Isoperimetric deficit L^2 - 4 pi A - a^2 A^2.
double isoperimetric_deficit(double length, double area, double a);

/// Inverse hyperbolic cotangent; requires |x| > 1.
double acoth(double x);

}  // namespace pinchflow
