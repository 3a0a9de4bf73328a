#pragma once

#include <array>
#include <optional>
#include <utility>
#include <variant>

#include "clk/random.hpp"
#include "clk/vec3.hpp"

namespace clk::wall {

// Accommodation coefficients of the Cercignani-Lampis kernel:
// r_perp for normal kinetic energy, r_par for tangential momentum.
// Admissible range 0 < r_perp <= 1, 0 < r_par < 2.
class AccommodationPair {
public:
  AccommodationPair(double r_perp, double r_par);

  double r_perp() const { return r_perp_; }
  double r_par() const { return r_par_; }
  // r_par (2 - r_par): tangential variance factor, in (0, 1].
  double tangential_factor() const { return r_par_ * (2.0 - r_par_); }
  double r_max() const;
  double r_min() const;

private:
  double r_perp_;
  double r_par_;
};

// Boundary point data: wall temperature and the local frame {t1, t2, n},
// with n the outward unit normal and t1 x t2 = n.
struct WallPatch {
  double temperature = 1.0;
  Vec3 normal{0.0, 0.0, 1.0};
  Vec3 tangent1{1.0, 0.0, 0.0};
  Vec3 tangent2{0.0, 1.0, 0.0};

  // Builds the orthonormal completion of `normal` (re-normalised; must be
  // unit length to 1e-9).
  static WallPatch make(double temperature, const Vec3& normal);
};

// Normal/tangential split of a velocity at a wall: v = v_par[0] t1 +
// v_par[1] t2 + v_perp n.
struct HalfSpaceVelocity {
  double v_perp = 0.0;
  std::array<double, 2> v_par{0.0, 0.0};
};

HalfSpaceVelocity decompose(const Vec3& v, const WallPatch& wall);
Vec3 compose(const HalfSpaceVelocity& h, const WallPatch& wall);

struct ClModel {
  AccommodationPair r;
};
struct Diffuse {};
struct Specular {};
struct BounceBack {};
struct Maxwell {
  double c = 0.5;  // diffuse fraction in [0, 1]
};

using BoundaryModel = std::variant<ClModel, Diffuse, Specular, BounceBack, Maxwell>;

Maxwell make_maxwell(double c);

// (r_perp, r_par) at which the C-L kernel reduces to the given model, when
// such a value exists (diffuse (1,1), specular (0,0), bounce-back (0,2)).
std::optional<std::pair<double, double>> equivalent_accommodation(const BoundaryModel& model);

// C-L scattering kernel R(u -> v) for an incident velocity u (n.u > 0) and a
// re-emitted velocity v (n.v < 0). Magnitudes |u_perp|, |v_perp| enter the
// exponent and I0.
double cl_density(const Vec3& u, const Vec3& v, const WallPatch& wall, const AccommodationPair& r);

// Diffuse kernel 2/(pi (2T)^2) e^{-|v|^2/(2T)} |n.v|.
double diffuse_density(const Vec3& v, const WallPatch& wall);

// Exact draw from R(u -> .): tangential Gaussian about (1 - r_par) u_par with
// variance T r_par (2 - r_par); normal speed Rice(sqrt(1 - r_perp)|u_perp|,
// T r_perp). Works for the closed limits r_perp = 0, r_par in {0, 2} as well
// (the variances vanish and the draw is deterministic).
Vec3 cl_sample(const Vec3& u, const WallPatch& wall, const AccommodationPair& r, RandomStream& rng);

// Unvalidated variant of cl_sample for limit coefficients.
Vec3 cl_sample_raw(const Vec3& u, const WallPatch& wall, double r_perp, double r_par,
                   RandomStream& rng);

// Maxwell kernel c * diffuse + (1 - c) * delta(u - mirror(v)); the delta part
// is reported as an explicit atom rather than a numeric spike.
struct MaxwellKernelValue {
  double continuous = 0.0;  // absolutely continuous part at v
  double atom_weight = 0.0;  // mass of the specular atom
  Vec3 atom_at{};           // location of the atom (mirror image of u)
};

MaxwellKernelValue maxwell_density(const Vec3& u, const Vec3& v, const WallPatch& wall, double c);

struct MaxwellDraw {
  Vec3 v{};
  bool specular = false;
};
MaxwellDraw maxwell_sample(const Vec3& u, const WallPatch& wall, double c, RandomStream& rng);

// Re-emitted velocity for any boundary model. Pre: n.u > 0.
Vec3 scatter(const BoundaryModel& model, const Vec3& u, const WallPatch& wall, RandomStream& rng);

// Image of a wall-flux-normalised Maxwellian at temperature T0 under the
// kernel: Gaussian tangential part with temperature
// T0 (1 - r_par)^2 + T_w r_par (2 - r_par) and normal part with temperature
// T0 (1 - r_perp) + T_w r_perp.
struct PushforwardMaxwellian {
  double t_tangential = 1.0;
  double t_normal = 1.0;

  // mu_{x,r}(v); depends on v only through |v_perp| and |v_par|.
  double density(const Vec3& v, const WallPatch& wall) const;
  // int_{n.v>0} mu (n.v) dv by tensor Gauss-Legendre quadrature.
  double flux_integral(int panels = 8) const;
};

PushforwardMaxwellian cl_pushforward_maxwellian(const WallPatch& wall, const AccommodationPair& r,
                                                double t0);

// 1/(2 pi T^2) e^{-|v|^2/(2T)}: Maxwellian normalised to unit wall flux.
double flux_maxwellian(const Vec3& v, double temperature);

// (1/|n.v|) int_{n.u>0} R(u -> v) mu0(u) (n.u) du by 3-D quadrature, for
// comparison with PushforwardMaxwellian::density.
double pushforward_by_quadrature(const Vec3& v, const WallPatch& wall, const AccommodationPair& r,
                                 double t0, int panels = 8);

// int_{n.v<0} R(u -> v) dv by 3-D composite Gauss-Legendre quadrature over a
// box covering +-12 standard deviations of each factor of the kernel.
double verify_normalization(const Vec3& u, const WallPatch& wall, const AccommodationPair& r,
                            int panels = 4);

}  // namespace clk::wall
