#pragma once

#include <cmath>

namespace twmg {

struct Vec3 {
  double x{0}, y{0}, z{0};

  friend Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(Vec3 a) noexcept { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }

/// Beam direction relative to the crystal normal z. theta rotates within the
/// plane containing the optical axis, beta is the out-of-plane elevation.
struct Direction {
  double theta{0};
  double beta{0};
  friend bool operator==(const Direction&, const Direction&) = default;
};

/// (sin b, cos b sin t, cos b cos t)
Vec3 unit_vector(Direction d) noexcept;
/// Inverse of unit_vector for any non-zero vector with positive z.
Direction direction_of(Vec3 v) noexcept;

/// Wavevector inside the crystal: |k| = 2 pi n / lambda.
struct WaveVector {
  Direction direction;
  double magnitude{0};   // rad/m
  double wavelength{0};  // vacuum wavelength, m
  double index{1};

  static WaveVector make(Direction d, double wavelength, double index = 1.0);

  Vec3 vector() const noexcept { return magnitude * unit_vector(direction); }
  double angular_frequency() const noexcept;
  /// Transverse (x, y) wavenumber in air for free propagation beyond the crystal.
  double vacuum_wavenumber() const noexcept;
};

/// Idler wavevector closing the triangle k3 = k_seed + k_idler as closely as
/// energy conservation allows: direction of k3 - k_seed, magnitude fixed by
/// (wavelength, index).
WaveVector phase_matched_partner(const WaveVector& pump, const WaveVector& seed,
                                 double wavelength, double index);

struct InteractionGeometry {
  WaveVector k1;  // seed
  WaveVector k2;  // generated
  WaveVector k3;  // pump
  double crystal_length{4e-3};
  double object_distance{0.6};   // object plane to imaging lens, d_O
  double focal_length{0.3};      // imaging lens, f
  double lens_to_crystal{0.2};   // d_F
  double image_distance{0.4};    // crystal to lens image plane, d = 2f - d_F
  double detector_distance{0.2}; // crystal exit to detector, s2
  double fourier_focal{0.15};    // seed-arm lens focal length
  double fourier_distance{0.15}; // crystal exit to seed-arm lens

  /// 1064/1064/532 nm collinear setup with the 2f-2f pump imaging arm, s2 on
  /// the holographic image plane and a 15 cm Fourier lens on the seed arm.
  static InteractionGeometry default_setup();

  /// Throws InvalidConfig when lengths are non-positive, d != 2f - d_F, or the
  /// three frequencies violate energy matching.
  void validate() const;
};

/// Angle psi between two beam directions, in [0, pi].
double angle_between(Direction d1, Direction d2) noexcept;

struct GeometricFactor {
  double f{1};          // (b.r)/(b.k) per unit r
  double bisector{1};   // b = cos(psi/2) = b_hat . k_hat_{1,2}
};

/// Throws DegenerateGeometry when cos^2(psi/2) < 1e-12 (counter-propagating).
GeometricFactor geometric_factor(Direction d1, Direction d2);

struct PhaseMismatch {
  Vec3 vector;               // k3 - k2 - k1
  double magnitude{0};
  double along_bisector{0};  // projection on b_hat = (k1_hat + k2_hat)/|.|
};

PhaseMismatch phase_mismatch(const InteractionGeometry& g);

struct ImageOffset {
  double x{0};
  double y{0};
};

/// Transverse position of the holographic image for a generated beam along
/// d2 after a path s2: (s2 sin b2, s2 cos b2 sin t2). Requires s2 > 0.
ImageOffset image_offset(double s2, Direction d2);

}  // namespace twmg
