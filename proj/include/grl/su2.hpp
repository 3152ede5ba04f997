#pragma once

#include <array>
#include <cmath>

namespace grl {

// su(2) element as coefficients of the imaginary quaternion basis.
// Bracket [a,b] = 2 a x b.
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 bracket(const Vec3& a, const Vec3& b) { return 2.0 * cross(a, b); }

// SU(2) as a unit quaternion (w, x, y, z); inverse is the conjugate.
struct Su2 {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Su2 identity() { return {1.0, 0.0, 0.0, 0.0}; }

  Su2 conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  Vec3 vec() const { return {x, y, z}; }

  Su2 normalized() const {
    double n = std::sqrt(norm2());
    return {w / n, x / n, y / n, z / n};
  }

  friend Su2 operator*(const Su2& a, const Su2& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Su2 operator-(const Su2& a) { return {-a.w, -a.x, -a.y, -a.z}; }
};

// 4-vector inner product; w(a*b) = <conj(a), b> = <a, conj(b)>.
inline double dot4(const Su2& a, const Su2& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

// exp of a pure-imaginary quaternion: (cos|a|, sin|a| a/|a|).
inline Su2 exp_su2(const Vec3& a) {
  double t = norm(a);
  if (t < 1e-12) {
    // sin(t)/t = 1 - t^2/6 keeps the series accurate near zero
    double s = 1.0 - t * t / 6.0;
    return Su2{std::cos(t), s * a[0], s * a[1], s * a[2]};
  }
  double s = std::sin(t) / t;
  return Su2{std::cos(t), s * a[0], s * a[1], s * a[2]};
}

// log of a unit quaternion, angle in [0, pi]. Exactly antipodal elements
// (w = -1) sit on the branch cut; callers decide how to handle them.
inline Vec3 log_su2(const Su2& q) {
  double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  double t = std::atan2(vn, q.w);
  if (vn < 1e-300) return {0.0, 0.0, 0.0};
  double s = t / vn;
  return {s * q.x, s * q.y, s * q.z};
}

inline bool antipodal(const Su2& q, double tol = 1e-12) {
  double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  return q.w < 0.0 && vn < tol;
}

}  // namespace grl
