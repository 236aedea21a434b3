#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ordlab {

inline constexpr double two_pi = 6.283185307179586476925286766559;

using Cplx = std::complex<double>;

/// Plane vector. All positions, displacements and wavevectors are 2D;
/// one-dimensional systems keep y = 0 throughout.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    /// z-component of the 3D cross product.
    constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateCell : public Error {
  public:
    using Error::Error;
};
class NonFiniteValue : public Error {
  public:
    using Error::Error;
};
class TooFewSamples : public Error {
  public:
    using Error::Error;
};
class DimensionBudgetExceeded : public Error {
  public:
    using Error::Error;
};
class IncommensurateWavevector : public Error {
  public:
    using Error::Error;
};
class BandLimitViolated : public Error {
  public:
    using Error::Error;
};
class NonPositiveDenominator : public Error {
  public:
    using Error::Error;
};
class DimensionMismatch : public Error {
  public:
    using Error::Error;
};
class KindMismatch : public Error {
  public:
    using Error::Error;
};
class InsufficientPoints : public Error {
  public:
    using Error::Error;
};
class NonPositiveValue : public Error {
  public:
    using Error::Error;
};
class InvalidRange : public Error {
  public:
    using Error::Error;
};
class GridMismatch : public Error {
  public:
    using Error::Error;
};
class NonHermitianKernel : public Error {
  public:
    using Error::Error;
};
class ConfigInvalid : public Error {
  public:
    using Error::Error;
};

}  // namespace ordlab
