#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kscheck {

// Thrown when a coefficient computation would overflow int64. Every value in
// the shipped pipeline has |a|,|b| <= 4, so this indicates a bug, but the
// checks are kept unconditionally.
class arithmetic_overflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// An element a + b*sqrt(2) of the ring Z[sqrt(2)]. Equality is component-wise
// (sqrt(2) is irrational), ordering and sign are decided exactly from integer
// comparisons. Immutable value semantics throughout.
struct ExactScalar {
  std::int64_t a = 0;  // rational part
  std::int64_t b = 0;  // radical part (coefficient of sqrt(2))

  constexpr ExactScalar() = default;
  constexpr ExactScalar(std::int64_t rational, std::int64_t radical) : a(rational), b(radical) {}

  static constexpr ExactScalar zero() { return {0, 0}; }
  static constexpr ExactScalar one() { return {1, 0}; }
  static constexpr ExactScalar sqrt2() { return {0, 1}; }

  bool is_zero() const { return a == 0 && b == 0; }

  // Conjugate a - b*sqrt(2) (the nontrivial ring automorphism).
  ExactScalar conjugate() const;

  // Exact sign of the real value a + b*sqrt(2): -1, 0 or +1.
  int sign() const;

  // Value as a double; exact for the small coefficients used here.
  double to_double() const;

  friend bool operator==(const ExactScalar&, const ExactScalar&) = default;
};

ExactScalar operator+(const ExactScalar& lhs, const ExactScalar& rhs);
ExactScalar operator-(const ExactScalar& lhs, const ExactScalar& rhs);
ExactScalar operator-(const ExactScalar& v);
ExactScalar operator*(const ExactScalar& lhs, const ExactScalar& rhs);

// Exact value order on the reals, not lexicographic on (a, b).
bool operator<(const ExactScalar& lhs, const ExactScalar& rhs);

ExactScalar abs(const ExactScalar& v);

// |a^2 - 2 b^2|, the Euclidean norm of Z[sqrt(2)].
std::int64_t field_norm(const ExactScalar& v);

bool divides(const ExactScalar& divisor, const ExactScalar& dividend);

// Exact quotient; throws std::domain_error if divisor is zero or does not
// divide dividend in the ring.
ExactScalar div_exact(const ExactScalar& dividend, const ExactScalar& divisor);

// Euclidean gcd in Z[sqrt(2)]; determined only up to units +-(1+sqrt2)^n.
ExactScalar gcd(ExactScalar x, ExactScalar y);

// Rendering like "1-2√2" for logs and error messages.
std::string to_string(const ExactScalar& v);

// Unnormalized homogeneous coordinates of a spatial direction.
struct ExactVector3 {
  ExactScalar x, y, z;

  bool is_zero() const { return x.is_zero() && y.is_zero() && z.is_zero(); }

  const ExactScalar& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend bool operator==(const ExactVector3&, const ExactVector3&) = default;
};

ExactVector3 operator*(const ExactScalar& k, const ExactVector3& v);
ExactVector3 operator-(const ExactVector3& v);

ExactScalar dot(const ExactVector3& u, const ExactVector3& v);
ExactVector3 cross(const ExactVector3& u, const ExactVector3& v);

std::string to_string(const ExactVector3& v);

enum class Axis { X, Y, Z };

// Image of v under the sqrt(2)-scaled 45-degree rotation about the axis.
// Scaling by sqrt(2) keeps all entries in the ring; projectively the result
// is the rotated direction. About Z: (x, y, z) -> (x - y, x + y, sqrt2 * z).
ExactVector3 rotate45(const ExactVector3& v, Axis axis);

// Canonical projective direction: antipodes (and all ring-scalar multiples)
// collapse to one representative. Canonical form is content-reduced over the
// full ring, unit-normalized, and sign-normalized so the first nonzero
// component is positive.
class Ray {
 public:
  // Throws std::domain_error on the zero vector.
  static Ray canonicalize(const ExactVector3& v);

  const ExactVector3& rep() const { return rep_; }

  // Normalized floating-point image.
  std::array<double, 3> to_unit() const;

  friend bool operator==(const Ray&, const Ray&) = default;
  friend bool operator<(const Ray& lhs, const Ray& rhs);

 private:
  explicit Ray(ExactVector3 rep) : rep_(rep) {}
  ExactVector3 rep_;
};

std::string to_string(const Ray& r);

}  // namespace kscheck
