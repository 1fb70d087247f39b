#include "kscheck/exact.hpp"

#include <cmath>
#include <cstdlib>

namespace kscheck {

namespace {

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw arithmetic_overflow("int64 overflow in add");
  return r;
}

std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_sub_overflow(x, y, &r)) throw arithmetic_overflow("int64 overflow in sub");
  return r;
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw arithmetic_overflow("int64 overflow in mul");
  return r;
}

// Nearest integer to num/den with exact integer arithmetic, den != 0.
std::int64_t round_nearest(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t q = num / den;
  std::int64_t r = num % den;
  if (r < 0) {
    q -= 1;
    r += den;
  }
  // round half up
  if (2 * r >= den) q += 1;
  return q;
}

}  // namespace

ExactScalar ExactScalar::conjugate() const { return {a, checked_sub(0, b)}; }

int ExactScalar::sign() const {
  if (a == 0 && b == 0) return 0;
  if (a >= 0 && b >= 0) return 1;
  if (a <= 0 && b <= 0) return -1;
  // Mixed signs: a + b*sqrt2 > 0 iff a^2 > 2 b^2 when a > 0 > b,
  // and iff 2 b^2 > a^2 when b > 0 > a.
  std::int64_t a2 = checked_mul(a, a);
  std::int64_t b2 = checked_mul(2, checked_mul(b, b));
  if (a > 0) return a2 > b2 ? 1 : (a2 < b2 ? -1 : 0);
  return b2 > a2 ? 1 : (b2 < a2 ? -1 : 0);
}

double ExactScalar::to_double() const {
  return static_cast<double>(a) + static_cast<double>(b) * std::sqrt(2.0);
}

ExactScalar operator+(const ExactScalar& lhs, const ExactScalar& rhs) {
  return {checked_add(lhs.a, rhs.a), checked_add(lhs.b, rhs.b)};
}

ExactScalar operator-(const ExactScalar& lhs, const ExactScalar& rhs) {
  return {checked_sub(lhs.a, rhs.a), checked_sub(lhs.b, rhs.b)};
}

ExactScalar operator-(const ExactScalar& v) { return {checked_sub(0, v.a), checked_sub(0, v.b)}; }

ExactScalar operator*(const ExactScalar& lhs, const ExactScalar& rhs) {
  // (a1 + b1 s)(a2 + b2 s) = a1 a2 + 2 b1 b2 + (a1 b2 + b1 a2) s, s = sqrt2
  std::int64_t a = checked_add(checked_mul(lhs.a, rhs.a), checked_mul(2, checked_mul(lhs.b, rhs.b)));
  std::int64_t b = checked_add(checked_mul(lhs.a, rhs.b), checked_mul(lhs.b, rhs.a));
  return {a, b};
}

bool operator<(const ExactScalar& lhs, const ExactScalar& rhs) { return (lhs - rhs).sign() < 0; }

ExactScalar abs(const ExactScalar& v) { return v.sign() < 0 ? -v : v; }

std::int64_t field_norm(const ExactScalar& v) {
  std::int64_t n = checked_sub(checked_mul(v.a, v.a), checked_mul(2, checked_mul(v.b, v.b)));
  return n < 0 ? -n : n;
}

bool divides(const ExactScalar& divisor, const ExactScalar& dividend) {
  if (divisor.is_zero()) return dividend.is_zero();
  ExactScalar num = dividend * divisor.conjugate();
  std::int64_t den = checked_sub(checked_mul(divisor.a, divisor.a),
                                 checked_mul(2, checked_mul(divisor.b, divisor.b)));
  return num.a % den == 0 && num.b % den == 0;
}

ExactScalar div_exact(const ExactScalar& dividend, const ExactScalar& divisor) {
  if (divisor.is_zero()) throw std::domain_error("division by zero in Z[sqrt2]");
  ExactScalar num = dividend * divisor.conjugate();
  std::int64_t den = checked_sub(checked_mul(divisor.a, divisor.a),
                                 checked_mul(2, checked_mul(divisor.b, divisor.b)));
  if (num.a % den != 0 || num.b % den != 0)
    throw std::domain_error(to_string(divisor) + " does not divide " + to_string(dividend));
  return {num.a / den, num.b / den};
}

ExactScalar gcd(ExactScalar x, ExactScalar y) {
  // Nearest-quotient Euclidean algorithm; |N(remainder)| <= (3/4)|N(y)|.
  while (!y.is_zero()) {
    ExactScalar num = x * y.conjugate();
    std::int64_t den = checked_sub(checked_mul(y.a, y.a), checked_mul(2, checked_mul(y.b, y.b)));
    ExactScalar q{round_nearest(num.a, den), round_nearest(num.b, den)};
    ExactScalar r = x - q * y;
    x = y;
    y = r;
  }
  return x;
}

std::string to_string(const ExactScalar& v) {
  if (v.b == 0) return std::to_string(v.a);
  std::string s;
  if (v.a != 0) s += std::to_string(v.a);
  if (v.b > 0 && v.a != 0) s += "+";
  if (v.b == -1)
    s += "-";
  else if (v.b != 1)
    s += std::to_string(v.b);
  s += "√2";
  return s;
}

ExactVector3 operator*(const ExactScalar& k, const ExactVector3& v) {
  return {k * v.x, k * v.y, k * v.z};
}

ExactVector3 operator-(const ExactVector3& v) { return {-v.x, -v.y, -v.z}; }

ExactScalar dot(const ExactVector3& u, const ExactVector3& v) {
  return u.x * v.x + u.y * v.y + u.z * v.z;
}

ExactVector3 cross(const ExactVector3& u, const ExactVector3& v) {
  return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}

std::string to_string(const ExactVector3& v) {
  return "(" + to_string(v.x) + ", " + to_string(v.y) + ", " + to_string(v.z) + ")";
}

ExactVector3 rotate45(const ExactVector3& v, Axis axis) {
  const ExactScalar s = ExactScalar::sqrt2();
  switch (axis) {
    case Axis::X:
      return {s * v.x, v.y - v.z, v.y + v.z};
    case Axis::Y:
      return {v.x + v.z, s * v.y, v.z - v.x};
    case Axis::Z:
      return {v.x - v.y, v.x + v.y, s * v.z};
  }
  throw std::logic_error("bad axis");
}

namespace {

// Sum of a^2 + 2 b^2 over components: (|v|^2 + |conj v|^2) / 2 as reals.
// Strictly convex under multiplication by powers of the unit 1 + sqrt2, so it
// has a unique (up to one tie) minimum over the associate class.
std::int64_t vector_height(const ExactVector3& v) {
  std::int64_t h = 0;
  for (int i = 0; i < 3; ++i) {
    const ExactScalar& c = v[i];
    h = checked_add(h, checked_add(checked_mul(c.a, c.a), checked_mul(2, checked_mul(c.b, c.b))));
  }
  return h;
}

ExactVector3 scale_components(const ExactVector3& v, const ExactScalar& k) { return k * v; }

}  // namespace

Ray Ray::canonicalize(const ExactVector3& v) {
  if (v.is_zero()) throw std::domain_error("cannot canonicalize the zero vector");

  // Content reduction: divide by the ring gcd of the components.
  ExactScalar content = ExactScalar::zero();
  for (int i = 0; i < 3; ++i)
    if (!v[i].is_zero()) content = content.is_zero() ? v[i] : gcd(content, v[i]);
  ExactVector3 r{div_exact(v.x, content), div_exact(v.y, content), div_exact(v.z, content)};

  // The gcd is determined only up to units +-(1+sqrt2)^n; pick the associate
  // with minimal height, preferring the lower exponent on a tie.
  const ExactScalar unit{1, 1};          // 1 + sqrt2
  const ExactScalar unit_inv{-1, 1};     // (1+sqrt2)^-1 = -1 + sqrt2
  std::int64_t h = vector_height(r);
  for (;;) {
    ExactVector3 down = scale_components(r, unit_inv);
    std::int64_t hd = vector_height(down);
    if (hd <= h) {
      r = down;
      h = hd;
      continue;
    }
    break;
  }
  for (;;) {
    ExactVector3 up = scale_components(r, unit);
    std::int64_t hu = vector_height(up);
    if (hu < h) {
      r = up;
      h = hu;
      continue;
    }
    break;
  }

  // Sign normalization: first nonzero component positive.
  for (int i = 0; i < 3; ++i) {
    int s = r[i].sign();
    if (s < 0) r = -r;
    if (s != 0) break;
  }
  return Ray(r);
}

std::array<double, 3> Ray::to_unit() const {
  std::array<double, 3> u{rep_.x.to_double(), rep_.y.to_double(), rep_.z.to_double()};
  double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  return {u[0] / n, u[1] / n, u[2] / n};
}

bool operator<(const Ray& lhs, const Ray& rhs) {
  for (int i = 0; i < 3; ++i) {
    int s = (lhs.rep()[i] - rhs.rep()[i]).sign();
    if (s != 0) return s < 0;
  }
  return false;
}

std::string to_string(const Ray& r) { return to_string(r.rep()); }

}  // namespace kscheck
