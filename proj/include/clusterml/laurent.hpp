#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace clusterml {

using Integer = boost::multiprecision::cpp_int;

// Monomial x1^e1 ... xr^er with non-negative exponents.
//
// Ordering is graded lexicographic with x1 > x2 > ... > xr: total degree
// first, then the first differing exponent. Every polynomial stores its terms
// in descending order under this comparison.
class Monomial {
 public:
  static constexpr std::size_t kMaxVariables = 8;
  static constexpr unsigned kMaxExponent = 0xffff;

  Monomial() = default;
  explicit Monomial(std::size_t nvars);
  Monomial(std::initializer_list<unsigned> exponents);
  explicit Monomial(std::span<const unsigned> exponents);

  static Monomial variable(std::size_t nvars, std::size_t index, unsigned power = 1);

  std::size_t nvars() const noexcept { return nvars_; }
  unsigned operator[](std::size_t i) const noexcept { return exps_[i]; }
  unsigned degree() const noexcept { return degree_; }
  bool is_one() const noexcept { return degree_ == 0; }
  std::vector<unsigned> exponents() const;

  // True when this monomial divides `other`.
  bool divides(const Monomial& other) const noexcept;

  Monomial operator*(const Monomial& other) const;
  // Exact quotient; throws DomainError when `other` does not divide *this.
  Monomial operator/(const Monomial& other) const;
  Monomial pow(unsigned n) const;

  static Monomial gcd(const Monomial& a, const Monomial& b);
  static Monomial lcm(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) noexcept;

  std::size_t hash() const noexcept;
  // "x1*x3^2", or "1" for the unit monomial.
  std::string to_string() const;

 private:
  void set(std::size_t i, unsigned long long value);

  std::array<std::uint16_t, kMaxVariables> exps_{};
  std::uint32_t degree_ = 0;
  std::uint8_t nvars_ = 0;
};

struct Term {
  Monomial monomial;
  Integer coeff;

  friend bool operator==(const Term&, const Term&) = default;
};

// Sparse multivariate polynomial with unbounded integer coefficients.
// Terms are kept sorted by descending monomial and no coefficient is zero.
class Polynomial {
 public:
  explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Integer& c);
  static Polynomial from_monomial(const Monomial& m, const Integer& c = 1);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  // Accepts terms in any order; merges duplicates and drops zeros.
  static Polynomial from_terms(std::size_t nvars, std::vector<Term> terms);

  std::size_t nvars() const noexcept { return nvars_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::span<const Term> terms() const noexcept { return terms_; }
  const Term& leading_term() const;

  Polynomial operator-() const;
  Polynomial operator*(const Monomial& m) const;
  Polynomial pow(unsigned n) const;

  // Greatest monomial dividing every term (unit monomial for zero).
  Monomial monomial_content() const;
  // Exact division by a monomial that divides every term.
  Polynomial divide_by(const Monomial& m) const;

  bool all_coefficients_positive() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::size_t hash() const noexcept;
  // Descending graded-lex terms joined by '+'/'-', e.g. "x1*x3^2+x2+1".
  std::string to_string() const;

 private:
  friend Polynomial operator+(const Polynomial&, const Polynomial&);
  friend Polynomial operator-(const Polynomial&, const Polynomial&);
  friend Polynomial operator*(const Polynomial&, const Polynomial&);
  friend std::optional<Polynomial> exact_divide(const Polynomial&, const Polynomial&);

  std::size_t nvars_;
  std::vector<Term> terms_;
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);

// Quotient q with q*b == a, or nullopt when the division leaves a remainder.
// Uses leading-term elimination under the graded-lex order with a heap of
// pending products, so the cost is roughly |q|*|b|*log|q|.
std::optional<Polynomial> exact_divide(const Polynomial& a, const Polynomial& b);

// A cluster variable: numerator polynomial over a denominator monomial, kept
// in reduced form (no variable divides both).
class LaurentValue {
 public:
  LaurentValue() = default;

  // Cancels the common monomial factor of `num` and `den`.
  static LaurentValue normalize(Polynomial num, Monomial den);
  // The initial variable x_{index+1} of an algebra with `nvars` variables.
  static LaurentValue variable(std::size_t nvars, std::size_t index);

  const Polynomial& numerator() const noexcept { return num_; }
  const Monomial& denominator() const noexcept { return den_; }
  std::size_t nvars() const noexcept { return num_.nvars(); }

  bool is_reduced() const;

  friend bool operator==(const LaurentValue&, const LaurentValue&) = default;

  std::size_t hash() const noexcept;
  // "(x1*x3^2+x1*x3+x2*x4+x3+1)/(x2*x3*x4)"; the denominator prints as "1"
  // when trivial.
  std::string to_string() const;

 private:
  LaurentValue(Polynomial num, Monomial den) : num_(std::move(num)), den_(den) {}

  Polynomial num_;
  Monomial den_;
};

}  // namespace clusterml
