#include "clusterml/laurent.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "clusterml/errors.hpp"

namespace clusterml {

namespace {

void check_same_nvars(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("variable count mismatch: " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// Descending monomial order, the storage order of Polynomial terms.
bool term_before(const Term& a, const Term& b) { return a.monomial > b.monomial; }

}  // namespace

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::size_t nvars) {
  if (nvars > kMaxVariables) {
    throw DimensionError("at most " + std::to_string(kMaxVariables) + " variables supported");
  }
  nvars_ = static_cast<std::uint8_t>(nvars);
}

Monomial::Monomial(std::initializer_list<unsigned> exponents)
    : Monomial(std::span<const unsigned>(exponents.begin(), exponents.size())) {}

Monomial::Monomial(std::span<const unsigned> exponents) : Monomial(exponents.size()) {
  for (std::size_t i = 0; i < exponents.size(); ++i) set(i, exponents[i]);
}

Monomial Monomial::variable(std::size_t nvars, std::size_t index, unsigned power) {
  if (index >= nvars) throw DimensionError("variable index out of range");
  Monomial m(nvars);
  m.set(index, power);
  return m;
}

void Monomial::set(std::size_t i, unsigned long long value) {
  if (value > kMaxExponent) throw DomainError("monomial exponent overflow");
  degree_ = degree_ - exps_[i] + static_cast<std::uint32_t>(value);
  exps_[i] = static_cast<std::uint16_t>(value);
}

std::vector<unsigned> Monomial::exponents() const {
  return {exps_.begin(), exps_.begin() + nvars_};
}

bool Monomial::divides(const Monomial& other) const noexcept {
  if (nvars_ != other.nvars_ || degree_ > other.degree_) return false;
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (exps_[i] > other.exps_[i]) return false;
  }
  return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
  check_same_nvars(nvars_, other.nvars_);
  Monomial out(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    out.set(i, static_cast<unsigned long long>(exps_[i]) + other.exps_[i]);
  }
  return out;
}

Monomial Monomial::operator/(const Monomial& other) const {
  check_same_nvars(nvars_, other.nvars_);
  if (!other.divides(*this)) throw DomainError("monomial does not divide");
  Monomial out(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) out.set(i, exps_[i] - other.exps_[i]);
  return out;
}

Monomial Monomial::pow(unsigned n) const {
  Monomial out(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    out.set(i, static_cast<unsigned long long>(exps_[i]) * n);
  }
  return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  check_same_nvars(a.nvars_, b.nvars_);
  Monomial out(a.nvars_);
  for (std::size_t i = 0; i < a.nvars_; ++i) out.set(i, std::min(a.exps_[i], b.exps_[i]));
  return out;
}

Monomial Monomial::lcm(const Monomial& a, const Monomial& b) {
  check_same_nvars(a.nvars_, b.nvars_);
  Monomial out(a.nvars_);
  for (std::size_t i = 0; i < a.nvars_; ++i) out.set(i, std::max(a.exps_[i], b.exps_[i]));
  return out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) noexcept {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  for (std::size_t i = 0; i < Monomial::kMaxVariables; ++i) {
    if (auto c = a.exps_[i] <=> b.exps_[i]; c != 0) return c;
  }
  return a.nvars_ <=> b.nvars_;
}

std::size_t Monomial::hash() const noexcept {
  std::size_t h = nvars_;
  for (std::size_t i = 0; i < nvars_; ++i) h = mix(h, exps_[i]);
  return h;
}

std::string Monomial::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (exps_[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += 'x';
    out += std::to_string(i + 1);
    if (exps_[i] > 1) {
      out += '^';
      out += std::to_string(exps_[i]);
    }
  }
  return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial Polynomial::constant(std::size_t nvars, const Integer& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_.push_back({Monomial(nvars), c});
  return p;
}

Polynomial Polynomial::from_monomial(const Monomial& m, const Integer& c) {
  Polynomial p(m.nvars());
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  return from_monomial(Monomial::variable(nvars, index));
}

Polynomial Polynomial::from_terms(std::size_t nvars, std::vector<Term> terms) {
  for (const auto& t : terms) check_same_nvars(nvars, t.monomial.nvars());
  if (!std::is_sorted(terms.begin(), terms.end(), term_before)) {
    std::sort(terms.begin(), terms.end(), term_before);
  }
  Polynomial p(nvars);
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
      p.terms_.back().coeff += t.coeff;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
  return p;
}

const Term& Polynomial::leading_term() const {
  if (terms_.empty()) throw DomainError("zero polynomial has no leading term");
  return terms_.front();
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Polynomial Polynomial::operator*(const Monomial& m) const {
  check_same_nvars(nvars_, m.nvars());
  Polynomial out = *this;
  for (auto& t : out.terms_) t.monomial = t.monomial * m;
  return out;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return Monomial(nvars_);
  Monomial g = terms_.front().monomial;
  for (const auto& t : terms_) {
    g = Monomial::gcd(g, t.monomial);
    if (g.is_one()) break;
  }
  return g;
}

Polynomial Polynomial::divide_by(const Monomial& m) const {
  Polynomial out = *this;
  for (auto& t : out.terms_) t.monomial = t.monomial / m;
  return out;
}

bool Polynomial::all_coefficients_positive() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coeff > 0; });
}

std::size_t Polynomial::hash() const noexcept {
  std::size_t h = mix(nvars_, terms_.size());
  for (const auto& t : terms_) {
    h = mix(h, t.monomial.hash());
    h = mix(h, boost::multiprecision::hash_value(t.coeff));
  }
  return h;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    Integer mag = t.coeff < 0 ? Integer(-t.coeff) : t.coeff;
    if (t.coeff < 0) {
      out << '-';
    } else if (!first) {
      out << '+';
    }
    first = false;
    if (t.monomial.is_one()) {
      out << mag;
    } else {
      if (mag != 1) out << mag << '*';
      out << t.monomial.to_string();
    }
  }
  return out.str();
}

namespace {

Polynomial merge(const Polynomial& a, const Polynomial& b, bool subtract) {
  check_same_nvars(a.nvars(), b.nvars());
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto ta = a.terms();
  auto tb = b.terms();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && ta[i].monomial > tb[j].monomial)) {
      out.push_back(ta[i++]);
    } else if (i == ta.size() || tb[j].monomial > ta[i].monomial) {
      out.push_back({tb[j].monomial, subtract ? Integer(-tb[j].coeff) : tb[j].coeff});
      ++j;
    } else {
      Integer c = subtract ? Integer(ta[i].coeff - tb[j].coeff) : Integer(ta[i].coeff + tb[j].coeff);
      if (c != 0) out.push_back({ta[i].monomial, std::move(c)});
      ++i;
      ++j;
    }
  }
  // Already sorted and reduced; from_terms only re-validates.
  return Polynomial::from_terms(a.nvars(), std::move(out));
}

// Heap entry for a pending product row[i] * col[j]; ordered by monomial.
struct Pending {
  Monomial monomial;
  std::size_t i;
  std::size_t j;
};

struct PendingLess {
  bool operator()(const Pending& a, const Pending& b) const { return a.monomial < b.monomial; }
};

}  // namespace

Polynomial operator+(const Polynomial& a, const Polynomial& b) { return merge(a, b, false); }

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return merge(a, b, true); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  check_same_nvars(a.nvars_, b.nvars_);
  Polynomial out(a.nvars_);
  if (a.is_zero() || b.is_zero()) return out;
  const auto& rows = a.size() <= b.size() ? a.terms_ : b.terms_;
  const auto& cols = a.size() <= b.size() ? b.terms_ : a.terms_;

  // Johnson's heap multiplication: one stream per row, each descending.
  std::priority_queue<Pending, std::vector<Pending>, PendingLess> heap;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    heap.push({rows[i].monomial * cols[0].monomial, i, 0});
  }
  out.terms_.reserve(rows.size() + cols.size());
  while (!heap.empty()) {
    const Monomial m = heap.top().monomial;
    Integer c = 0;
    while (!heap.empty() && heap.top().monomial == m) {
      const Pending top = heap.top();
      heap.pop();
      c += rows[top.i].coeff * cols[top.j].coeff;
      if (top.j + 1 < cols.size()) {
        heap.push({rows[top.i].monomial * cols[top.j + 1].monomial, top.i, top.j + 1});
      }
    }
    if (c != 0) out.terms_.push_back({m, std::move(c)});
  }
  return out;
}

std::optional<Polynomial> exact_divide(const Polynomial& a, const Polynomial& b) {
  check_same_nvars(a.nvars_, b.nvars_);
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  Polynomial q(a.nvars_);
  if (a.is_zero()) return q;

  const auto& bt = b.terms_;
  const Term& lead = bt.front();
  // Pending products q[i] * b[j] for j >= 1, each row descending in j.
  std::priority_queue<Pending, std::vector<Pending>, PendingLess> heap;
  std::size_t next = 0;
  const auto& at = a.terms_;

  while (next < at.size() || !heap.empty()) {
    Monomial m;
    if (heap.empty() || (next < at.size() && at[next].monomial > heap.top().monomial)) {
      m = at[next].monomial;
    } else {
      m = heap.top().monomial;
    }
    Integer c = 0;
    if (next < at.size() && at[next].monomial == m) c = at[next++].coeff;
    while (!heap.empty() && heap.top().monomial == m) {
      const Pending top = heap.top();
      heap.pop();
      c -= q.terms_[top.i].coeff * bt[top.j].coeff;
      if (top.j + 1 < bt.size()) {
        heap.push({q.terms_[top.i].monomial * bt[top.j + 1].monomial, top.i, top.j + 1});
      }
    }
    if (c == 0) continue;
    if (!lead.monomial.divides(m)) return std::nullopt;
    Integer rem;
    Integer quot;
    boost::multiprecision::divide_qr(c, lead.coeff, quot, rem);
    if (rem != 0) return std::nullopt;
    const Monomial qm = m / lead.monomial;
    q.terms_.push_back({qm, std::move(quot)});
    if (bt.size() > 1) heap.push({qm * bt[1].monomial, q.terms_.size() - 1, 1});
  }
  return q;
}

// ---------------------------------------------------------------------------
// LaurentValue

LaurentValue LaurentValue::normalize(Polynomial num, Monomial den) {
  if (num.is_zero()) throw DomainError("Laurent value with zero numerator");
  check_same_nvars(num.nvars(), den.nvars());
  const Monomial common = Monomial::gcd(num.monomial_content(), den);
  if (!common.is_one()) {
    num = num.divide_by(common);
    den = den / common;
  }
  return LaurentValue(std::move(num), den);
}

LaurentValue LaurentValue::variable(std::size_t nvars, std::size_t index) {
  return LaurentValue(Polynomial::variable(nvars, index), Monomial(nvars));
}

bool LaurentValue::is_reduced() const {
  return Monomial::gcd(num_.monomial_content(), den_).is_one();
}

std::size_t LaurentValue::hash() const noexcept { return num_.hash() * 31 + den_.hash(); }

std::string LaurentValue::to_string() const {
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

}  // namespace clusterml
