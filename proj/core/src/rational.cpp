#include "hobn/rational.hpp"

#include <numeric>
#include <stdexcept>

#include "hobn/error.hpp"

namespace hobn {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw internal_error("rational overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw internal_error("rational overflow");
  return r;
}

}  // namespace

rational::rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ == 0) throw internal_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::optional<rational> rational::parse(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t p1 = 0, p2 = 0;
      std::int64_t n = std::stoll(text.substr(0, slash), &p1);
      std::int64_t d = std::stoll(text.substr(slash + 1), &p2);
      if (p1 != slash || p2 != text.size() - slash - 1 || d == 0)
        return std::nullopt;
      return rational(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t p = 0;
      std::int64_t n = std::stoll(text, &p);
      if (p != text.size()) return std::nullopt;
      return rational(n, 1);
    }
    std::string integral = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (integral.empty() && frac.empty()) return std::nullopt;
    for (char c : frac)
      if (c < '0' || c > '9') return std::nullopt;
    std::int64_t whole = 0;
    if (!integral.empty() && integral != "-" && integral != "+") {
      std::size_t p = 0;
      whole = std::stoll(integral, &p);
      if (p != integral.size()) return std::nullopt;
    } else if (integral == "-" || integral == "+") {
      return std::nullopt;
    }
    if (frac.size() > 18) return std::nullopt;
    std::int64_t den = 1;
    std::int64_t num = 0;
    for (char c : frac) {
      den = checked_mul(den, 10);
      num = checked_add(checked_mul(num, 10), c - '0');
    }
    bool neg = !integral.empty() && integral[0] == '-';
    std::int64_t total =
        checked_add(checked_mul(whole < 0 ? -whole : whole, den), num);
    return rational(neg || whole < 0 ? -total : total, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

double rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

rational rational::operator+(const rational& o) const {
  return rational(
      checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
      checked_mul(den_, o.den_));
}

rational rational::operator-(const rational& o) const {
  return rational(
      checked_add(checked_mul(num_, o.den_), -checked_mul(o.num_, den_)),
      checked_mul(den_, o.den_));
}

rational rational::operator*(const rational& o) const {
  return rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
}

bool rational::operator<(const rational& o) const {
  return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
}

}  // namespace hobn
