#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hobn {

// Exact rational with int64 numerator/denominator, always normalized
// (gcd 1, denominator > 0). Big enough for probabilities written in
// source programs; arithmetic beyond that overflows loudly.
class rational {
 public:
  constexpr rational() : num_(0), den_(1) {}
  rational(std::int64_t num, std::int64_t den);

  static rational from_int(std::int64_t n) { return rational(n, 1); }

  // Accepts "3/10", "0.3", ".3", "1", "1.0". Returns nullopt on junk.
  static std::optional<rational> parse(const std::string& text);

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }

  [[nodiscard]] double to_double() const;
  [[nodiscard]] std::string to_string() const;

  rational operator+(const rational& o) const;
  rational operator-(const rational& o) const;
  rational operator*(const rational& o) const;

  bool operator==(const rational& o) const = default;
  [[nodiscard]] bool operator<(const rational& o) const;

  [[nodiscard]] bool in_unit_interval() const {
    return 0 <= num_ && num_ <= den_;
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

inline rational operator-(std::int64_t n, const rational& r) {
  return rational::from_int(n) - r;
}

}  // namespace hobn
