#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfcover {

// Arbitrary-precision signed integer. Every quantity in this library that can
// grow (matrix entries, polynomial coefficients, indices, orders) uses Int.
using Int = boost::multiprecision::cpp_int;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline int sign_of(const Int& a) { return a < 0 ? -1 : (a > 0 ? 1 : 0); }

inline Int gcd_int(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Int lcm_int(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs_int(a / gcd_int(a, b) * b);
}

// g = gcd(a,b) >= 0 with x*a + y*b = g.
struct XgcdResult {
  Int g, x, y;
};

inline XgcdResult xgcd(Int a, Int b) {
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Int q = a / b;  // truncated division is fine inside the loop
    Int r = a - q * b;
    a = b;
    b = r;
    Int x2 = x0 - q * x1;
    Int y2 = y0 - q * y1;
    x0 = x1;
    y0 = y1;
    x1 = x2;
    y1 = y2;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  return {a, x0, y0};
}

// Floor division. b must be positive; remainder lands in [0, b).
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int floor_mod(const Int& a, const Int& b) { return a - floor_div(a, b) * b; }

inline Int pow_int(Int base, std::uint64_t e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline Int binomial(const Int& n, std::uint64_t k) {
  Int r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r *= (n - Int(i));
    r /= Int(i + 1);  // exact at each step
  }
  return r;
}

namespace detail {

inline Int mod_pow(Int base, Int e, const Int& m) {
  Int r = 1;
  base = floor_mod(base, m);
  while (e > 0) {
    if ((e & 1) != 0) r = r * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return r;
}

inline bool miller_rabin(const Int& n) {
  if (n < 2) return false;
  for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  Int d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for anything a tower computation will meet.
  for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    Int x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = x * x % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline Int pollard_rho(const Int& n) {
  if (n % 2 == 0) return 2;
  for (Int c = 1;; ++c) {
    Int x = 2, y = 2, d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      d = gcd_int(abs_int(x - y), n);
    }
    if (d != n) return d;
  }
}

}  // namespace detail

// Prime factorization of |n|, n != 0, as prime -> exponent.
inline std::map<Int, int> factor_integer(Int n) {
  if (n == 0) throw std::domain_error("factor_integer: zero has no factorization");
  n = abs_int(n);
  std::map<Int, int> out;
  for (Int p : {Int(2), Int(3), Int(5)}) {
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  }
  for (Int p = 7; p * p <= n && p < 100000; p += 2) {
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  }
  // Whatever survives trial division is prime or split recursively.
  std::vector<Int> stack;
  if (n > 1) stack.push_back(n);
  while (!stack.empty()) {
    Int m = stack.back();
    stack.pop_back();
    if (m == 1) continue;
    if (detail::miller_rabin(m)) {
      ++out[m];
      continue;
    }
    Int d = detail::pollard_rho(m);
    stack.push_back(d);
    stack.push_back(m / d);
  }
  return out;
}

inline std::string to_string(const Int& v) { return v.str(); }

}  // namespace selfcover
