#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rankscope/common.hh"

namespace rankscope {

/* arithmetic tables for F_q, q = p^d <= 9.  elements are codes
   0..q-1; a code is the base-p digit string of the coefficient
   vector in the power basis, so 0 and 1 are the field's 0 and 1. */
struct FieldTable {
  int q = 0, p = 0, deg = 0;
  std::array<std::array<uint8_t, 9>, 9> add{}, mul{};
  std::array<std::array<uint8_t, 9>, 9> sub{};
  std::array<uint8_t, 9> neg{}, inv{};
  std::array<int, 9> trace{};     /* absolute trace, as an element of F_p */
  std::array<cplx, 9> psi{};      /* x -> exp(2*pi*i*trace(x)/p) */
  uint8_t primitive = 0;          /* least generator of the unit group */
  std::array<int, 9> dlog{};      /* dlog[primitive^k] = k; dlog[0] = -1 */
  std::array<uint8_t, 9> unit{};  /* unit[k] = primitive^k, k < q-1 */

  uint8_t pow(uint8_t a, uint64_t e) const;
  bool is_prime_field() const { return deg == 1; }

  /* cached per q; throws UnsupportedField outside {2,3,4,5,7,8,9}. */
  static const FieldTable& get(int q);
};

struct PolyFq;

/* dense matrix over F_q with explicit shape.  row-major entries. */
struct MatFq {
  const FieldTable* F = nullptr;
  int rows = 0, cols = 0;
  std::vector<uint8_t> a;

  MatFq() = default;
  MatFq(const FieldTable& f, int r, int c)
      : F(&f), rows(r), cols(c), a((size_t)r * c, 0) {}

  uint8_t& at(int i, int j) { return a[(size_t)i * cols + j]; }
  uint8_t at(int i, int j) const { return a[(size_t)i * cols + j]; }

  static MatFq identity(const FieldTable& f, int n);
  static MatFq zero(const FieldTable& f, int r, int c) { return MatFq(f, r, c); }

  MatFq operator*(const MatFq& o) const;
  MatFq operator+(const MatFq& o) const;
  MatFq operator-(const MatFq& o) const;
  bool operator==(const MatFq& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }

  MatFq transpose() const;
  MatFq pow(uint64_t e) const;

  int rank() const;
  int kernel_dim() const;
  uint8_t det() const;
  std::optional<MatFq> inverse() const;
  uint8_t trace_entry() const;

  /* reduced row echelon form; returns rank. */
  int rref();

  PolyFq char_poly() const;

  /* row-major base-q code; total number of digits is rows*cols. */
  uint64_t code() const;
  static MatFq from_code(const FieldTable& f, int r, int c, uint64_t code);
};

/* polynomial over F_q, coefficient i on x^i.  kept normalized
   (no trailing zeros); the zero polynomial has empty storage. */
struct PolyFq {
  const FieldTable* F = nullptr;
  std::vector<uint8_t> c;

  PolyFq() = default;
  explicit PolyFq(const FieldTable& f) : F(&f) {}
  PolyFq(const FieldTable& f, std::vector<uint8_t> coeffs);

  int degree() const { return (int)c.size() - 1; } /* zero poly: -1 */
  bool is_zero() const { return c.empty(); }
  uint8_t coeff(int i) const { return i < (int)c.size() ? c[i] : 0; }
  uint8_t lead() const { return c.empty() ? 0 : c.back(); }

  static PolyFq x_power(const FieldTable& f, int k, uint8_t scale = 1);
  static PolyFq constant(const FieldTable& f, uint8_t v);

  PolyFq operator+(const PolyFq& o) const;
  PolyFq operator-(const PolyFq& o) const;
  PolyFq operator*(const PolyFq& o) const;
  bool operator==(const PolyFq& o) const { return c == o.c; }

  PolyFq scaled(uint8_t s) const;
  PolyFq derivative() const;
  PolyFq monic() const;
  uint8_t eval(uint8_t x) const;
  void normalize();
};

PolyFq poly_gcd(PolyFq a, PolyFq b);

/* class predicates used throughout: a matrix is regular semisimple
   when its characteristic polynomial is squarefree; it moves every
   nonzero vector exactly when 1 is not an eigenvalue. */
bool is_regular_semisimple(const MatFq& m);
bool fixes_no_vector(const MatFq& m);

}  // namespace rankscope
