#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

#include "rankscope/common.hh"
#include "rankscope/gf.hh"

namespace rankscope {

using bigint = boost::multiprecision::cpp_int;

/* |GL_k(F_q)| = prod_{i<k} (q^k - q^i) */
bigint gl_cardinality(int k, int q);

/* number of k dimensional subspaces of F_q^n; 0 when k > n */
bigint grassmannian_cardinality(int n, int k, int q);

/* number of m x n matrices over F_q of rank exactly k */
bigint count_rank_k(int m, int n, int k, int q);

/* rank k matrices whose pairing with the rank one point E_11 is zero,
   split into the four overlapping sub-counts:
     a: first column zero, b: first row zero, c: both,
     d: neither but the (1,1) entry still vanishes.
   total = a + b - c + d. */
struct OrthogonalCounts {
  bigint total, a, b, c, d;
};
OrthogonalCounts count_rank_k_orthogonal(int m, int n, int k, int q);

/* Fourier transform of the rank k indicator at a rank one matrix,
   in closed form
     (q^{n+m-k} - q^n - q^m + 1) Gamma_{n,k} Gamma_{m,k} |GL_k|
     / ((q^n - 1)(q^m - 1))
   for k <= m <= n.  Division exactness and the sign pattern
   (1 at k=0, positive for k<m, negative at k=m) are asserted. */
bigint ft_rank_one_closed_form(int m, int n, int k, int q);

/* rank of every m x n matrix, indexed by matrix code.  the
   incremental path walks rows most-significant first and reuses the
   elimination state of shared row prefixes; results are identical to
   the plain per-code elimination. */
std::vector<uint8_t> rank_census(int m, int n, int q,
                                 bool incremental = false,
                                 const Limits& lim = default_limits());

/* exhaustive sum of psi(scale * trace(B^t A)) over rank k matrices A.
   the same value is recomputed from the zero-pairing count as
   -#(rank k)/(q-1) + q #(pairing 0)/(q-1) and both routes must agree. */
int64_t ft_brute_force(int m, int n, int k, int q, const MatFq& B,
                       uint8_t psi_scale = 1,
                       const Limits& lim = default_limits());

/* per-rank signs of the transform at the rank one point for the
   matrix model of the distinguished abelian subgroup of GL_n:
   m = floor(n/2) by ceil(n/2) matrices. */
struct RankSignRow {
  int r = 0;
  bigint value;       /* closed-form transform at the rank one point */
  bigint orbit;       /* number of rank r matrices */
  long double ratio = 0; /* value / orbit */
  bool window_ok = false; /* ratio within q^-r * [1 - 5/q, 1 + 5/q] */
};
struct PositivityReport {
  int n = 0, q = 0, m = 0, cols = 0;
  std::vector<RankSignRow> rows;
};
PositivityReport positivity_report(int n, int q,
                                   const Limits& lim = default_limits());

struct FTReport {
  int m = 0, n = 0, k = 0, q = 0;
  bigint count_rank;   /* #(rank k) */
  OrthogonalCounts orth;
  bigint closed_ft;
  std::optional<int64_t> brute_ft;
  int sign = 0;
};
FTReport make_ft_report(int m, int n, int k, int q, bool brute,
                        const Limits& lim = default_limits());

}  // namespace rankscope
