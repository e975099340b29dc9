#pragma once

#include <optional>
#include <vector>

#include "rankscope/ranks.hh"

namespace rankscope {

/* exact number of ways to write the representative of g_class as an
   ordered product of ell transvection-class members, through the
   class-sum character formula at the distinguished transvection. */
int64_t frobenius_count(const CharTable& tab, int ell, uint32_t g_class);

/* the same counts for every class and every 1 <= l <= ell_max, found
   by convolving the class indicator over group elements.  the result
   is indexed [l][class], l = 0..ell_max, and deliberately never
   touches character data, so it can referee the formula above. */
std::vector<std::vector<int64_t>> convolution_oracle(
    const GroupAtlas& at, int ell_max, const Limits& lim = default_limits());

/* the deviation sum split by restriction tensor rank; entry k holds
   the subtotal over irreps of rank k (entry 0 stays zero).  the rank-n
   slice is evaluated with the exact ratio -1/(q^(n-1)-1). */
std::vector<long double> rank_split_sums(const CharTable& tab, int ell,
                                         uint32_t g_class);

/* sums of the rank-one characters on classes that move every nonzero
   vector, against the fixed-vector-count law (value q^dim ker(g-1) - 2)
   and the claimed constant -2. */
struct RankOneRow {
  uint32_t g_class = 0;
  int64_t sum = 0;
  bool matches_minus_two = false;
};

struct RankOneSumReport {
  std::vector<uint32_t> rank_one_irreps;
  std::vector<RankOneRow> rows; /* classes with no eigenvalue one */
  bool all_minus_two = false;
};

RankOneSumReport rank_one_sum_check(const CharTable& tab);

/* per-length generation record for one class */
struct GenRow {
  int ell = 0;
  int64_t frobenius = 0;
  std::optional<int64_t> oracle;
  long double deviation = 0; /* 1 - count * |G| / #C^ell */
  std::vector<long double> rank_sums;
};

struct GenerationTable {
  GroupDesc group;
  uint32_t g_class = 0;
  std::vector<GenRow> rows;
};

/* deviation profile of a regular semisimple class without eigenvalue
   one, lengths 1..ell_max; oracle column filled while the convolution
   budget lasts and cross-checked against the formula. */
GenerationTable sts_deviation_table(const CharTable& tab, uint32_t g_class,
                                    int ell_max,
                                    const Limits& lim = default_limits());

}  // namespace rankscope
