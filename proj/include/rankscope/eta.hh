#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rankscope/ranks.hh"

namespace rankscope {

/* ---- partitions ------------------------------------------------- */

struct OrderedPartition {
  std::vector<int> parts; /* nonincreasing, each >= 1 */

  int sum() const;
  size_t length() const { return parts.size(); }
  bool operator==(const OrderedPartition& o) const { return parts == o.parts; }
  bool operator<(const OrderedPartition& o) const { return parts < o.parts; }
  std::string text() const; /* "[d1,d2,...]" */
};

/* literal grammar "[d1,d2,...]"; NotInDomain on malformed or
   unsorted input. */
OrderedPartition parse_partition(const std::string& text);

/* all partitions of n, descending lexicographic */
std::vector<OrderedPartition> partitions_of(int n);

/* true when b dominates a: length(b) <= length(a) and every partial
   sum of a is <= the matching partial sum of b. */
bool dominance(const OrderedPartition& a, const OrderedPartition& b);

/* ---- joint two-sided action on rectangular matrices -------------- */

/* permutation character of GL_n x GL_k acting on n-by-k matrices,
   tabulated per class pair: q^(dim of the intertwining space
   {m : g m = m h}). */
struct JointCharacter {
  std::shared_ptr<const GroupAtlas> big, small;
  std::vector<std::vector<int64_t>> value; /* [big class][small class] */

  int64_t operator()(uint32_t c_big, uint32_t c_small) const {
    return value[c_big][c_small];
  }
};

/* cached per (n, k, q); k <= n */
std::shared_ptr<const JointCharacter> joint_character(int n, int k, int q);

/* ---- multiplicity spaces and the rank-k correspondence ----------- */

/* character of the multiplicity space M(tau) = Hom_{GL_k}(tau, .)
   inside the matrix permutation module, as a class function on GL_n,
   with its guarded decomposition into GL_n irreps. */
struct MultSpaceChar {
  uint32_t tau = 0;
  uint64_t dim = 0;
  std::vector<cplx> row;     /* per GL_n class */
  std::vector<int64_t> mult; /* per GL_n irrep, nonnegative */
};

MultSpaceChar multiplicity_space_character(const CharTable& big,
                                           const CharTable& small,
                                           uint32_t tau);

enum class EtaMode { u_rank, strict };

struct EtaRow {
  uint32_t tau = 0;
  uint64_t tau_dim = 1;
  bool in_domain = true; /* strict mode: rank(tau) >= 2k - n */
  uint32_t eta = 0;
  uint64_t eta_dim = 1;
  std::vector<std::pair<uint32_t, int64_t>> constituents; /* (irrep, mult) */
  long double dim_ratio = 0; /* eta_dim / (tau_dim * q^(k(n-k))) */
  bool window_ok = false;    /* ratio within [1 - 5/q, 1 + 5/q] */
};

struct EtaReport {
  GroupDesc big, small;
  int k = 0;
  EtaMode mode = EtaMode::u_rank;
  std::vector<EtaRow> rows; /* one per irrep of GL_k */
};

/* decompose every M(tau) and read off the unique constituent of the
   target rank (block-subgroup rank k, or strict tensor rank k).
   uniqueness, multiplicity one and injectivity across tau are
   enforced; in block mode any constituent of rank above k is also a
   failure.  the summed isotypic characters are checked against the
   matrix permutation character classwise. */
EtaReport eta_correspondence(const CharTable& big, const CharTable& small,
                             EtaMode mode);

/* single-tau accessor over the cached report */
uint32_t eta_of(const CharTable& big, const CharTable& small, uint32_t tau,
                EtaMode mode);

/* coverage of the rank-k irreps by twists of eta images, k < n/2 */
struct ExhaustionReport {
  int k = 0;
  std::vector<uint32_t> rank_k;  /* irreps of block rank exactly k */
  std::vector<uint32_t> missing; /* those not twist-equivalent to an eta */
  bool complete = false;
};

ExhaustionReport exhaustion_check(const CharTable& big,
                                  const CharTable& small);

/* ---- flags and parabolic permutation characters ------------------ */

/* every flag of subspace dimensions d_1, d_1+d_2, ... (the full space
   omitted), each subspace held as reduced row-echelon basis rows. */
struct FlagSpace {
  OrderedPartition D;
  std::vector<int> level_dims;           /* proper partial sums */
  std::vector<int> level_off;            /* row offsets per level */
  std::vector<std::vector<uint16_t>> rows;   /* per flag, concatenated */
  std::vector<std::vector<int8_t>> pivots;   /* aligned with rows */
};

FlagSpace build_flag_space(const GroupAtlas& at, const OrderedPartition& D,
                           const Limits& lim = default_limits());

/* fixed-flag count per class */
std::vector<cplx> flag_permutation_character(
    const GroupAtlas& at, const OrderedPartition& D,
    const Limits& lim = default_limits());

/* the constituent of the D-flag character that carries multiplicity
   one and is missing from every strictly dominating flag character;
   cached per (group, D). */
uint32_t sps_constituent(const CharTable& tab, const OrderedPartition& D);

/* induced character of x -> prod_j chi_j(det g_j) rho_{D_j}(g_j) from
   the block parabolic of shape S; chi_j are unit-group characters
   given as exponents of the least primitive root, pairwise distinct.
   irreducibility is asserted through the self inner product. */
std::vector<cplx> split_series_character(const CharTable& tab,
                                         const OrderedPartition& S,
                                         const std::vector<OrderedPartition>& block_types,
                                         const std::vector<int>& chi_exponents,
                                         const Limits& lim = default_limits());

/* tensor rank of every rho_D against the first-part prediction */
struct CorankRow {
  OrderedPartition D;
  uint32_t rho = 0;
  uint64_t dim = 1;
  int plain = 0, strict_r = 0;
  int expected = 0; /* n - d_1 */
  bool ok = false;
};

std::vector<CorankRow> corank_fact_check(const CharTable& tab);

}  // namespace rankscope
