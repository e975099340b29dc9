#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "rankscope/chartab.hh"

namespace rankscope {

/* the abelian block subgroup {I + X : X in M_{rows x cols}} of GL_n
   (cols = n - rows), with the orbit structure of the block symmetry
   action X -> A X D.  for a GL group the pairs (A, D) are arbitrary
   invertible and the orbits are exactly the rank strata; for an SL
   group they satisfy det A = det D, which can split a stratum (square
   blocks split by det modulo squares).  every orbit has a constant
   surrounding-group class of I + X, verified at build time. */
struct USplitStructure {
  std::shared_ptr<const GroupAtlas> atlas;
  int rows = 0, cols = 0;
  int mrank = 0;        /* min(rows, cols) */
  uint64_t space = 0;   /* q^(rows*cols) */
  uint32_t S = 0;       /* orbit count; rank strata count when GL */

  std::vector<uint8_t> rank_of;        /* per block code */
  std::vector<uint16_t> orbit_of;      /* per block code */
  std::vector<uint64_t> orbit_size;    /* per orbit, rank-major order */
  std::vector<int> orbit_rank;
  std::vector<uint64_t> orbit_rep;     /* least block code */
  std::vector<uint16_t> orbit_class;   /* class of I + rep */
  std::vector<uint16_t> class_of_code; /* class of I + X per block code */
  std::vector<std::vector<cplx>> ft_full; /* [orbit][code]: transform of
                                             the orbit indicator */

  uint64_t rank_count(int r) const;    /* stratum size */
  uint64_t embed(uint64_t block_code) const; /* code of I + X in GL_n */
  cplx ft(uint32_t at_orbit, uint32_t of_orbit) const {
    return ft_full[of_orbit][orbit_rep[at_orbit]];
  }
};

/* standard split rows = floor(n/2); rows may be overridden for the
   other block subgroups U_j, 1 <= j <= n-1. */
std::shared_ptr<const USplitStructure> build_u_structure(
    std::shared_ptr<const GroupAtlas> atlas, int rows = -1,
    const Limits& lim = default_limits());
std::shared_ptr<const USplitStructure> build_u_structure(int n, int q);

/* cached per (group, rows) */
std::shared_ptr<const USplitStructure> u_structure_of(
    const GroupDesc& g, int rows = -1);

/* integer transform table F[r][s] = transform of the rank-s stratum
   indicator at the rank-r representative; defined when orbits and
   strata coincide. */
std::vector<std::vector<int64_t>> orbit_ft_matrix(const USplitStructure& u);

/* multiplicities of the block-subgroup characters in the restriction
   of irrep r, one entry per orbit of u, solved from the transform
   system and then verified by full reconstruction over every block
   element.  u_rank = largest stratum rank carrying a multiplicity. */
struct UProfile {
  std::vector<int64_t> mult;
  int u_rank = 0;
};
UProfile u_rank_profile(const CharTable& tab, uint32_t r,
                        const USplitStructure& u);

enum class RankMode { plain, strict, sl };

/* smallest tensor power of the vector permutation character that
   contains the irrep; plain mode minimizes over one-dimensional
   twists, sl mode reads the power on the SL classes. */
int tensor_rank(const CharTable& tab, uint32_t r, RankMode mode);

/* irrep-id sets of the ascending power filtration, k = 0..n; strict
   growth and termination at the full dual are enforced. */
std::vector<std::vector<uint32_t>> filtration_chain(const CharTable& tab);

/* per k < floor(n/2): the exact-rank sets of both notions.  the
   tensor set must be contained in the block-subgroup set; equality is
   reported, not enforced. */
struct AgreementRow {
  int k = 0;
  std::vector<uint32_t> tensor_set, u_set;
  bool equal = false;
  std::vector<uint32_t> only_tensor, only_u;
};
std::vector<AgreementRow> agreement_check(const CharTable& tab,
                                          const USplitStructure& u);

/* recompute the block-subgroup rank of one irrep against every split
   U_j; ranks from splits wide enough for the base rank must agree. */
struct IndependenceReport {
  uint32_t irrep = 0;
  int base_rank = 0;
  std::vector<std::pair<int, int>> per_split; /* (rows, rank) */
  bool all_equal = false;
};
IndependenceReport rank_independence_check(const CharTable& tab, uint32_t r);

struct RankProfile {
  uint32_t irrep = 0;
  uint64_t dim = 1;
  bool cr_rational = false; /* transvection ratio real (then reduced) */
  CharRatio cr;
  cplx cr_raw{0, 0};
  std::vector<int64_t> mult; /* per orbit of the standard split */
  int u_rank = 0;
  int tensor_rank = 0; /* plain for GL, restriction reading for SL */
  int strict_rank = 0;
  uint32_t twist_orbit = 0; /* least irrep id in the twist class */
};

std::vector<RankProfile> profile_all(const CharTable& tab,
                                     const USplitStructure& u);

}  // namespace rankscope
