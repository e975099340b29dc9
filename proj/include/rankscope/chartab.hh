#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rankscope/atlas.hh"
#include "rankscope/common.hh"

namespace rankscope {

/* exact complex character table.  each value is stored both as a
   complex number and as the integer multiplicity vector of the o-th
   roots of unity at that class (o = element order), so rational and
   integral values can be recovered without rounding error. */
struct CharTable {
  std::shared_ptr<const GroupAtlas> atlas;
  uint32_t K = 0;
  uint64_t p_mod = 0; /* modulus used by the modular eigenvector stage */
  std::vector<uint64_t> dims;
  std::vector<std::vector<cplx>> val;                  /* [irrep][class] */
  std::vector<std::vector<std::vector<int64_t>>> root_mult; /* [r][c][t] */
  uint32_t trivial_id = 0;

  cplx value(uint32_t r, uint32_t c) const { return val[r][c]; }

  /* (1/|G|) sum_c s_c a(c) conj(b(c)) */
  cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const;
  cplx inner_irrep(const std::vector<cplx>& a, uint32_t r) const {
    return inner(a, val[r]);
  }
  GroupDesc desc() const { return atlas->desc(); }
};

std::shared_ptr<const CharTable> dixon_table(
    std::shared_ptr<const GroupAtlas> atlas,
    const Limits& lim = default_limits());

/* process-wide cache keyed like atlas_of (binary SL folds onto GL). */
std::shared_ptr<const CharTable> table_of(GroupKind kind, int n, int q);
std::shared_ptr<const CharTable> table_of(const GroupDesc& g);

/* ids of the one dimensional characters, ascending id */
std::vector<uint32_t> linear_characters(const CharTable& tab);

/* pointwise product of irrep r with linear character lin */
std::vector<cplx> twist_row(const CharTable& tab, uint32_t r, uint32_t lin);

/* the unique irrep whose row matches the given class function within
   tol at every class; NotInDomain when there is none. */
uint32_t match_irrep(const CharTable& tab, const std::vector<cplx>& row,
                     long double tol = 0.4L);

/* character of Ind_H^G(chi_H).  the subgroup is an explicit sorted
   list of member codes; chi_H is evaluated on codes and must be
   constant on H-classes. */
std::vector<cplx> induced_character(const GroupAtlas& at,
                                    const std::vector<uint32_t>& sub_codes,
                                    const std::function<cplx(uint64_t)>& chi_h,
                                    const Limits& lim = default_limits());

/* q^(k * dim ker(g-1)) as a class function row */
std::vector<cplx> omega_power_row(const GroupAtlas& at, int k);

/* true when the irrep has no invariant vector under the unipotent
   radical of any proper standard block parabolic (the average of the
   character over each radical is zero).  GL atlases only. */
bool is_cuspidal(const CharTable& tab, uint32_t r);

struct CharRatio {
  int64_t num = 0;
  uint64_t den = 1;
  cplx raw{0, 0};
};

/* character value at the distinguished transvection class divided by
   the degree, reduced; NumericalGuard when the value is not a plain
   integer (then the ratio is not rational). */
CharRatio char_ratio_at_transvection(const CharTable& tab, uint32_t r);

}  // namespace rankscope
