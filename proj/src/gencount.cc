#include "rankscope/gencount.hh"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace rankscope {

namespace {

using bigint = boost::multiprecision::cpp_int;

uint32_t transvection_of(const GroupAtlas& at) {
  if (at.transvection_class < 0)
    throw NotInDomain("group has no transvection class");
  return (uint32_t)at.transvection_class;
}

/* #C^ell / |G| as a long double scale factor */
long double count_scale(const GroupAtlas& at, int ell) {
  uint32_t t = transvection_of(at);
  return std::pow((long double)at.class_size[t], (long double)ell) /
         (long double)at.order;
}

}  // namespace

int64_t frobenius_count(const CharTable& tab, int ell, uint32_t g_class) {
  const auto& at = *tab.atlas;
  if (ell < 1) throw NotInDomain("length must be positive");
  if (g_class >= at.K) throw InvalidClass("no such class");
  uint32_t t = transvection_of(at);
  uint32_t ginv = at.inverse_class[g_class];

  cplx sum{1, 0};
  for (uint32_t r = 0; r < tab.K; ++r) {
    if (r == tab.trivial_id) continue;
    cplx cr = tab.val[r][t] / (long double)tab.dims[r];
    sum += (long double)tab.dims[r] * std::pow(cr, ell) * tab.val[r][ginv];
  }
  long double scale = count_scale(at, ell);
  if (scale > 9.0e18L)
    throw BudgetExceeded("word count at length " + std::to_string(ell) +
                         " exceeds the 64-bit range");
  long double tol = std::max(1e-6L, 1e-13L * scale);
  int64_t count =
      guarded_round(scale * sum, tol, "transvection word count");
  if (count < 0)
    throw ConsistencyFailure("negative word count at class " +
                             std::to_string(g_class));
  return count;
}

std::vector<std::vector<int64_t>> convolution_oracle(const GroupAtlas& at,
                                                     int ell_max,
                                                     const Limits& lim) {
  uint32_t t = transvection_of(at);
  uint64_t cn = at.class_size[t];
  if (ell_max < 1) throw NotInDomain("length must be positive");
  if (at.order * cn * (uint64_t)ell_max > lim.convolution_cap)
    throw BudgetExceeded("convolution over " + std::to_string(at.order) +
                         " x " + std::to_string(cn) + " x " +
                         std::to_string(ell_max));

  std::vector<uint32_t> steps; /* inverses of the class members */
  for (uint64_t i = at.class_offset[t]; i < at.class_offset[t + 1]; ++i)
    steps.push_back((uint32_t)at.inv_code(at.by_class[i]));

  std::vector<std::vector<int64_t>> dense(
      ell_max + 1, std::vector<int64_t>(at.code_space, 0));
  dense[0][at.identity_code()] = 1;
  for (int l = 1; l <= ell_max; ++l) {
    const auto& prev = dense[l - 1];
    auto& cur = dense[l];
    run_chunks((int64_t)at.elements.size(), 4096,
               [&](int, int64_t lo, int64_t hi) {
                 for (int64_t i = lo; i < hi; ++i) {
                   uint64_t x = at.elements[i];
                   int64_t acc = 0;
                   for (uint32_t s : steps) acc += prev[at.mul_codes(x, s)];
                   cur[x] = acc;
                 }
               });
  }

  std::vector<std::vector<int64_t>> out(ell_max + 1,
                                        std::vector<int64_t>(at.K, 0));
  bigint mass_expect = 1;
  for (int l = 0; l <= ell_max; ++l) {
    bigint mass = 0;
    for (uint32_t c = 0; c < at.K; ++c) {
      int64_t v = dense[l][at.class_rep[c]];
      out[l][c] = v;
      mass += bigint(v) * at.class_size[c];
      for (uint64_t i = at.class_offset[c]; i < at.class_offset[c + 1]; ++i)
        if (dense[l][at.by_class[i]] != v)
          throw ConsistencyFailure("convolution result is not a class function");
    }
    if (mass != mass_expect)
      throw ConsistencyFailure("convolution mass at length " +
                               std::to_string(l) + " is off");
    mass_expect *= cn;
  }
  return out;
}

std::vector<long double> rank_split_sums(const CharTable& tab, int ell,
                                         uint32_t g_class) {
  const auto& at = *tab.atlas;
  int n = at.n, q = at.q;
  uint32_t t = transvection_of(at);
  uint32_t ginv = at.inverse_class[g_class];

  std::vector<cplx> acc(n + 1, cplx{0, 0});
  cplx top_ratio{-1.0L / ((long double)ipow((uint64_t)q, (unsigned)(n - 1)) - 1), 0};
  for (uint32_t r = 0; r < tab.K; ++r) {
    if (r == tab.trivial_id) continue;
    int k = tensor_rank(tab, r, RankMode::sl);
    cplx cr = k == n ? top_ratio : tab.val[r][t] / (long double)tab.dims[r];
    acc[k] += (long double)tab.dims[r] * std::pow(cr, ell) * tab.val[r][ginv];
  }

  std::vector<long double> out(n + 1, 0.0L);
  for (int k = 1; k <= n; ++k) {
    if (std::fabs(acc[k].imag()) > 1e-6L)
      throw NumericalGuard("rank-" + std::to_string(k) +
                           " deviation slice is not real");
    out[k] = acc[k].real();
  }
  return out;
}

RankOneSumReport rank_one_sum_check(const CharTable& tab) {
  const auto& at = *tab.atlas;
  int q = at.q;
  uint64_t points = ipow((uint64_t)q, (unsigned)at.n);

  RankOneSumReport rep;
  for (uint32_t r = 0; r < tab.K; ++r)
    if (r != tab.trivial_id && tensor_rank(tab, r, RankMode::sl) == 1)
      rep.rank_one_irreps.push_back(r);

  /* the vector permutation module carries the trivial irrep twice and
     each rank-one irrep once, and nothing else */
  auto omega = omega_power_row(at, 1);
  uint64_t dim_seen = 2;
  for (uint32_t r = 0; r < tab.K; ++r) {
    int64_t m = guarded_round(tab.inner(omega, tab.val[r]), 1e-6L,
                              "vector module constituent");
    bool rank_one = std::find(rep.rank_one_irreps.begin(),
                              rep.rank_one_irreps.end(),
                              r) != rep.rank_one_irreps.end();
    int64_t expect = r == tab.trivial_id ? 2 : rank_one ? 1 : 0;
    if (m != expect)
      throw ConsistencyFailure("vector module multiplicity of irrep " +
                               std::to_string(r) + " is " + std::to_string(m) +
                               ", expected " + std::to_string(expect));
    if (rank_one) dim_seen += tab.dims[r];
  }
  if (dim_seen != points)
    throw ConsistencyFailure("rank-one dimensions do not fill the vector module");

  rep.all_minus_two = true;
  for (uint32_t c = 0; c < at.K; ++c) {
    if (!at.class_no_fix[c]) continue;
    cplx s{0, 0};
    for (uint32_t r : rep.rank_one_irreps) s += tab.val[r][c];
    RankOneRow row;
    row.g_class = c;
    row.sum = guarded_round(s, 1e-6L, "rank-one character sum");
    /* fixed-vector law: the sum is q^(dim ker(g-1)) minus the two
       trivial copies, which is -1 on these classes */
    int64_t law = (int64_t)ipow((uint64_t)q, at.class_fix_dim[c]) - 2;
    if (row.sum != law)
      throw ConsistencyFailure("rank-one sum at class " + std::to_string(c) +
                               " is " + std::to_string(row.sum) +
                               ", fixed-point law gives " + std::to_string(law));
    row.matches_minus_two = row.sum == -2;
    rep.all_minus_two = rep.all_minus_two && row.matches_minus_two;
    rep.rows.push_back(row);
  }
  return rep;
}

GenerationTable sts_deviation_table(const CharTable& tab, uint32_t g_class,
                                    int ell_max, const Limits& lim) {
  const auto& at = *tab.atlas;
  if (g_class >= at.K) throw InvalidClass("no such class");
  if (!at.class_rss[g_class])
    throw InvalidClass("class is not regular semisimple");
  if (!at.class_no_fix[g_class])
    throw InvalidClass("class has an eigenvalue one");

  std::optional<std::vector<std::vector<int64_t>>> oracle;
  try {
    oracle = convolution_oracle(at, ell_max, lim);
  } catch (const BudgetExceeded&) {
  }

  GenerationTable out;
  out.group = tab.desc();
  out.g_class = g_class;
  for (int l = 1; l <= ell_max; ++l) {
    GenRow row;
    row.ell = l;
    row.frobenius = frobenius_count(tab, l, g_class);
    if (oracle) {
      row.oracle = (*oracle)[l][g_class];
      if (*row.oracle != row.frobenius)
        throw ConsistencyFailure("formula and convolution disagree at length " +
                                 std::to_string(l));
    }
    row.deviation = 1.0L - (long double)row.frobenius / count_scale(at, l);
    row.rank_sums = rank_split_sums(tab, l, g_class);
    long double total = 0;
    for (long double s : row.rank_sums) total += s;
    if (std::fabs(row.deviation + total) >
        1e-6L * (1.0L + std::fabs(row.deviation)))
      throw ConsistencyFailure("deviation does not match the rank slices at "
                               "length " + std::to_string(l));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace rankscope
