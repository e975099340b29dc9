#include "rankscope/mft.hh"

#include <array>
#include <map>
#include <memory>
#include <mutex>

namespace rankscope {

namespace {

bigint qpow(int q, int e) {
  bigint r = 1;
  for (int i = 0; i < e; ++i) r *= q;
  return r;
}

bigint exact_div(const bigint& num, const bigint& den, const char* what) {
  if (den == 0 || num % den != 0)
    throw ConsistencyFailure(std::string(what) + ": quotient is not integral");
  return num / den;
}

void check_shape(int m, int n, int q) {
  if (m < 1 || n < 1) throw NotInDomain("matrix shape must be positive");
  FieldTable::get(q); /* rejects unsupported q */
}

}  // namespace

bigint gl_cardinality(int k, int q) {
  if (k < 0) throw NotInDomain("negative matrix block size");
  FieldTable::get(q);
  bigint out = 1, qk = qpow(q, k);
  for (int i = 0; i < k; ++i) out *= qk - qpow(q, i);
  return out;
}

bigint grassmannian_cardinality(int n, int k, int q) {
  if (n < 0 || k < 0) throw NotInDomain("negative dimension");
  FieldTable::get(q);
  if (k > n) return 0;
  bigint num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= qpow(q, n - i) - 1;
    den *= qpow(q, i + 1) - 1;
  }
  return exact_div(num, den, "subspace count");
}

bigint count_rank_k(int m, int n, int k, int q) {
  check_shape(m, n, q);
  if (k < 0 || k > std::min(m, n))
    throw NotInDomain("rank outside 0..min(m,n)");
  return grassmannian_cardinality(n, k, q) *
         grassmannian_cardinality(m, k, q) * gl_cardinality(k, q);
}

OrthogonalCounts count_rank_k_orthogonal(int m, int n, int k, int q) {
  check_shape(m, n, q);
  if (k < 0 || k > std::min(m, n))
    throw NotInDomain("rank outside 0..min(m,n)");
  bigint gn = grassmannian_cardinality(n, k, q);
  bigint gn1 = grassmannian_cardinality(n - 1, k, q);
  bigint gm = grassmannian_cardinality(m, k, q);
  bigint gm1 = grassmannian_cardinality(m - 1, k, q);
  bigint glk = gl_cardinality(k, q);
  /* one-dimension-down recursion, asserted on both sides */
  if (gn1 * (qpow(q, n) - 1) != gn * (qpow(q, n - k) - 1) ||
      gm1 * (qpow(q, m) - 1) != gm * (qpow(q, m - k) - 1))
    throw ConsistencyFailure("subspace count recursion failed");
  OrthogonalCounts out;
  out.a = gn1 * gm * glk;
  out.b = gn * gm1 * glk;
  out.c = gn1 * gm1 * glk;
  out.d = exact_div((gn - gn1) * (gm * (qpow(q, m - 1) - 1) -
                                  gm1 * (qpow(q, m) - 1)) * glk,
                    qpow(q, m) - 1, "free-position sub-count");
  bigint num = ((qpow(q, m - 1) - 1) * (qpow(q, n) - 1) +
                (qpow(q, n - k) - 1) * (q - 1) * qpow(q, m - 1)) *
               gn * gm * glk;
  out.total = exact_div(num, (qpow(q, n) - 1) * (qpow(q, m) - 1),
                        "zero-pairing total");
  if (out.total != out.a + out.b - out.c + out.d)
    throw ConsistencyFailure("zero-pairing split does not add up");
  return out;
}

bigint ft_rank_one_closed_form(int m, int n, int k, int q) {
  check_shape(m, n, q);
  if (!(0 <= k && k <= m && m <= n))
    throw NotInDomain("need 0 <= k <= m <= n");
  bigint num = (qpow(q, n + m - k) - qpow(q, n) - qpow(q, m) + 1) *
               grassmannian_cardinality(n, k, q) *
               grassmannian_cardinality(m, k, q) * gl_cardinality(k, q);
  bigint out = exact_div(num, (qpow(q, n) - 1) * (qpow(q, m) - 1),
                         "rank-one transform");
  if (k == 0) {
    if (out != 1) throw ConsistencyFailure("transform of {0} must be 1");
  } else if (k < m) {
    if (out <= 0) throw ConsistencyFailure("transform must be positive below top rank");
  } else if (out >= 0) {
    throw ConsistencyFailure("transform must be negative at top rank");
  }
  return out;
}

namespace {

uint64_t census_budget(int m, int n, int q, const Limits& lim) {
  uint64_t total = 1;
  for (int i = 0; i < m * n; ++i) {
    total *= (uint64_t)q;
    if (total > lim.brute_ft_cap)
      throw BudgetExceeded("matrix space too large for exhaustive scan");
  }
  return total;
}

/* rows are filled most-significant first so the innermost loop walks
   codes consecutively; the elimination basis persists across shared
   prefixes. */
struct CensusWalker {
  const FieldTable& F;
  int m, n;
  uint64_t rowspace;
  std::vector<uint8_t>& out;
  std::array<std::array<uint8_t, 16>, 16> basis{};
  std::array<int, 16> pivot{};
  int depth = 0;

  CensusWalker(const FieldTable& f, int m_, int n_, std::vector<uint8_t>& o)
      : F(f), m(m_), n(n_), rowspace(ipow(f.q, n_)), out(o) {}

  /* reduce row in place against the basis; returns pivot or -1 */
  int reduce(std::array<uint8_t, 16>& row) const {
    for (int b = 0; b < depth; ++b) {
      uint8_t c = row[pivot[b]];
      if (!c) continue;
      for (int j = 0; j < n; ++j)
        row[j] = F.sub[row[j]][F.mul[c][basis[b][j]]];
    }
    for (int j = 0; j < n; ++j)
      if (row[j]) return j;
    return -1;
  }

  void walk(int row_idx, uint64_t base) {
    std::array<uint8_t, 16> row{};
    uint64_t stride = ipow(F.q, (unsigned)(row_idx * n));
    for (uint64_t rv = 0; rv < rowspace; ++rv) {
      uint64_t t = rv;
      for (int j = 0; j < n; ++j) {
        row[j] = (uint8_t)(t % F.q);
        t /= F.q;
      }
      int pv = reduce(row);
      if (row_idx == 0) {
        out[base + rv] = (uint8_t)(depth + (pv >= 0 ? 1 : 0));
        continue;
      }
      if (pv < 0) {
        walk(row_idx - 1, base + rv * stride);
        continue;
      }
      uint8_t s = F.inv[row[pv]];
      for (int j = 0; j < n; ++j) basis[depth][j] = F.mul[s][row[j]];
      pivot[depth] = pv;
      ++depth;
      walk(row_idx - 1, base + rv * stride);
      --depth;
    }
  }
};

std::shared_ptr<const std::vector<uint8_t>> cached_census(int m, int n, int q,
                                                          const Limits& lim) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>,
                  std::shared_ptr<const std::vector<uint8_t>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(m, n, q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ranks = std::make_shared<std::vector<uint8_t>>(
      rank_census(m, n, q, true, lim));
  cache[key] = ranks;
  return ranks;
}

}  // namespace

std::vector<uint8_t> rank_census(int m, int n, int q, bool incremental,
                                 const Limits& lim) {
  check_shape(m, n, q);
  if (m > 16 || n > 16) throw BudgetExceeded("matrix shape too large");
  uint64_t total = census_budget(m, n, q, lim);
  const FieldTable& F = FieldTable::get(q);
  std::vector<uint8_t> out(total, 0);
  if (incremental) {
    CensusWalker w(F, m, n, out);
    w.walk(m - 1, 0);
    return out;
  }
  run_chunks((int64_t)total, 1 << 16, [&](int, int64_t lo, int64_t hi) {
    for (int64_t code = lo; code < hi; ++code)
      out[code] = (uint8_t)MatFq::from_code(F, m, n, (uint64_t)code).rank();
  });
  return out;
}

int64_t ft_brute_force(int m, int n, int k, int q, const MatFq& B,
                       uint8_t psi_scale, const Limits& lim) {
  check_shape(m, n, q);
  if (k < 0 || k > std::min(m, n))
    throw NotInDomain("rank outside 0..min(m,n)");
  if (B.rows != m || B.cols != n)
    throw NotInDomain("evaluation point has the wrong shape");
  const FieldTable& F = FieldTable::get(q);
  if (psi_scale == 0 || psi_scale >= q)
    throw NotInDomain("additive character scale must be a unit");
  uint64_t total = census_budget(m, n, q, lim);
  auto ranks = cached_census(m, n, q, lim);

  /* pairing digit tables: contrib[cell][digit] = B_cell * digit */
  int cells = m * n;
  std::vector<std::array<uint8_t, 9>> contrib(cells);
  for (int t = 0; t < cells; ++t)
    for (int v = 0; v < q; ++v)
      contrib[t][(size_t)v] = F.mul[B.a[(size_t)t]][(uint8_t)v];

  int64_t grain = 1 << 16;
  int chunks = (int)((total + (uint64_t)grain - 1) / (uint64_t)grain);
  std::vector<std::array<int64_t, 9>> part((size_t)chunks);
  for (auto& p : part) p.fill(0);
  run_chunks((int64_t)total, grain, [&](int chunk, int64_t lo, int64_t hi) {
    auto& cnt = part[(size_t)chunk];
    for (int64_t code = lo; code < hi; ++code) {
      if ((*ranks)[(size_t)code] != k) continue;
      uint64_t t = (uint64_t)code;
      uint8_t pair = 0;
      for (int cell = 0; cell < cells; ++cell) {
        pair = F.add[pair][contrib[cell][(size_t)(t % (uint64_t)q)]];
        t /= (uint64_t)q;
      }
      ++cnt[pair];
    }
  });
  std::array<int64_t, 9> cnt{};
  for (const auto& p : part)
    for (int t = 0; t < q; ++t) cnt[(size_t)t] += p[(size_t)t];

  int64_t hits = 0;
  for (int t = 0; t < q; ++t) hits += cnt[(size_t)t];
  if (bigint(hits) != count_rank_k(m, n, k, q))
    throw ConsistencyFailure("rank census disagrees with the product formula");

  /* route 1: explicit character sum */
  GuardedInteger acc;
  for (int t = 0; t < q; ++t)
    acc.add((long double)cnt[(size_t)t] *
            F.psi[F.mul[psi_scale][(uint8_t)t]]);
  int64_t value = acc.round("rank indicator transform");

  /* route 2: from the zero-pairing count alone */
  int64_t num = (int64_t)q * cnt[0] - hits;
  if (num % (q - 1) != 0)
    throw ConsistencyFailure("zero-pairing route is not integral");
  if (value != num / (q - 1))
    throw ConsistencyFailure("transform routes disagree");
  return value;
}

PositivityReport positivity_report(int n, int q, const Limits& lim) {
  if (n < 2) throw NotInDomain("need n >= 2");
  PositivityReport rep;
  rep.n = n;
  rep.q = q;
  rep.m = n / 2;
  rep.cols = n - n / 2;
  const FieldTable& F = FieldTable::get(q);
  uint64_t total = census_budget(rep.m, rep.cols, q, lim);
  (void)total;
  MatFq point(F, rep.m, rep.cols);
  point.at(0, 0) = 1;
  for (int r = 0; r <= rep.m; ++r) {
    RankSignRow row;
    row.r = r;
    row.value = ft_rank_one_closed_form(rep.m, rep.cols, r, q);
    row.orbit = count_rank_k(rep.m, rep.cols, r, q);
    if (bigint(ft_brute_force(rep.m, rep.cols, r, q, point, 1, lim)) !=
        row.value)
      throw ConsistencyFailure("closed form disagrees with the scan");
    row.ratio = row.value.convert_to<long double>() /
                row.orbit.convert_to<long double>();
    long double scale = 1;
    for (int i = 0; i < r; ++i) scale /= q;
    row.window_ok = row.ratio >= scale * (1 - 5.0L / q) &&
                    row.ratio <= scale * (1 + 5.0L / q);
    if (r == 0 && row.value != 1)
      throw ConsistencyFailure("transform of {0} must be 1");
    if (r > 0 && r < rep.m && row.value <= 0)
      throw ConsistencyFailure("transform must be positive below top rank");
    if (r == rep.m && row.value >= 0)
      throw ConsistencyFailure("transform must be negative at top rank");
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

FTReport make_ft_report(int m, int n, int k, int q, bool brute,
                        const Limits& lim) {
  FTReport rep;
  rep.m = m;
  rep.n = n;
  rep.k = k;
  rep.q = q;
  rep.count_rank = count_rank_k(m, n, k, q);
  rep.orth = count_rank_k_orthogonal(m, n, k, q);
  rep.closed_ft = ft_rank_one_closed_form(m, n, k, q);
  rep.sign = rep.closed_ft > 0 ? 1 : (rep.closed_ft < 0 ? -1 : 0);
  if (brute) {
    const FieldTable& F = FieldTable::get(q);
    MatFq point(F, m, n);
    point.at(0, 0) = 1;
    rep.brute_ft = ft_brute_force(m, n, k, q, point, 1, lim);
    if (bigint(*rep.brute_ft) != rep.closed_ft)
      throw ConsistencyFailure("closed form disagrees with the scan");
  }
  return rep;
}

}  // namespace rankscope
