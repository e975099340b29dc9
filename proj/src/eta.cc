#include "rankscope/eta.hh"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace rankscope {

namespace {

cplx unit_root(int order, int64_t t) {
  long double arg =
      2.0L * std::numbers::pi_v<long double> * (long double)(((t % order) + order) % order) / order;
  return {std::cos(arg), std::sin(arg)};
}

void require_gl(const GroupAtlas& at, const char* who) {
  if (at.kind != GroupKind::GL)
    throw NotInDomain(std::string(who) + ": needs a full linear group atlas");
}

}  // namespace

/* ---- partitions ------------------------------------------------- */

int OrderedPartition::sum() const {
  return std::accumulate(parts.begin(), parts.end(), 0);
}

std::string OrderedPartition::text() const {
  std::string s = "[";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts[i]);
  }
  return s + "]";
}

OrderedPartition parse_partition(const std::string& text) {
  std::string body;
  for (char ch : text)
    if (!std::isspace((unsigned char)ch)) body += ch;
  if (body.size() < 3 || body.front() != '[' || body.back() != ']')
    throw NotInDomain("partition literal must look like [d1,d2,...]: " + text);
  OrderedPartition d;
  std::istringstream in(body.substr(1, body.size() - 2));
  std::string piece;
  while (std::getline(in, piece, ',')) {
    if (piece.empty() || piece.find_first_not_of("0123456789") != std::string::npos)
      throw NotInDomain("bad partition part '" + piece + "' in " + text);
    d.parts.push_back(std::stoi(piece));
  }
  if (d.parts.empty()) throw NotInDomain("empty partition: " + text);
  for (size_t i = 0; i < d.parts.size(); ++i) {
    if (d.parts[i] < 1) throw NotInDomain("partition parts must be >= 1");
    if (i && d.parts[i] > d.parts[i - 1])
      throw NotInDomain("partition parts must be nonincreasing: " + text);
  }
  return d;
}

std::vector<OrderedPartition> partitions_of(int n) {
  std::vector<OrderedPartition> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int rem, int maxpart) {
    if (rem == 0) {
      out.push_back({cur});
      return;
    }
    for (int p = std::min(rem, maxpart); p >= 1; --p) {
      cur.push_back(p);
      rec(rem - p, p);
      cur.pop_back();
    }
  };
  rec(n, n);
  return out;
}

bool dominance(const OrderedPartition& a, const OrderedPartition& b) {
  if (a.sum() != b.sum())
    throw NotInDomain("dominance needs partitions of the same number");
  if (b.length() > a.length()) return false;
  int pa = 0, pb = 0;
  for (size_t j = 0; j < b.length(); ++j) {
    pa += a.parts[j];
    pb += b.parts[j];
    if (pa > pb) return false;
  }
  return true;
}

/* ---- joint character --------------------------------------------- */

std::shared_ptr<const JointCharacter> joint_character(int n, int k, int q) {
  if (k < 1 || k > n) throw NotInDomain("joint character needs 1 <= k <= n");
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const JointCharacter>> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, k, q});
    if (it != cache.end()) return it->second;
  }

  auto jc = std::make_shared<JointCharacter>();
  jc->big = atlas_of(GroupKind::GL, n, q);
  jc->small = atlas_of(GroupKind::GL, k, q);
  const auto& F = FieldTable::get(q);
  jc->value.assign(jc->big->K, std::vector<int64_t>(jc->small->K, 0));

  for (uint32_t c = 0; c < jc->big->K; ++c) {
    MatFq g = jc->big->mat_of(jc->big->class_rep[c]);
    for (uint32_t d = 0; d < jc->small->K; ++d) {
      MatFq h = jc->small->mat_of(jc->small->class_rep[d]);
      /* operator m -> g m - m h on the nk matrix coordinates */
      MatFq op(F, n * k, n * k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < k; ++b) {
              uint8_t v = 0;
              if (b == j) v = g.at(i, a);
              if (a == i) v = F.sub[v][h.at(b, j)];
              op.at(i * k + j, a * k + b) = v;
            }
      jc->value[c][d] = (int64_t)ipow(q, op.kernel_dim());
    }
  }

  std::lock_guard<std::mutex> lock(mu);
  auto [it, fresh] = cache.emplace(std::tuple{n, k, q}, jc);
  (void)fresh;
  return it->second;
}

/* ---- multiplicity spaces ----------------------------------------- */

MultSpaceChar multiplicity_space_character(const CharTable& big,
                                           const CharTable& small,
                                           uint32_t tau) {
  require_gl(*big.atlas, "multiplicity space");
  require_gl(*small.atlas, "multiplicity space");
  if (big.atlas->q != small.atlas->q)
    throw NotInDomain("multiplicity space: mismatched base fields");
  if (small.atlas->n > big.atlas->n)
    throw NotInDomain("multiplicity space: k exceeds n");
  if (tau >= small.K) throw NotInDomain("multiplicity space: no such irrep");

  auto jc = joint_character(big.atlas->n, small.atlas->n, big.atlas->q);
  MultSpaceChar m;
  m.tau = tau;
  m.row.assign(big.K, cplx{0, 0});
  for (uint32_t c = 0; c < big.K; ++c) {
    cplx acc{0, 0};
    for (uint32_t d = 0; d < small.K; ++d)
      acc += (long double)small.atlas->class_size[d] *
             (long double)jc->value[c][d] * std::conj(small.val[tau][d]);
    m.row[c] = acc / (long double)small.atlas->order;
  }

  m.mult.assign(big.K, 0);
  uint64_t dim_from_mult = 0;
  for (uint32_t r = 0; r < big.K; ++r) {
    int64_t v = guarded_round(big.inner(m.row, big.val[r]), 1e-6L,
                              "multiplicity space constituent");
    if (v < 0)
      throw ConsistencyFailure("multiplicity space has a negative constituent");
    m.mult[r] = v;
    dim_from_mult += (uint64_t)v * big.dims[r];
  }
  m.dim = (uint64_t)guarded_round(m.row[0], 1e-6L, "multiplicity space dimension");
  if (m.dim != dim_from_mult)
    throw ConsistencyFailure("multiplicity space dimension mismatch");
  return m;
}

/* ---- eta correspondence ------------------------------------------ */

namespace {

EtaReport compute_eta(const CharTable& big, const CharTable& small,
                      EtaMode mode) {
  require_gl(*big.atlas, "eta correspondence");
  require_gl(*small.atlas, "eta correspondence");
  int n = big.atlas->n, k = small.atlas->n, q = big.atlas->q;
  if (big.atlas->q != small.atlas->q)
    throw NotInDomain("eta correspondence: mismatched base fields");
  if (mode == EtaMode::u_rank && k > n / 2)
    throw NotInDomain("block mode needs k <= n/2");
  if (k > n) throw NotInDomain("eta correspondence: k exceeds n");

  std::vector<int> rank_of(big.K);
  if (mode == EtaMode::u_rank) {
    auto u = u_structure_of(big.desc());
    for (uint32_t r = 0; r < big.K; ++r)
      rank_of[r] = u_rank_profile(big, r, *u).u_rank;
  } else {
    for (uint32_t r = 0; r < big.K; ++r)
      rank_of[r] = tensor_rank(big, r, RankMode::strict);
  }

  EtaReport rep;
  rep.big = big.desc();
  rep.small = small.desc();
  rep.k = k;
  rep.mode = mode;

  std::vector<cplx> isotypic_sum(big.K, cplx{0, 0});
  long double scale = (long double)ipow((uint64_t)q, (unsigned)(k * (n - k)));
  for (uint32_t tau = 0; tau < small.K; ++tau) {
    auto m = multiplicity_space_character(big, small, tau);
    for (uint32_t c = 0; c < big.K; ++c)
      isotypic_sum[c] += (long double)small.dims[tau] * m.row[c];

    EtaRow row;
    row.tau = tau;
    row.tau_dim = small.dims[tau];
    for (uint32_t r = 0; r < big.K; ++r)
      if (m.mult[r] > 0) row.constituents.push_back({r, m.mult[r]});
    if (mode == EtaMode::strict)
      row.in_domain = tensor_rank(small, tau, RankMode::strict) >= 2 * k - n;

    if (row.in_domain) {
      int hits = 0;
      for (auto [r, mult] : row.constituents) {
        if (rank_of[r] > k && mode == EtaMode::u_rank)
          throw ConsistencyFailure("multiplicity space " + std::to_string(tau) +
                                   " of " + rep.big.name() +
                                   " has a constituent above rank " +
                                   std::to_string(k));
        if (rank_of[r] != k) continue;
        ++hits;
        if (mult != 1)
          throw ConsistencyFailure("rank-" + std::to_string(k) +
                                   " constituent of multiplicity space " +
                                   std::to_string(tau) + " is not simple");
        row.eta = r;
      }
      if (hits != 1)
        throw ConsistencyFailure("multiplicity space " + std::to_string(tau) +
                                 " of " + rep.big.name() + " has " +
                                 std::to_string(hits) + " rank-" +
                                 std::to_string(k) + " constituents");
      row.eta_dim = big.dims[row.eta];
      row.dim_ratio = (long double)row.eta_dim / ((long double)row.tau_dim * scale);
      row.window_ok = row.dim_ratio >= 1.0L - 5.0L / q &&
                      row.dim_ratio <= 1.0L + 5.0L / q;
    }
    rep.rows.push_back(std::move(row));
  }

  std::set<uint32_t> images;
  for (const auto& row : rep.rows)
    if (row.in_domain && !images.insert(row.eta).second)
      throw ConsistencyFailure("eta images collide at " + rep.big.name());

  auto omega = omega_power_row(*big.atlas, k);
  for (uint32_t c = 0; c < big.K; ++c) {
    long double expect = omega[c].real();
    if (std::abs(isotypic_sum[c] - omega[c]) > 1e-6L * std::max(1.0L, expect))
      throw ConsistencyFailure("isotypic characters do not sum to the matrix "
                               "permutation character at " + rep.big.name());
  }
  return rep;
}

}  // namespace

EtaReport eta_correspondence(const CharTable& big, const CharTable& small,
                             EtaMode mode) {
  static std::map<std::string, EtaReport> cache;
  static std::mutex mu;
  std::string key = big.desc().name() + "/" + small.desc().name() +
                    (mode == EtaMode::u_rank ? "/u" : "/s");
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  EtaReport rep = compute_eta(big, small, mode);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(rep)).first->second;
}

uint32_t eta_of(const CharTable& big, const CharTable& small, uint32_t tau,
                EtaMode mode) {
  auto rep = eta_correspondence(big, small, mode);
  if (tau >= rep.rows.size()) throw NotInDomain("eta: no such irrep");
  if (!rep.rows[tau].in_domain)
    throw NotInDomain("eta: strict rank of the source is below 2k - n");
  return rep.rows[tau].eta;
}

ExhaustionReport exhaustion_check(const CharTable& big,
                                  const CharTable& small) {
  int n = big.atlas->n, k = small.atlas->n;
  if (2 * k >= n)
    throw NotInDomain("exhaustion statement covers k < n/2 only");
  auto rep = eta_correspondence(big, small, EtaMode::u_rank);
  auto u = u_structure_of(big.desc());

  std::set<uint32_t> images;
  for (const auto& row : rep.rows) images.insert(row.eta);

  ExhaustionReport out;
  out.k = k;
  auto lins = linear_characters(big);
  for (uint32_t r = 0; r < big.K; ++r) {
    if (u_rank_profile(big, r, *u).u_rank != k) continue;
    out.rank_k.push_back(r);
    bool covered = false;
    for (uint32_t lin : lins)
      if (images.count(match_irrep(big, twist_row(big, r, lin)))) {
        covered = true;
        break;
      }
    if (!covered) out.missing.push_back(r);
  }
  out.complete = out.missing.empty();
  return out;
}

/* ---- flags ------------------------------------------------------- */

namespace {

struct SubList {
  std::vector<std::vector<uint16_t>> rows;
  std::vector<std::vector<int8_t>> pivots;
};

/* reduced row-echelon bases of every d-dimensional subspace */
SubList all_subspaces(const GroupAtlas& at, int d) {
  int n = at.n, q = at.q;
  std::vector<uint64_t> powq(n + 1, 1);
  for (int j = 0; j < n; ++j) powq[j + 1] = powq[j] * q;

  SubList out;
  std::vector<int> piv(d);
  std::iota(piv.begin(), piv.end(), 0);
  while (true) {
    std::vector<std::pair<int, int>> free_pos; /* (row, col) */
    for (int i = 0; i < d; ++i)
      for (int j = piv[i] + 1; j < n; ++j)
        if (std::find(piv.begin(), piv.end(), j) == piv.end())
          free_pos.push_back({i, j});
    uint64_t combos = ipow((uint64_t)q, (unsigned)free_pos.size());
    for (uint64_t t = 0; t < combos; ++t) {
      std::vector<uint16_t> rows(d, 0);
      for (int i = 0; i < d; ++i) rows[i] = (uint16_t)powq[piv[i]];
      uint64_t rest = t;
      for (auto [i, j] : free_pos) {
        rows[i] = (uint16_t)(rows[i] + (rest % q) * powq[j]);
        rest /= q;
      }
      out.rows.push_back(std::move(rows));
      out.pivots.push_back(std::vector<int8_t>(piv.begin(), piv.end()));
    }
    /* next pivot combination */
    int i = d - 1;
    while (i >= 0 && piv[i] == n - d + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < d; ++j) piv[j] = piv[j - 1] + 1;
  }
  return out;
}

/* reduce a vector code against rref rows; zero iff it lies in the span */
uint16_t reduce_code(const GroupAtlas& at, uint16_t v,
                     const uint16_t* rows, const int8_t* pivots, int count) {
  const auto& F = *at.F;
  uint32_t R = at.ops.R;
  for (int i = 0; i < count; ++i) {
    uint8_t c = at.ops.digit[(size_t)v * at.n + pivots[i]];
    if (c) v = at.ops.rowadd[(size_t)v * R + at.ops.rowscale[F.neg[c]][rows[i]]];
  }
  return v;
}

uint64_t parabolic_order(int q, const OrderedPartition& D) {
  uint64_t radical = 1, levi = 1;
  for (size_t i = 0; i < D.parts.size(); ++i) {
    levi *= group_order(GroupKind::GL, D.parts[i], q);
    for (size_t j = i + 1; j < D.parts.size(); ++j)
      radical *= ipow((uint64_t)q, (unsigned)(D.parts[i] * D.parts[j]));
  }
  return radical * levi;
}

}  // namespace

FlagSpace build_flag_space(const GroupAtlas& at, const OrderedPartition& D,
                           const Limits& lim) {
  require_gl(at, "flag space");
  if (D.sum() != at.n) throw NotInDomain("partition does not sum to n");
  uint64_t expected = at.order / parabolic_order(at.q, D);
  if (expected > lim.flag_cap)
    throw BudgetExceeded("flag space of size " + std::to_string(expected));

  FlagSpace fs;
  fs.D = D;
  int acc = 0;
  for (size_t i = 0; i + 1 < D.parts.size(); ++i) {
    acc += D.parts[i];
    fs.level_dims.push_back(acc);
  }
  fs.level_off.push_back(0);
  for (int s : fs.level_dims) fs.level_off.push_back(fs.level_off.back() + s);

  std::vector<SubList> lists;
  for (int s : fs.level_dims) lists.push_back(all_subspaces(at, s));

  std::vector<uint16_t> rows;
  std::vector<int8_t> pivots;
  std::function<void(size_t)> rec = [&](size_t level) {
    if (level == fs.level_dims.size()) {
      fs.rows.push_back(rows);
      fs.pivots.push_back(pivots);
      return;
    }
    const auto& list = lists[level];
    for (size_t w = 0; w < list.rows.size(); ++w) {
      if (level > 0) {
        /* the previous member must reduce to zero inside this one */
        bool inside = true;
        int prev = fs.level_dims[level - 1];
        const uint16_t* pr = rows.data() + fs.level_off[level - 1];
        for (int i = 0; i < prev && inside; ++i)
          inside = reduce_code(at, pr[i], list.rows[w].data(),
                               list.pivots[w].data(),
                               fs.level_dims[level]) == 0;
        if (!inside) continue;
      }
      rows.insert(rows.end(), list.rows[w].begin(), list.rows[w].end());
      pivots.insert(pivots.end(), list.pivots[w].begin(), list.pivots[w].end());
      rec(level + 1);
      rows.resize(rows.size() - list.rows[w].size());
      pivots.resize(pivots.size() - list.pivots[w].size());
    }
  };
  rec(0);

  if (fs.rows.size() != expected)
    throw ConsistencyFailure("flag count " + std::to_string(fs.rows.size()) +
                             " does not match the coset count " +
                             std::to_string(expected));
  return fs;
}

std::vector<cplx> flag_permutation_character(const GroupAtlas& at,
                                             const OrderedPartition& D,
                                             const Limits& lim) {
  FlagSpace fs = build_flag_space(at, D, lim);
  const auto& F = *at.F;
  int n = at.n;
  uint32_t R = at.ops.R;
  size_t levels = fs.level_dims.size();

  std::vector<cplx> row(at.K, cplx{0, 0});
  run_chunks((int64_t)at.K, 1, [&](int, int64_t lo, int64_t hi) {
    std::vector<uint16_t> img(R);
    for (int64_t c = lo; c < hi; ++c) {
      MatFq g = at.mat_of(at.class_rep[c]);
      for (uint32_t v = 0; v < R; ++v) {
        uint64_t y = 0, scale = 1;
        for (int i = 0; i < n; ++i) {
          uint8_t e = 0;
          for (int a = 0; a < n; ++a)
            e = F.add[e][F.mul[g.at(i, a)][at.ops.digit[(size_t)v * n + a]]];
          y += e * scale;
          scale *= at.q;
        }
        img[v] = (uint16_t)y;
      }
      uint64_t fixed = 0;
      for (size_t f = 0; f < fs.rows.size(); ++f) {
        const uint16_t* rows = fs.rows[f].data();
        const int8_t* pivots = fs.pivots[f].data();
        bool ok = true;
        for (size_t t = 0; t < levels && ok; ++t) {
          const uint16_t* lr = rows + fs.level_off[t];
          const int8_t* lp = pivots + fs.level_off[t];
          int dim = fs.level_dims[t];
          for (int i = 0; i < dim && ok; ++i)
            ok = reduce_code(at, img[lr[i]], lr, lp, dim) == 0;
        }
        if (ok) ++fixed;
      }
      row[c] = (long double)fixed;
    }
  });
  return row;
}

/* ---- sps constituents -------------------------------------------- */

namespace {

const std::vector<cplx>& flag_row_cached(const CharTable& tab,
                                         const OrderedPartition& D) {
  static std::map<std::string, std::vector<cplx>> cache;
  static std::mutex mu;
  std::string key = tab.desc().name() + D.text();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto row = flag_permutation_character(*tab.atlas, D);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(row)).first->second;
}

std::vector<int64_t> flag_mults(const CharTable& tab,
                                const OrderedPartition& D) {
  const auto& row = flag_row_cached(tab, D);
  std::vector<int64_t> m(tab.K);
  for (uint32_t r = 0; r < tab.K; ++r) {
    m[r] = guarded_round(tab.inner(row, tab.val[r]), 1e-6L,
                         "flag character constituent");
    if (m[r] < 0)
      throw ConsistencyFailure("flag character has a negative constituent");
  }
  return m;
}

}  // namespace

uint32_t sps_constituent(const CharTable& tab, const OrderedPartition& D) {
  require_gl(*tab.atlas, "series constituent");
  static std::map<std::string, uint32_t> cache;
  static std::mutex mu;
  std::string key = tab.desc().name() + D.text();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  int n = tab.atlas->n, q = tab.atlas->q;
  if (D.sum() != n) throw NotInDomain("partition does not sum to n");
  auto base = flag_mults(tab, D);
  std::vector<std::vector<int64_t>> above;
  for (const auto& DP : partitions_of(n))
    if (!(DP == D) && dominance(D, DP)) above.push_back(flag_mults(tab, DP));

  std::vector<uint32_t> found;
  for (uint32_t r = 0; r < tab.K; ++r) {
    if (base[r] != 1) continue;
    bool fresh = true;
    for (const auto& m : above) fresh = fresh && m[r] == 0;
    if (fresh) found.push_back(r);
  }
  if (found.size() != 1)
    throw ConsistencyFailure("flag character of " + D.text() + " has " +
                             std::to_string(found.size()) +
                             " distinguished constituents");

  /* the dimension must track the coset-space degree q^(sum_{i<j} d_i d_j) */
  unsigned deg = 0;
  for (size_t i = 0; i < D.parts.size(); ++i)
    for (size_t j = i + 1; j < D.parts.size(); ++j)
      deg += (unsigned)(D.parts[i] * D.parts[j]);
  long double lead = (long double)ipow((uint64_t)q, deg);
  long double dim = (long double)tab.dims[found[0]];
  if (dim < lead / 4 || dim > lead * 4)
    throw ConsistencyFailure("series constituent of " + D.text() +
                             " has dimension " + std::to_string((double)dim) +
                             " far from " + std::to_string((double)lead));

  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, found[0]).first->second;
}

std::vector<cplx> split_series_character(const CharTable& tab,
                                         const OrderedPartition& S,
                                         const std::vector<OrderedPartition>& block_types,
                                         const std::vector<int>& chi_exponents,
                                         const Limits& lim) {
  const auto& at = *tab.atlas;
  require_gl(at, "split series");
  int n = at.n, q = at.q;
  if (S.sum() != n) throw NotInDomain("shape does not sum to n");
  size_t blocks = S.parts.size();
  if (block_types.size() != blocks || chi_exponents.size() != blocks)
    throw NotInDomain("split series needs one partition and one character per block");
  std::set<int> seen;
  for (int e : chi_exponents)
    if (!seen.insert(((e % (q - 1)) + (q - 1)) % (q - 1)).second)
      throw NotInDomain("split series characters must be pairwise distinct");
  if (at.order > lim.induction_cap)
    throw BudgetExceeded("generic induction over " + std::to_string(at.order) +
                         " elements");

  struct Block {
    int start, size;
    std::shared_ptr<const CharTable> tab;
    uint32_t rho;
  };
  std::vector<Block> bl(blocks);
  int start = 0;
  for (size_t j = 0; j < blocks; ++j) {
    if (block_types[j].sum() != S.parts[j])
      throw NotInDomain("block partition does not sum to the block size");
    bl[j].start = start;
    bl[j].size = S.parts[j];
    bl[j].tab = table_of(GroupKind::GL, S.parts[j], q);
    bl[j].rho = sps_constituent(*bl[j].tab, block_types[j]);
    start += S.parts[j];
  }

  const auto& F = *at.F;
  std::vector<uint32_t> sub;
  for (uint32_t code : at.elements) {
    MatFq g = at.mat_of(code);
    bool member = true;
    for (int r = 0; r < n && member; ++r)
      for (int c = 0; c < n && member; ++c) {
        size_t br = 0, bc = 0;
        while (r >= bl[br].start + bl[br].size) ++br;
        while (c >= bl[bc].start + bl[bc].size) ++bc;
        if (br > bc) member = g.at(r, c) == 0;
      }
    if (member) sub.push_back(code);
  }

  auto chi_h = [&](uint64_t code) -> cplx {
    MatFq g = at.mat_of(code);
    cplx v{1, 0};
    for (const auto& b : bl) {
      MatFq block(F, b.size, b.size);
      for (int i = 0; i < b.size; ++i)
        for (int j = 0; j < b.size; ++j)
          block.at(i, j) = g.at(b.start + i, b.start + j);
      uint32_t cls = b.tab->atlas->class_of(block.code());
      size_t idx = (size_t)(&b - bl.data());
      v *= b.tab->val[b.rho][cls] *
           unit_root(q - 1, (int64_t)chi_exponents[idx] * F.dlog[block.det()]);
    }
    return v;
  };

  auto row = induced_character(at, sub, chi_h, lim);
  int64_t norm = guarded_round(tab.inner(row, row), 1e-6L,
                               "split series self inner product");
  if (norm != 1)
    throw ConsistencyFailure("split series character is not irreducible "
                             "(self inner product " + std::to_string(norm) + ")");
  return row;
}

std::vector<CorankRow> corank_fact_check(const CharTable& tab) {
  require_gl(*tab.atlas, "corank check");
  int n = tab.atlas->n;
  std::vector<CorankRow> out;
  for (const auto& D : partitions_of(n)) {
    CorankRow row;
    row.D = D;
    row.rho = sps_constituent(tab, D);
    row.dim = tab.dims[row.rho];
    row.plain = tensor_rank(tab, row.rho, RankMode::plain);
    row.strict_r = tensor_rank(tab, row.rho, RankMode::strict);
    row.expected = n - D.parts[0];
    row.ok = row.plain == row.expected && row.strict_r == row.expected;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace rankscope
