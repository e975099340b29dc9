#include "rankscope/ranks.hh"

#include <algorithm>
#include <map>
#include <mutex>

namespace rankscope {

namespace {

constexpr uint64_t kStructureCap = 10'000'000;
constexpr uint64_t kTransformCap = 4096;

/* side generators: elementary shears, plus a primitive scaling in the
   top-left corner when wanted */
std::vector<MatFq> side_shears(const FieldTable& F, int s) {
  std::vector<MatFq> out;
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) {
      if (a == b) continue;
      MatFq t = MatFq::identity(F, s);
      t.at(a, b) = 1;
      out.push_back(t);
    }
  return out;
}

MatFq corner_scale(const FieldTable& F, int s) {
  MatFq d = MatFq::identity(F, s);
  d.at(0, 0) = F.primitive;
  return d;
}

std::vector<cplx> solve_dense(std::vector<std::vector<cplx>> A,
                              std::vector<cplx> b) {
  size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t i = col + 1; i < n; ++i)
      if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
    if (std::abs(A[piv][col]) < 1e-9L)
      throw ConsistencyFailure("block transform system is singular");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (size_t i = col + 1; i < n; ++i) {
      cplx f = A[i][col] / A[col][col];
      for (size_t j = col; j < n; ++j) A[i][j] -= f * A[col][j];
      b[i] -= f * b[col];
    }
  }
  std::vector<cplx> x(n);
  for (size_t i = n; i-- > 0;) {
    cplx acc = b[i];
    for (size_t j = i + 1; j < n; ++j) acc -= A[i][j] * x[j];
    x[i] = acc / A[i][i];
  }
  return x;
}

}  // namespace

uint64_t USplitStructure::rank_count(int r) const {
  uint64_t total = 0;
  for (uint32_t s = 0; s < S; ++s)
    if (orbit_rank[s] == r) total += orbit_size[s];
  return total;
}

uint64_t USplitStructure::embed(uint64_t block_code) const {
  const FieldTable& F = *atlas->F;
  MatFq x = MatFq::from_code(F, rows, cols, block_code);
  MatFq full = MatFq::identity(F, atlas->n);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) full.at(i, rows + j) = x.at(i, j);
  return full.code();
}

std::shared_ptr<const USplitStructure> build_u_structure(
    std::shared_ptr<const GroupAtlas> atlas, int rows, const Limits& lim) {
  (void)lim;
  int n = atlas->n;
  if (n < 2) throw NotInDomain("need n >= 2 for a block subgroup");
  if (rows < 0) rows = n / 2;
  if (rows < 1 || rows >= n) throw NotInDomain("block rows outside 1..n-1");
  auto u = std::make_shared<USplitStructure>();
  u->atlas = atlas;
  u->rows = rows;
  u->cols = n - rows;
  u->mrank = std::min(u->rows, u->cols);
  const FieldTable& F = *atlas->F;
  int q = F.q;
  int cells = u->rows * u->cols;
  uint64_t space = 1;
  for (int i = 0; i < cells; ++i) {
    space *= (uint64_t)q;
    if (space > kStructureCap)
      throw BudgetExceeded("block space too large");
  }
  u->space = space;
  if (space > kTransformCap)
    throw BudgetExceeded("block transform table too large");

  u->rank_of.resize(space);
  std::vector<MatFq> mats;
  mats.reserve(space);
  for (uint64_t c = 0; c < space; ++c) {
    mats.push_back(MatFq::from_code(F, u->rows, u->cols, c));
    u->rank_of[c] = (uint8_t)mats.back().rank();
  }

  /* generators of the block symmetry action X -> A X D */
  std::vector<std::pair<MatFq, MatFq>> gens;
  MatFq il = MatFq::identity(F, u->rows), ir = MatFq::identity(F, u->cols);
  for (const auto& t : side_shears(F, u->rows)) gens.emplace_back(t, ir);
  for (const auto& t : side_shears(F, u->cols)) gens.emplace_back(il, t);
  if (atlas->kind == GroupKind::GL) {
    gens.emplace_back(corner_scale(F, u->rows), ir);
    gens.emplace_back(il, corner_scale(F, u->cols));
  } else {
    gens.emplace_back(corner_scale(F, u->rows), corner_scale(F, u->cols));
  }

  u->orbit_of.assign(space, 0xFFFF);
  std::vector<std::vector<uint64_t>> orbits;
  std::vector<uint64_t> stack;
  for (uint64_t seed = 0; seed < space; ++seed) {
    if (u->orbit_of[seed] != 0xFFFF) continue;
    uint16_t id = (uint16_t)orbits.size();
    orbits.emplace_back();
    u->orbit_of[seed] = id;
    stack.assign(1, seed);
    while (!stack.empty()) {
      uint64_t c = stack.back();
      stack.pop_back();
      orbits[id].push_back(c);
      for (const auto& [a, d] : gens) {
        uint64_t nc = (a * mats[c] * d).code();
        if (u->orbit_of[nc] == 0xFFFF) {
          u->orbit_of[nc] = id;
          stack.push_back(nc);
        }
      }
    }
  }

  /* canonical orbit order: by rank, then least member */
  u->S = (uint32_t)orbits.size();
  std::vector<uint32_t> order(u->S);
  std::vector<uint64_t> least(u->S);
  for (uint32_t s = 0; s < u->S; ++s)
    least[s] = *std::min_element(orbits[s].begin(), orbits[s].end());
  for (uint32_t s = 0; s < u->S; ++s) order[s] = s;
  std::sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
    int rx = u->rank_of[least[x]], ry = u->rank_of[least[y]];
    if (rx != ry) return rx < ry;
    return least[x] < least[y];
  });
  std::vector<uint16_t> newid(u->S);
  for (uint32_t s = 0; s < u->S; ++s) newid[order[s]] = (uint16_t)s;
  for (uint64_t c = 0; c < space; ++c) u->orbit_of[c] = newid[u->orbit_of[c]];

  u->orbit_size.assign(u->S, 0);
  u->orbit_rank.assign(u->S, -1);
  u->orbit_rep.assign(u->S, ~0ull);
  for (uint64_t c = 0; c < space; ++c) {
    uint16_t s = u->orbit_of[c];
    ++u->orbit_size[s];
    u->orbit_rep[s] = std::min(u->orbit_rep[s], c);
    if (u->orbit_rank[s] < 0) u->orbit_rank[s] = u->rank_of[c];
    else if (u->orbit_rank[s] != u->rank_of[c])
      throw ConsistencyFailure("orbit mixes ranks");
  }
  uint64_t covered = 0;
  for (uint32_t s = 0; s < u->S; ++s) covered += u->orbit_size[s];
  if (covered != space) throw ConsistencyFailure("orbits do not tile the block space");
  if (atlas->kind == GroupKind::GL && u->S != (uint32_t)u->mrank + 1)
    throw ConsistencyFailure("full symmetry action must give one orbit per rank");

  /* surrounding-group class of I + X, constant on orbits */
  u->class_of_code.resize(space);
  for (uint64_t c = 0; c < space; ++c)
    u->class_of_code[c] = atlas->class_of(u->embed(c));
  u->orbit_class.assign(u->S, 0);
  for (uint32_t s = 0; s < u->S; ++s)
    u->orbit_class[s] = u->class_of_code[u->orbit_rep[s]];
  for (uint64_t c = 0; c < space; ++c)
    if (u->class_of_code[c] != u->orbit_class[u->orbit_of[c]])
      throw ConsistencyFailure("orbit mixes surrounding classes");

  /* transform of every orbit indicator at every block element */
  u->ft_full.assign(u->S, std::vector<cplx>(space, cplx(0, 0)));
  for (uint64_t b = 0; b < space; ++b) {
    uint16_t s = u->orbit_of[b];
    const MatFq& mb = mats[b];
    for (uint64_t x = 0; x < space; ++x) {
      uint8_t pair = 0;
      const MatFq& mx = mats[x];
      for (int i = 0; i < cells; ++i)
        pair = F.add[pair][F.mul[mb.a[(size_t)i]][mx.a[(size_t)i]]];
      u->ft_full[s][x] += F.psi[pair];
    }
  }
  return u;
}

std::shared_ptr<const USplitStructure> build_u_structure(int n, int q) {
  return build_u_structure(atlas_of(GroupKind::GL, n, q));
}

std::shared_ptr<const USplitStructure> u_structure_of(const GroupDesc& g,
                                                      int rows) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>,
                  std::shared_ptr<const USplitStructure>> cache;
  auto at = atlas_of(g);
  int r = rows < 0 ? at->n / 2 : rows;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple((int)at->kind, at->n, at->q, r);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto u = build_u_structure(at, r);
  cache[key] = u;
  return u;
}

std::vector<std::vector<int64_t>> orbit_ft_matrix(const USplitStructure& u) {
  if (u.S != (uint32_t)u.mrank + 1)
    throw NotInDomain("integer transform table needs unsplit rank strata");
  std::vector<std::vector<int64_t>> F(u.S, std::vector<int64_t>(u.S, 0));
  for (uint32_t r = 0; r < u.S; ++r)
    for (uint32_t s = 0; s < u.S; ++s)
      F[r][s] = guarded_round(u.ft(r, s), 1e-6L, "stratum transform entry");
  return F;
}

UProfile u_rank_profile(const CharTable& tab, uint32_t rid,
                        const USplitStructure& u) {
  if (tab.atlas.get() != u.atlas.get())
    throw NotInDomain("table and block structure belong to different groups");
  std::vector<std::vector<cplx>> A(u.S, std::vector<cplx>(u.S));
  std::vector<cplx> b(u.S);
  for (uint32_t r = 0; r < u.S; ++r) {
    for (uint32_t s = 0; s < u.S; ++s) A[r][s] = u.ft(r, s);
    b[r] = tab.val[rid][u.orbit_class[r]];
  }
  auto sol = solve_dense(std::move(A), std::move(b));
  UProfile out;
  out.mult.resize(u.S);
  for (uint32_t s = 0; s < u.S; ++s) {
    int64_t m = guarded_round(sol[s], 1e-6L, "block character multiplicity");
    if (m < 0)
      throw NumericalGuard("negative block character multiplicity");
    out.mult[s] = m;
  }
  /* full reconstruction across the block space */
  for (uint64_t c = 0; c < u.space; ++c) {
    cplx acc(0, 0);
    for (uint32_t s = 0; s < u.S; ++s)
      acc += (long double)out.mult[s] * u.ft_full[s][c];
    if (std::abs(acc - tab.val[rid][u.class_of_code[c]]) > 1e-6L)
      throw ConsistencyFailure("block restriction does not reconstruct the character");
  }
  int64_t dim = 0;
  for (uint32_t s = 0; s < u.S; ++s)
    dim += out.mult[s] * (int64_t)u.orbit_size[s];
  if (dim != (int64_t)tab.dims[rid])
    throw ConsistencyFailure("block multiplicities do not sum to the degree");
  out.u_rank = 0;
  for (uint32_t s = 0; s < u.S; ++s)
    if (out.mult[s] > 0) out.u_rank = std::max(out.u_rank, u.orbit_rank[s]);
  return out;
}

namespace {

int first_power_containing(const CharTable& tab, const std::vector<cplx>& row) {
  const GroupAtlas& at = *tab.atlas;
  for (int l = 0; l <= at.n; ++l) {
    auto omega = omega_power_row(at, l);
    int64_t mult = guarded_round(tab.inner(omega, row), 1e-6L,
                                 "tensor power multiplicity");
    if (mult < 0) throw ConsistencyFailure("negative tensor power multiplicity");
    if (mult >= 1) return l;
  }
  throw ConsistencyFailure("irrep missing from the n-th tensor power");
}

}  // namespace

int tensor_rank(const CharTable& tab, uint32_t rid, RankMode mode) {
  switch (mode) {
    case RankMode::strict:
      return first_power_containing(tab, tab.val[rid]);
    case RankMode::sl:
      if (tab.atlas->kind != GroupKind::SL && tab.atlas->q != 2)
        throw NotInDomain("restriction reading needs a determinant-one group");
      return first_power_containing(tab, tab.val[rid]);
    case RankMode::plain: {
      int best = tab.atlas->n + 1;
      for (uint32_t lin : linear_characters(tab))
        best = std::min(best,
                        first_power_containing(tab, twist_row(tab, rid, lin)));
      return best;
    }
  }
  throw NotInDomain("unknown rank mode");
}

std::vector<std::vector<uint32_t>> filtration_chain(const CharTable& tab) {
  if (tab.atlas->kind != GroupKind::GL)
    throw NotInDomain("the power filtration is computed on GL tables");
  int n = tab.atlas->n;
  std::vector<int> strict(tab.K);
  for (uint32_t r = 0; r < tab.K; ++r)
    strict[r] = tensor_rank(tab, r, RankMode::strict);
  std::vector<std::vector<uint32_t>> sets((size_t)n + 1);
  for (int k = 0; k <= n; ++k)
    for (uint32_t r = 0; r < tab.K; ++r)
      if (strict[r] <= k) sets[(size_t)k].push_back(r);
  if (sets[0] != std::vector<uint32_t>{tab.trivial_id})
    throw ConsistencyFailure("zeroth power must contain exactly the trivial irrep");
  for (int k = 1; k <= n; ++k)
    if (sets[(size_t)k].size() <= sets[(size_t)k - 1].size())
      throw ConsistencyFailure("power filtration failed to grow strictly");
  if (sets[(size_t)n].size() != tab.K)
    throw ConsistencyFailure("power filtration did not reach the full dual");
  return sets;
}

std::vector<AgreementRow> agreement_check(const CharTable& tab,
                                          const USplitStructure& u) {
  if (tab.atlas->kind != GroupKind::GL)
    throw NotInDomain("the agreement report is computed on GL tables");
  if (tab.atlas.get() != u.atlas.get() || u.rows != u.atlas->n / 2)
    throw NotInDomain("need the standard block structure of the same group");
  std::vector<int> trank(tab.K), urank(tab.K);
  for (uint32_t r = 0; r < tab.K; ++r) {
    trank[r] = tensor_rank(tab, r, RankMode::plain);
    urank[r] = u_rank_profile(tab, r, u).u_rank;
  }
  std::vector<AgreementRow> rows;
  for (int k = 0; k < u.mrank; ++k) {
    AgreementRow row;
    row.k = k;
    for (uint32_t r = 0; r < tab.K; ++r) {
      if (trank[r] == k) row.tensor_set.push_back(r);
      if (urank[r] == k) row.u_set.push_back(r);
    }
    for (uint32_t r : row.tensor_set)
      if (!std::binary_search(row.u_set.begin(), row.u_set.end(), r))
        row.only_tensor.push_back(r);
    for (uint32_t r : row.u_set)
      if (!std::binary_search(row.tensor_set.begin(), row.tensor_set.end(), r))
        row.only_u.push_back(r);
    if (!row.only_tensor.empty())
      throw ConsistencyFailure("tensor rank class escapes the block rank class");
    row.equal = row.only_u.empty();
    rows.push_back(std::move(row));
  }
  return rows;
}

IndependenceReport rank_independence_check(const CharTable& tab, uint32_t rid) {
  const GroupDesc desc = tab.desc();
  int n = tab.atlas->n;
  IndependenceReport rep;
  rep.irrep = rid;
  auto base = u_rank_profile(tab, rid, *u_structure_of(desc));
  rep.base_rank = base.u_rank;
  if (rep.base_rank >= n / 2)
    throw NotInDomain("rank recomputation applies below the top block rank");
  rep.all_equal = true;
  for (int j = 1; j < n; ++j) {
    int rank_j = u_rank_profile(tab, rid, *u_structure_of(desc, j)).u_rank;
    rep.per_split.emplace_back(j, rank_j);
    if (std::min(j, n - j) > rep.base_rank && rank_j != rep.base_rank)
      rep.all_equal = false;
  }
  return rep;
}

std::vector<RankProfile> profile_all(const CharTable& tab,
                                     const USplitStructure& u) {
  std::vector<RankProfile> out;
  int tc = tab.atlas->transvection_class;
  for (uint32_t r = 0; r < tab.K; ++r) {
    RankProfile p;
    p.irrep = r;
    p.dim = tab.dims[r];
    if (tc >= 0) {
      p.cr_raw = tab.val[r][(uint32_t)tc];
      long double re = p.cr_raw.real();
      if (std::fabs(p.cr_raw.imag()) <= 1e-6L &&
          std::fabs(re - std::round(re)) <= 1e-6L) {
        p.cr_rational = true;
        p.cr = char_ratio_at_transvection(tab, r);
      }
    }
    auto prof = u_rank_profile(tab, r, u);
    p.mult = std::move(prof.mult);
    p.u_rank = prof.u_rank;
    if (tab.atlas->kind == GroupKind::GL) {
      p.strict_rank = tensor_rank(tab, r, RankMode::strict);
      p.tensor_rank = tensor_rank(tab, r, RankMode::plain);
    } else {
      p.strict_rank = tensor_rank(tab, r, RankMode::sl);
      p.tensor_rank = p.strict_rank;
    }
    p.twist_orbit = r;
    for (uint32_t lin : linear_characters(tab)) {
      uint32_t other = match_irrep(tab, twist_row(tab, r, lin));
      p.twist_orbit = std::min(p.twist_orbit, other);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rankscope
