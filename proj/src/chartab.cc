#include "rankscope/chartab.hh"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>

namespace rankscope {

namespace {

/* ---- arithmetic mod a word sized prime ---- */

uint64_t mulm(uint64_t a, uint64_t b, uint64_t p) {
  return (uint64_t)((__uint128_t)a * b % p);
}

uint64_t powm(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulm(r, a, p);
    a = mulm(a, a, p);
    e >>= 1;
  }
  return r;
}

uint64_t invm(uint64_t a, uint64_t p) { return powm(a % p, p - 2, p); }

uint64_t subm(uint64_t a, uint64_t b, uint64_t p) { return (a + p - b % p) % p; }

bool is_prime(uint64_t x) {
  if (x < 2) return false;
  for (uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

/* least prime p = 1 mod e with p^2 > 4|G| and p not dividing |G| */
uint64_t find_modulus(uint64_t e, uint64_t order) {
  uint64_t lo = (uint64_t)(2.0L * std::sqrt((long double)order));
  uint64_t p = 1;
  while (p <= lo || !is_prime(p) || order % p == 0) p += e;
  return p;
}

std::vector<uint64_t> prime_factors(uint64_t x) {
  std::vector<uint64_t> fs;
  for (uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) {
      fs.push_back(d);
      while (x % d == 0) x /= d;
    }
  if (x > 1) fs.push_back(x);
  return fs;
}

uint64_t primitive_root(uint64_t p) {
  auto fs = prime_factors(p - 1);
  for (uint64_t g = 2;; ++g) {
    bool ok = true;
    for (uint64_t f : fs)
      if (powm(g, (p - 1) / f, p) == 1) { ok = false; break; }
    if (ok) return g;
  }
}

/* tonelli-shanks square root mod p */
uint64_t sqrtm(uint64_t a, uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  if (powm(a, (p - 1) / 2, p) != 1)
    throw NotSquare("no square root mod p");
  if (p % 4 == 3) return powm(a, (p + 1) / 4, p);
  uint64_t q = p - 1, s = 0;
  while (q % 2 == 0) { q /= 2; ++s; }
  uint64_t z = 2;
  while (powm(z, (p - 1) / 2, p) != p - 1) ++z;
  uint64_t m = s, c = powm(z, q, p), t = powm(a, q, p),
           r = powm(a, (q + 1) / 2, p);
  while (t != 1) {
    uint64_t i = 0, tt = t;
    while (tt != 1) { tt = mulm(tt, tt, p); ++i; }
    uint64_t b = powm(c, uint64_t(1) << (m - i - 1), p);
    m = i;
    c = mulm(b, b, p);
    t = mulm(t, c, p);
    r = mulm(r, b, p);
  }
  return r;
}

/* ---- polynomials mod p (dense, trimmed) ---- */

using PV = std::vector<uint64_t>;

void ptrim(PV& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

int pdeg(const PV& f) { return (int)f.size() - 1; }

PV pmul(const PV& a, const PV& b, uint64_t p) {
  if (a.empty() || b.empty()) return {};
  PV r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + (__uint128_t)a[i] * b[j]) % p;
  }
  ptrim(r);
  return r;
}

PV psub(PV a, const PV& b, uint64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = subm(a[i], b[i], p);
  ptrim(a);
  return a;
}

/* remainder of a by monic-normalized b */
PV prem(PV a, const PV& b, uint64_t p) {
  uint64_t li = invm(b.back(), p);
  while (pdeg(a) >= pdeg(b)) {
    uint64_t f = mulm(a.back(), li, p);
    int shift = pdeg(a) - pdeg(b);
    for (size_t i = 0; i < b.size(); ++i)
      a[shift + i] = subm(a[shift + i], mulm(f, b[i], p), p);
    ptrim(a);
    if (a.empty()) break;
  }
  return a;
}

PV pquot(PV a, const PV& b, uint64_t p) {
  PV q(std::max<int>(pdeg(a) - pdeg(b) + 1, 0), 0);
  uint64_t li = invm(b.back(), p);
  while (pdeg(a) >= pdeg(b)) {
    uint64_t f = mulm(a.back(), li, p);
    int shift = pdeg(a) - pdeg(b);
    q[shift] = f;
    for (size_t i = 0; i < b.size(); ++i)
      a[shift + i] = subm(a[shift + i], mulm(f, b[i], p), p);
    ptrim(a);
    if (a.empty()) break;
  }
  ptrim(q);
  return q;
}

PV pmonic(PV f, uint64_t p) {
  if (f.empty()) return f;
  uint64_t li = invm(f.back(), p);
  for (auto& c : f) c = mulm(c, li, p);
  return f;
}

PV pgcd(PV a, PV b, uint64_t p) {
  while (!b.empty()) {
    PV r = prem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return pmonic(a, p);
}

PV pderiv(const PV& f, uint64_t p) {
  PV r;
  for (size_t i = 1; i < f.size(); ++i)
    r.push_back(mulm(f[i], i % p, p));
  ptrim(r);
  return r;
}

/* base^e mod f, all mod p */
PV ppowmod(PV base, uint64_t e, const PV& f, uint64_t p) {
  PV r{1};
  base = prem(std::move(base), f, p);
  while (e) {
    if (e & 1) r = prem(pmul(r, base, p), f, p);
    base = prem(pmul(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

/* ---- small dense matrices mod p ---- */

using Mtx = std::vector<std::vector<uint64_t>>;

/* characteristic polynomial via hessenberg reduction */
PV charpoly_mod(Mtx h, uint64_t p) {
  int n = (int)h.size();
  for (int c = 0; c + 2 < n; ++c) {
    int piv = -1;
    for (int r = c + 1; r < n; ++r)
      if (h[r][c]) { piv = r; break; }
    if (piv < 0) continue;
    if (piv != c + 1) {
      std::swap(h[piv], h[c + 1]);
      for (int r = 0; r < n; ++r) std::swap(h[r][piv], h[r][c + 1]);
    }
    uint64_t di = invm(h[c + 1][c], p);
    for (int r = c + 2; r < n; ++r) {
      if (!h[r][c]) continue;
      uint64_t f = mulm(h[r][c], di, p);
      for (int j = 0; j < n; ++j) h[r][j] = subm(h[r][j], mulm(f, h[c + 1][j], p), p);
      for (int j = 0; j < n; ++j) h[j][c + 1] = (h[j][c + 1] + mulm(f, h[j][r], p)) % p;
    }
  }
  std::vector<PV> pc(n + 1);
  pc[0] = {1};
  for (int m = 1; m <= n; ++m) {
    PV t = pmul(pc[m - 1], PV{subm(0, h[m - 1][m - 1], p), 1}, p);
    uint64_t prod = 1;
    for (int i = 1; i < m; ++i) {
      prod = mulm(prod, h[m - i][m - i - 1], p);
      if (!prod) break;
      uint64_t coef = mulm(h[m - 1 - i][m - 1], prod, p);
      if (coef) {
        PV s = pc[m - 1 - i];
        for (auto& v : s) v = mulm(v, coef, p);
        t = psub(std::move(t), s, p);
      }
    }
    pc[m] = std::move(t);
  }
  return pc[n];
}

/* kernel basis of a square matrix mod p */
std::vector<std::vector<uint64_t>> kernel_mod(Mtx m, uint64_t p) {
  int n = (int)m.size();
  std::vector<int> pivot_of_col(n, -1);
  int r = 0;
  for (int c = 0; c < n && r < n; ++c) {
    int piv = -1;
    for (int i = r; i < n; ++i)
      if (m[i][c]) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(m[piv], m[r]);
    uint64_t s = invm(m[r][c], p);
    for (int j = 0; j < n; ++j) m[r][j] = mulm(m[r][j], s, p);
    for (int i = 0; i < n; ++i) {
      if (i == r || !m[i][c]) continue;
      uint64_t f = m[i][c];
      for (int j = 0; j < n; ++j) m[i][j] = subm(m[i][j], mulm(f, m[r][j], p), p);
    }
    pivot_of_col[c] = r++;
  }
  std::vector<std::vector<uint64_t>> basis;
  for (int c = 0; c < n; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    std::vector<uint64_t> v(n, 0);
    v[c] = 1;
    for (int c2 = 0; c2 < n; ++c2)
      if (pivot_of_col[c2] >= 0) v[c2] = subm(0, m[pivot_of_col[c2]][c], p);
    basis.push_back(std::move(v));
  }
  return basis;
}

/* roots of a squarefree totally split polynomial, ascending */
std::vector<uint64_t> split_roots(const PV& f, uint64_t p, std::mt19937_64& rng) {
  std::vector<uint64_t> roots;
  std::vector<PV> work{pmonic(f, p)};
  while (!work.empty()) {
    PV g = std::move(work.back());
    work.pop_back();
    if (pdeg(g) <= 0) continue;
    if (pdeg(g) == 1) {
      roots.push_back(subm(0, g[0], p));
      continue;
    }
    for (;;) {
      uint64_t a = rng() % p;
      /* gcd with (x+a)^((p-1)/2) - 1 cuts the root set in half */
      PV base{a, 1};
      PV h = ppowmod(base, (p - 1) / 2, g, p);
      if (h.empty())
        h = PV{subm(0, 1, p)};
      else
        h[0] = subm(h[0], 1, p);
      ptrim(h);
      PV d = pgcd(h, g, p);
      if (pdeg(d) > 0 && pdeg(d) < pdeg(g)) {
        work.push_back(pquot(g, d, p));
        work.push_back(std::move(d));
        break;
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/* ---- the splitting stage ---- */

using Col = std::vector<uint64_t>;

/* class product counts a_{ijk} for a fixed i, as a K x K matrix mod p.
   iterating y over the inverse class avoids inverting every member:
   #{x in C_i : x^-1 z_k in C_j} = #{y in C_inv(i) : y z_k in C_j}. */
Mtx class_matrix(const GroupAtlas& at, uint32_t ci, uint64_t p) {
  uint32_t K = at.K;
  uint32_t src = at.inverse_class[ci];
  std::vector<PackedRows> reps(K);
  for (uint32_t k = 0; k < K; ++k) at.ops.decode(at.class_rep[k], reps[k]);
  uint64_t lo = at.class_offset[src], hi = at.class_offset[src + 1];
  int64_t total = (int64_t)(hi - lo);
  int64_t grain = 8192;
  int chunks = (int)((total + grain - 1) / grain);
  std::vector<std::vector<uint32_t>> part((size_t)std::max(chunks, 1));
  run_chunks(total, grain, [&](int chunk, int64_t a, int64_t b) {
    std::vector<uint32_t>& cnt = part[chunk];
    cnt.assign((size_t)K * K, 0);
    PackedRows y, w;
    for (int64_t t = a; t < b; ++t) {
      at.ops.decode(at.by_class[lo + t], y);
      for (uint32_t k = 0; k < K; ++k) {
        at.ops.mul(y, reps[k], w);
        uint16_t j = at.class_map[at.ops.encode(w)];
        ++cnt[(size_t)j * K + k];
      }
    }
  });
  Mtx b(K, std::vector<uint64_t>(K, 0));
  for (const auto& cnt : part) {
    if (cnt.empty()) continue;
    for (uint32_t j = 0; j < K; ++j)
      for (uint32_t k = 0; k < K; ++k) b[j][k] += cnt[(size_t)j * K + k];
  }
  for (uint32_t j = 0; j < K; ++j)
    for (uint32_t k = 0; k < K; ++k) b[j][k] %= p;
  return b;
}

/* X with V X = BV for a full column rank V, via row reduction */
Mtx restrict_block(const std::vector<Col>& V, const std::vector<Col>& BV,
                   uint64_t p) {
  size_t K = V[0].size(), d = V.size();
  std::vector<std::vector<uint64_t>> m(K, std::vector<uint64_t>(2 * d, 0));
  for (size_t j = 0; j < d; ++j)
    for (size_t r = 0; r < K; ++r) {
      m[r][j] = V[j][r];
      m[r][d + j] = BV[j][r];
    }
  size_t row = 0;
  for (size_t c = 0; c < d; ++c) {
    size_t piv = row;
    while (piv < K && !m[piv][c]) ++piv;
    if (piv == K)
      throw ConsistencyFailure("splitting block lost column rank");
    std::swap(m[piv], m[row]);
    uint64_t s = invm(m[row][c], p);
    for (size_t j = 0; j < 2 * d; ++j) m[row][j] = mulm(m[row][j], s, p);
    for (size_t i = 0; i < K; ++i) {
      if (i == row || !m[i][c]) continue;
      uint64_t f = m[i][c];
      for (size_t j = c; j < 2 * d; ++j)
        m[i][j] = subm(m[i][j], mulm(f, m[row][j], p), p);
    }
    ++row;
  }
  for (size_t i = d; i < K; ++i)
    for (size_t j = 0; j < d; ++j)
      if (m[i][d + j])
        throw ConsistencyFailure("class operator leaves the block");
  Mtx x(d, std::vector<uint64_t>(d, 0));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) x[i][j] = m[i][d + j];
  return x;
}

struct ModularTable {
  uint64_t p = 0;
  std::vector<std::vector<uint64_t>> omega; /* [irrep][class] */
  std::vector<uint64_t> dim_mod, dim_true;
};

ModularTable modular_stage(const GroupAtlas& at) {
  uint32_t K = at.K;
  uint64_t p = find_modulus(at.exponent, at.order);
  std::vector<std::vector<Col>> blocks;
  {
    std::vector<Col> full;
    for (uint32_t j = 0; j < K; ++j) {
      Col e(K, 0);
      e[j] = 1;
      full.push_back(std::move(e));
    }
    blocks.push_back(std::move(full));
  }
  for (uint32_t ci = 1; ci < K; ++ci) {
    bool split_done = true;
    for (const auto& b : blocks)
      if (b.size() > 1) split_done = false;
    if (split_done) break;
    Mtx B = class_matrix(at, ci, p);
    std::vector<std::vector<Col>> next;
    for (auto& blk : blocks) {
      size_t d = blk.size();
      if (d == 1) {
        next.push_back(std::move(blk));
        continue;
      }
      std::vector<Col> BV(d, Col(K, 0));
      for (size_t j = 0; j < d; ++j)
        for (uint32_t r = 0; r < K; ++r) {
          __uint128_t acc = 0;
          for (uint32_t k2 = 0; k2 < K; ++k2)
            if (B[r][k2] && blk[j][k2]) acc += (__uint128_t)B[r][k2] * blk[j][k2];
          BV[j][r] = (uint64_t)(acc % p);
        }
      Mtx X = restrict_block(blk, BV, p);
      PV f = charpoly_mod(X, p);
      PV fp = pderiv(f, p);
      PV fsf = fp.empty() ? pmonic(f, p) : pquot(f, pgcd(f, fp, p), p);
      if (pdeg(fsf) == 1) {
        /* single eigenvalue: the restriction must be scalar */
        uint64_t lam = subm(0, fsf[0], p);
        for (size_t i = 0; i < d; ++i)
          for (size_t j = 0; j < d; ++j)
            if (X[i][j] != (i == j ? lam : 0))
              throw ConsistencyFailure("restriction is not semisimple");
        next.push_back(std::move(blk));
        continue;
      }
      /* all eigenvalues lie in the prime field */
      PV xp = ppowmod(PV{0, 1}, p, fsf, p);
      PV xmx = psub(xp, PV{0, 1}, p);
      if (pdeg(pgcd(xmx, fsf, p)) != pdeg(fsf))
        throw ConsistencyFailure("eigenvalue outside the prime field");
      std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ (p << 20) ^
                          ((uint64_t)ci << 8) ^ (uint64_t)next.size());
      std::vector<uint64_t> lams = split_roots(fsf, p, rng);
      size_t found = 0;
      for (uint64_t lam : lams) {
        Mtx shifted = X;
        for (size_t i = 0; i < d; ++i)
          shifted[i][i] = subm(shifted[i][i], lam, p);
        auto ker = kernel_mod(shifted, p);
        if (ker.empty())
          throw ConsistencyFailure("eigenvalue with empty eigenspace");
        std::vector<Col> child;
        for (const auto& kv : ker) {
          Col v(K, 0);
          for (size_t j = 0; j < d; ++j) {
            if (!kv[j]) continue;
            for (uint32_t r = 0; r < K; ++r)
              v[r] = (v[r] + (__uint128_t)kv[j] * blk[j][r]) % p;
          }
          child.push_back(std::move(v));
        }
        found += child.size();
        next.push_back(std::move(child));
      }
      if (found != d)
        throw ConsistencyFailure("eigenspaces do not fill the block");
    }
    blocks = std::move(next);
  }
  for (const auto& b : blocks)
    if (b.size() != 1)
      throw ConsistencyFailure("class operators failed to separate");
  if (blocks.size() != K)
    throw ConsistencyFailure("wrong irreducible count");

  ModularTable mt;
  mt.p = p;
  for (auto& b : blocks) {
    Col v = std::move(b[0]);
    if (!v[0])
      throw ConsistencyFailure("central character vanishes at the identity");
    uint64_t s = invm(v[0], p);
    for (auto& x : v) x = mulm(x, s, p);
    mt.omega.push_back(std::move(v));
  }
  /* degrees from the weighted norm of the central character */
  for (auto& om : mt.omega) {
    __uint128_t acc = 0;
    for (uint32_t k = 0; k < K; ++k) {
      uint64_t term = mulm(om[k], om[at.inverse_class[k]], p);
      acc += mulm(term, invm(at.class_size[k] % p, p), p);
    }
    uint64_t norm = (uint64_t)(acc % p);
    uint64_t d2 = mulm(at.order % p, invm(norm, p), p);
    uint64_t d = sqrtm(d2, p);
    if (d > p - d) d = p - d;
    if (mulm(d, d, p) != d2 || d == 0)
      throw ConsistencyFailure("degree recovery failed");
    mt.dim_mod.push_back(d);
    mt.dim_true.push_back(d);
  }
  return mt;
}

}  // namespace

cplx CharTable::inner(const std::vector<cplx>& a,
                      const std::vector<cplx>& b) const {
  cplx acc = 0;
  for (uint32_t c = 0; c < K; ++c)
    acc += (long double)atlas->class_size[c] * a[c] * std::conj(b[c]);
  return acc / (long double)atlas->order;
}

std::shared_ptr<const CharTable> dixon_table(
    std::shared_ptr<const GroupAtlas> atlas, const Limits& lim) {
  const GroupAtlas& at = *atlas;
  uint32_t K = at.K;
  if (K > lim.class_cap) throw BudgetExceeded("class count");
  ModularTable mt = modular_stage(at);
  uint64_t p = mt.p;

  auto tab = std::make_shared<CharTable>();
  tab->atlas = atlas;
  tab->K = K;
  tab->p_mod = p;

  uint64_t g = primitive_root(p);
  uint64_t z = powm(g, (p - 1) / at.exponent, p);

  /* root of unity tables per element order */
  std::map<uint32_t, std::vector<cplx>> roots;
  for (uint32_t c = 0; c < K; ++c) {
    uint32_t o = at.class_order[c];
    if (roots.count(o)) continue;
    std::vector<cplx> rs(o);
    for (uint32_t t = 0; t < o; ++t) {
      long double arg = 2.0L * std::numbers::pi_v<long double> * t / o;
      rs[t] = cplx(std::cos(arg), std::sin(arg));
    }
    roots.emplace(o, std::move(rs));
  }

  uint64_t dim_sq_total = 0;
  for (uint32_t r = 0; r < K; ++r) {
    uint64_t d = mt.dim_true[r];
    dim_sq_total += d * d;
    std::vector<uint64_t> chi(K);
    for (uint32_t k = 0; k < K; ++k)
      chi[k] = mulm(mulm(d, mt.omega[r][k], p), invm(at.class_size[k] % p, p), p);
    if (chi[0] != d % p)
      throw ConsistencyFailure("character value at the identity is off");
    std::vector<std::vector<int64_t>> mv(K);
    std::vector<cplx> row(K);
    for (uint32_t k = 0; k < K; ++k) {
      uint32_t o = at.class_order[k];
      uint64_t zo = powm(z, at.exponent / o, p);
      uint64_t oi = invm(o, p);
      std::vector<uint64_t> zp(o);
      zp[0] = 1;
      for (uint32_t t = 1; t < o; ++t) zp[t] = mulm(zp[t - 1], zo, p);
      mv[k].resize(o);
      cplx v = 0;
      const auto& rs = roots[o];
      uint64_t msum = 0, mcheck = 0;
      for (uint32_t t = 0; t < o; ++t) {
        uint64_t acc = 0;
        for (uint32_t s = 0; s < o; ++s) {
          uint64_t zexp = (uint64_t)(o - (uint64_t)s * t % o) % o;
          acc = (acc + mulm(chi[at.power_class[k][s]], zp[zexp], p)) % p;
        }
        uint64_t m = mulm(acc, oi, p);
        if (m > d)
          throw ConsistencyFailure("root multiplicity exceeds the degree");
        mv[k][t] = (int64_t)m;
        msum += m;
        mcheck = (mcheck + mulm(m, zp[t], p)) % p;
        v += (long double)m * rs[t];
      }
      if (msum != d || mcheck != chi[k])
        throw ConsistencyFailure("root multiplicities disagree with the row");
      row[k] = v;
    }
    tab->dims.push_back(d);
    tab->val.push_back(std::move(row));
    tab->root_mult.push_back(std::move(mv));
  }
  if (dim_sq_total != at.order)
    throw ConsistencyFailure("squared degrees do not sum to the order");

  /* canonical ordering: degree, then rows, then multiplicity data */
  std::vector<uint32_t> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
    if (tab->dims[a] != tab->dims[b]) return tab->dims[a] < tab->dims[b];
    for (uint32_t c = 0; c < K; ++c) {
      const cplx &va = tab->val[a][c], &vb = tab->val[b][c];
      if (va.real() != vb.real()) return va.real() < vb.real();
      if (va.imag() != vb.imag()) return va.imag() < vb.imag();
    }
    return tab->root_mult[a] < tab->root_mult[b];
  });
  auto dims = tab->dims;
  auto val = std::move(tab->val);
  auto mv = std::move(tab->root_mult);
  tab->val.resize(K);
  tab->root_mult.resize(K);
  for (uint32_t i = 0; i < K; ++i) {
    tab->dims[i] = dims[perm[i]];
    tab->val[i] = std::move(val[perm[i]]);
    tab->root_mult[i] = std::move(mv[perm[i]]);
  }

  /* locate the trivial character */
  tab->trivial_id = K;
  for (uint32_t r = 0; r < K; ++r) {
    if (tab->dims[r] != 1) continue;
    bool all_one = true;
    for (uint32_t c = 0; c < K; ++c)
      if (std::abs(tab->val[r][c] - cplx(1, 0)) > 1e-9L) all_one = false;
    if (all_one) { tab->trivial_id = r; break; }
  }
  if (tab->trivial_id == K)
    throw ConsistencyFailure("trivial character not found");

  /* orthogonality: rows to 1e-9, columns scaled by the class size */
  for (uint32_t r = 0; r < K; ++r)
    for (uint32_t s = r; s < K; ++s) {
      cplx ip = tab->inner(tab->val[r], tab->val[s]);
      cplx expect = (r == s) ? cplx(1, 0) : cplx(0, 0);
      if (std::abs(ip - expect) > 1e-9L)
        throw ConsistencyFailure("row orthogonality violated");
    }
  for (uint32_t c = 0; c < K; ++c)
    for (uint32_t c2 = c; c2 < K; ++c2) {
      cplx acc = 0;
      for (uint32_t r = 0; r < K; ++r)
        acc += tab->val[r][c] * std::conj(tab->val[r][c2]);
      long double expect =
          (c == c2) ? (long double)at.order / at.class_size[c] : 0.0L;
      if (std::abs(acc - expect) * (long double)at.class_size[c] >
          1e-9L * (long double)at.order)
        throw ConsistencyFailure("column orthogonality violated");
    }
  return tab;
}

std::shared_ptr<const CharTable> table_of(GroupKind kind, int n, int q) {
  if (q == 2) kind = GroupKind::GL;
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const CharTable>>
      cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple((int)kind, n, q);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, dixon_table(atlas_of(kind, n, q))).first;
  return it->second;
}

std::shared_ptr<const CharTable> table_of(const GroupDesc& g) {
  return table_of(g.kind, g.n, g.q);
}

std::vector<uint32_t> linear_characters(const CharTable& tab) {
  const GroupAtlas& at = *tab.atlas;
  std::vector<uint32_t> out;
  for (uint32_t r = 0; r < tab.K; ++r) {
    if (tab.dims[r] != 1) continue;
    std::map<int, cplx> by_det;
    bool factors = true;
    for (uint32_t c = 0; c < tab.K && factors; ++c) {
      auto [it, fresh] = by_det.try_emplace(at.class_det[c], tab.val[r][c]);
      if (!fresh && std::abs(it->second - tab.val[r][c]) > 1e-6L)
        factors = false;
    }
    if (factors) out.push_back(r);
  }
  return out;
}

std::vector<cplx> twist_row(const CharTable& tab, uint32_t r, uint32_t lin) {
  if (tab.dims[lin] != 1)
    throw NotInDomain("twist requires a one dimensional character");
  std::vector<cplx> out(tab.K);
  for (uint32_t c = 0; c < tab.K; ++c)
    out[c] = tab.val[r][c] * tab.val[lin][c];
  return out;
}

uint32_t match_irrep(const CharTable& tab, const std::vector<cplx>& row,
                     long double tol) {
  int hit = -1;
  for (uint32_t r = 0; r < tab.K; ++r) {
    bool ok = true;
    for (uint32_t c = 0; c < tab.K && ok; ++c)
      if (std::abs(tab.val[r][c] - row[c]) > tol) ok = false;
    if (ok) {
      if (hit >= 0) throw ConsistencyFailure("ambiguous character match");
      hit = (int)r;
    }
  }
  if (hit < 0) throw NotInDomain("class function is not an irreducible row");
  return (uint32_t)hit;
}

std::vector<cplx> induced_character(const GroupAtlas& at,
                                    const std::vector<uint32_t>& sub_codes,
                                    const std::function<cplx(uint64_t)>& chi_h,
                                    const Limits& lim) {
  if (at.order > lim.induction_cap)
    throw BudgetExceeded("induction from an explicit subgroup needs a small group");
  if (sub_codes.empty() || at.order % sub_codes.size() != 0)
    throw ConsistencyFailure("subgroup size does not divide the group order");
  std::vector<cplx> out(at.K, cplx(0, 0));
  std::vector<PackedRows> reps(at.K);
  for (uint32_t k = 0; k < at.K; ++k) at.ops.decode(at.class_rep[k], reps[k]);
  PackedRows x, xi, t1, w;
  for (uint32_t xc : at.elements) {
    at.ops.decode(xc, x);
    at.ops.inv(x, xi);
    for (uint32_t k = 0; k < at.K; ++k) {
      at.ops.mul(xi, reps[k], t1);
      at.ops.mul(t1, x, w);
      uint64_t wc = at.ops.encode(w);
      if (std::binary_search(sub_codes.begin(), sub_codes.end(), (uint32_t)wc))
        out[k] += chi_h(wc);
    }
  }
  for (auto& v : out) v /= (long double)sub_codes.size();
  return out;
}

std::vector<cplx> omega_power_row(const GroupAtlas& at, int k) {
  std::vector<cplx> out(at.K);
  for (uint32_t c = 0; c < at.K; ++c)
    out[c] = (long double)ipow(at.q, (unsigned)(k * at.class_fix_dim[c]));
  return out;
}

namespace {

void block_partitions(int n, int max_part, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    block_partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

bool is_cuspidal(const CharTable& tab, uint32_t r) {
  const GroupAtlas& at = *tab.atlas;
  if (at.kind != GroupKind::GL)
    throw NotInDomain("cuspidality is defined on the GL tables here");
  std::vector<std::vector<int>> parts;
  std::vector<int> cur;
  block_partitions(at.n, at.n, cur, parts);
  for (const auto& D : parts) {
    if (D.size() < 2) continue; /* proper parabolics only */
    std::vector<int> blk(at.n);
    int row = 0;
    for (size_t t = 0; t < D.size(); ++t)
      for (int i = 0; i < D[t]; ++i) blk[row++] = (int)t;
    std::vector<std::pair<int, int>> pos;
    for (int i = 0; i < at.n; ++i)
      for (int j = 0; j < at.n; ++j)
        if (blk[i] < blk[j]) pos.emplace_back(i, j);
    uint64_t count = ipow(at.q, (unsigned)pos.size());
    MatFq u = MatFq::identity(*at.F, at.n);
    std::vector<uint8_t> dig(pos.size(), 0);
    cplx sum(0, 0);
    for (uint64_t it = 0; it < count; ++it) {
      for (size_t t = 0; t < pos.size(); ++t)
        u.at(pos[t].first, pos[t].second) = dig[t];
      sum += tab.val[r][at.class_of(u.code())];
      for (size_t t = 0; t < pos.size(); ++t) {
        if (++dig[t] < at.q) break;
        dig[t] = 0;
      }
    }
    int64_t mult = guarded_round(sum / (long double)count, 1e-6L,
                                 "radical invariant multiplicity");
    if (mult < 0)
      throw ConsistencyFailure("negative invariant multiplicity on a radical");
    if (mult != 0) return false;
  }
  return true;
}

CharRatio char_ratio_at_transvection(const CharTable& tab, uint32_t r) {
  if (tab.atlas->transvection_class < 0)
    throw NotInDomain("group has no transvection class");
  uint32_t tc = (uint32_t)tab.atlas->transvection_class;
  CharRatio out;
  out.raw = tab.val[r][tc];
  int64_t num = guarded_round(out.raw, 1e-6L, "transvection character value");
  uint64_t den = tab.dims[r];
  if (num == 0) {
    out.num = 0;
    out.den = 1;
    return out;
  }
  uint64_t g = std::gcd((uint64_t)std::llabs(num), den);
  out.num = num / (int64_t)g;
  out.den = den / g;
  return out;
}

}  // namespace rankscope
