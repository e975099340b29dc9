#include "rankscope/gf.hh"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace rankscope {

namespace {

/* fixed modulus for each prime-power order: x^2+x+1, x^3+x+1, x^2+x+2. */
std::vector<uint8_t> modulus_for(int q) {
  switch (q) {
    case 4: return {1, 1, 1};
    case 8: return {1, 1, 0, 1};
    case 9: return {2, 1, 1};
    default: return {};
  }
}

std::vector<uint8_t> decode(int code, int p, int deg) {
  std::vector<uint8_t> v(deg, 0);
  for (int i = 0; i < deg; ++i) {
    v[i] = (uint8_t)(code % p);
    code /= p;
  }
  return v;
}

int encode(const std::vector<uint8_t>& v, int p, int deg) {
  int code = 0;
  for (int i = deg - 1; i >= 0; --i) code = code * p + v[i];
  return code;
}

/* product of coefficient vectors reduced by the fixed modulus. */
std::vector<uint8_t> poly_mul_mod(const std::vector<uint8_t>& a,
                                  const std::vector<uint8_t>& b,
                                  const std::vector<uint8_t>& mod, int p) {
  int deg = (int)mod.size() - 1;
  std::vector<int> prod(2 * deg - 1, 0);
  for (int i = 0; i < deg; ++i)
    for (int j = 0; j < deg; ++j) prod[i + j] += a[i] * b[j];
  for (int k = 2 * deg - 2; k >= deg; --k) {
    int c = prod[k] % p;
    if (c) /* x^k = -sum mod[i] x^(k-deg+i) */
      for (int i = 0; i < deg; ++i)
        prod[k - deg + i] += c * (p - mod[i] % p);
    prod[k] = 0;
  }
  std::vector<uint8_t> out(deg);
  for (int i = 0; i < deg; ++i) out[i] = (uint8_t)(prod[i] % p);
  return out;
}

std::unique_ptr<FieldTable> build_field(int q) {
  static const int primes[] = {2, 3, 5, 7};
  auto ft = std::make_unique<FieldTable>();
  int p = 0, deg = 0;
  for (int pr : primes)
    for (int d = 1, pw = pr; d <= 3; ++d, pw *= pr)
      if (pw == q) { p = pr; deg = d; }
  if (!p) throw UnsupportedField("no field of order " + std::to_string(q));
  ft->q = q;
  ft->p = p;
  ft->deg = deg;
  auto mod = modulus_for(q);
  for (int x = 0; x < q; ++x) {
    auto vx = decode(x, p, deg);
    for (int y = 0; y < q; ++y) {
      auto vy = decode(y, p, deg);
      std::vector<uint8_t> s(deg), d2(deg);
      for (int i = 0; i < deg; ++i) {
        s[i] = (uint8_t)((vx[i] + vy[i]) % p);
        d2[i] = (uint8_t)((vx[i] + p - vy[i]) % p);
      }
      ft->add[x][y] = (uint8_t)encode(s, p, deg);
      ft->sub[x][y] = (uint8_t)encode(d2, p, deg);
      if (deg == 1)
        ft->mul[x][y] = (uint8_t)((x * y) % p);
      else
        ft->mul[x][y] = (uint8_t)encode(poly_mul_mod(vx, vy, mod, p), p, deg);
    }
    ft->neg[x] = ft->sub[0][x];
  }
  for (int x = 1; x < q; ++x) {
    for (int y = 1; y < q; ++y)
      if (ft->mul[x][y] == 1) ft->inv[x] = (uint8_t)y;
    /* trace: sum of frobenius iterates; lands in the prime subfield. */
    int acc = 0, f = x;
    for (int i = 0; i < deg; ++i) {
      acc = ft->add[acc][f];
      int fp = f;
      for (int j = 1; j < p; ++j) fp = ft->mul[fp][f];
      f = fp;
    }
    ft->trace[x] = acc; /* codes < p coincide with prime-field values */
  }
  ft->trace[0] = 0;
  for (int x = 0; x < q; ++x) {
    long double arg =
        2.0L * std::numbers::pi_v<long double> * ft->trace[x] / p;
    ft->psi[x] = cplx(std::cos(arg), std::sin(arg));
  }
  ft->dlog.fill(-1);
  for (int g = 1; g < q; ++g) {
    int ord = 1, x = g;
    while (x != 1) { x = ft->mul[x][g]; ++ord; }
    if (ord == q - 1) {
      ft->primitive = (uint8_t)g;
      int y = 1;
      for (int k = 0; k < q - 1; ++k) {
        ft->unit[k] = (uint8_t)y;
        ft->dlog[y] = k;
        y = ft->mul[y][g];
      }
      break;
    }
  }
  return ft;
}

}  // namespace

uint8_t FieldTable::pow(uint8_t a, uint64_t e) const {
  uint8_t r = 1;
  while (e) {
    if (e & 1) r = mul[r][a];
    a = mul[a][a];
    e >>= 1;
  }
  return r;
}

const FieldTable& FieldTable::get(int q) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<FieldTable>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(q);
  if (it == cache.end()) {
    if (q < 2 || q > 9 || q == 6)
      throw UnsupportedField("field order " + std::to_string(q) +
                             " not supported");
    it = cache.emplace(q, build_field(q)).first;
  }
  return *it->second;
}

MatFq MatFq::identity(const FieldTable& f, int n) {
  MatFq m(f, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

MatFq MatFq::operator*(const MatFq& o) const {
  MatFq r(*F, rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      uint8_t v = at(i, k);
      if (!v) continue;
      const auto& mulrow = F->mul[v];
      for (int j = 0; j < o.cols; ++j)
        r.at(i, j) = F->add[r.at(i, j)][mulrow[o.at(k, j)]];
    }
  return r;
}

MatFq MatFq::operator+(const MatFq& o) const {
  MatFq r(*F, rows, cols);
  for (size_t t = 0; t < a.size(); ++t) r.a[t] = F->add[a[t]][o.a[t]];
  return r;
}

MatFq MatFq::operator-(const MatFq& o) const {
  MatFq r(*F, rows, cols);
  for (size_t t = 0; t < a.size(); ++t) r.a[t] = F->sub[a[t]][o.a[t]];
  return r;
}

MatFq MatFq::transpose() const {
  MatFq r(*F, cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
  return r;
}

MatFq MatFq::pow(uint64_t e) const {
  MatFq r = identity(*F, rows), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

int MatFq::rref() {
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (at(i, c)) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < cols; ++j) std::swap(at(piv, j), at(r, j));
    uint8_t s = F->inv[at(r, c)];
    for (int j = 0; j < cols; ++j) at(r, j) = F->mul[s][at(r, j)];
    for (int i = 0; i < rows; ++i) {
      if (i == r || !at(i, c)) continue;
      uint8_t f = at(i, c);
      for (int j = 0; j < cols; ++j)
        at(i, j) = F->sub[at(i, j)][F->mul[f][at(r, j)]];
    }
    ++r;
  }
  return r;
}

int MatFq::rank() const {
  MatFq tmp = *this;
  return tmp.rref();
}

int MatFq::kernel_dim() const { return cols - rank(); }

uint8_t MatFq::det() const {
  MatFq tmp = *this;
  uint8_t d = 1;
  for (int c = 0; c < tmp.cols; ++c) {
    int piv = -1;
    for (int i = c; i < tmp.rows; ++i)
      if (tmp.at(i, c)) { piv = i; break; }
    if (piv < 0) return 0;
    if (piv != c) {
      for (int j = 0; j < tmp.cols; ++j) std::swap(tmp.at(piv, j), tmp.at(c, j));
      d = F->neg[d];
    }
    d = F->mul[d][tmp.at(c, c)];
    uint8_t s = F->inv[tmp.at(c, c)];
    for (int i = c + 1; i < tmp.rows; ++i) {
      if (!tmp.at(i, c)) continue;
      uint8_t f = F->mul[s][tmp.at(i, c)];
      for (int j = c; j < tmp.cols; ++j)
        tmp.at(i, j) = F->sub[tmp.at(i, j)][F->mul[f][tmp.at(c, j)]];
    }
  }
  return d;
}

std::optional<MatFq> MatFq::inverse() const {
  MatFq aug(*F, rows, 2 * cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
    aug.at(i, cols + i) = 1;
  }
  if (aug.rref() < rows) return std::nullopt;
  /* left half must be the identity for the right half to be valid */
  for (int i = 0; i < rows; ++i)
    if (aug.at(i, i) != 1) return std::nullopt;
  MatFq inv(*F, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) inv.at(i, j) = aug.at(i, cols + j);
  return inv;
}

uint8_t MatFq::trace_entry() const {
  uint8_t t = 0;
  for (int i = 0; i < rows; ++i) t = F->add[t][at(i, i)];
  return t;
}

uint64_t MatFq::code() const {
  uint64_t c = 0;
  for (size_t t = a.size(); t-- > 0;) c = c * F->q + a[t];
  return c;
}

MatFq MatFq::from_code(const FieldTable& f, int r, int c, uint64_t code) {
  MatFq m(f, r, c);
  for (size_t t = 0; t < m.a.size(); ++t) {
    m.a[t] = (uint8_t)(code % f.q);
    code /= f.q;
  }
  return m;
}

PolyFq::PolyFq(const FieldTable& f, std::vector<uint8_t> coeffs)
    : F(&f), c(std::move(coeffs)) {
  normalize();
}

void PolyFq::normalize() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

PolyFq PolyFq::x_power(const FieldTable& f, int k, uint8_t scale) {
  PolyFq p(f);
  if (scale) {
    p.c.assign(k + 1, 0);
    p.c[k] = scale;
  }
  return p;
}

PolyFq PolyFq::constant(const FieldTable& f, uint8_t v) {
  return x_power(f, 0, v);
}

PolyFq PolyFq::operator+(const PolyFq& o) const {
  PolyFq r(*F);
  r.c.resize(std::max(c.size(), o.c.size()), 0);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = F->add[coeff(i)][o.coeff(i)];
  r.normalize();
  return r;
}

PolyFq PolyFq::operator-(const PolyFq& o) const {
  PolyFq r(*F);
  r.c.resize(std::max(c.size(), o.c.size()), 0);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = F->sub[coeff(i)][o.coeff(i)];
  r.normalize();
  return r;
}

PolyFq PolyFq::operator*(const PolyFq& o) const {
  PolyFq r(*F);
  if (is_zero() || o.is_zero()) return r;
  r.c.assign(c.size() + o.c.size() - 1, 0);
  for (size_t i = 0; i < c.size(); ++i) {
    if (!c[i]) continue;
    const auto& mulrow = F->mul[c[i]];
    for (size_t j = 0; j < o.c.size(); ++j)
      r.c[i + j] = F->add[r.c[i + j]][mulrow[o.c[j]]];
  }
  r.normalize();
  return r;
}

PolyFq PolyFq::scaled(uint8_t s) const {
  PolyFq r(*F);
  if (!s) return r;
  r.c = c;
  for (auto& v : r.c) v = F->mul[s][v];
  return r;
}

PolyFq PolyFq::derivative() const {
  PolyFq r(*F);
  if (degree() < 1) return r;
  r.c.resize(c.size() - 1);
  for (size_t i = 1; i < c.size(); ++i) {
    uint8_t m = (uint8_t)(i % F->p); /* formal multiple reduces mod char */
    uint8_t mm = 0;
    for (int k = 0; k < m; ++k) mm = F->add[mm][1];
    r.c[i - 1] = F->mul[mm][c[i]];
  }
  r.normalize();
  return r;
}

PolyFq PolyFq::monic() const {
  if (is_zero()) return *this;
  return scaled(F->inv[lead()]);
}

uint8_t PolyFq::eval(uint8_t x) const {
  uint8_t v = 0;
  for (size_t i = c.size(); i-- > 0;) v = F->add[F->mul[v][x]][c[i]];
  return v;
}

PolyFq poly_gcd(PolyFq a, PolyFq b) {
  while (!b.is_zero()) {
    /* remainder of a by b via long division */
    const FieldTable& F = *b.F;
    uint8_t li = F.inv[b.lead()];
    PolyFq r = a;
    while (!r.is_zero() && r.degree() >= b.degree()) {
      uint8_t f = F.mul[li][r.lead()];
      int shift = r.degree() - b.degree();
      PolyFq t = b * PolyFq::x_power(F, shift, f);
      r = r - t;
    }
    a = b;
    b = r;
  }
  return a.monic();
}

PolyFq MatFq::char_poly() const {
  /* det(xI - M) by expansion along rows, memoized on the set of
     remaining columns.  n is small here so this stays cheap. */
  const FieldTable& f = *F;
  int n = rows;
  std::vector<PolyFq> memo(1u << n);
  std::vector<bool> have(1u << n, false);
  PolyFq one = PolyFq::constant(f, 1);
  std::function<PolyFq(uint32_t)> go = [&](uint32_t mask) -> PolyFq {
    if (!mask) return one;
    if (have[mask]) return memo[mask];
    int r = n - __builtin_popcount(mask);
    PolyFq acc(f);
    int pos = 0;
    for (int j = 0; j < n; ++j) {
      if (!(mask >> j & 1)) continue;
      PolyFq entry =
          (r == j) ? PolyFq::x_power(f, 1) - PolyFq::constant(f, at(r, j))
                   : PolyFq::constant(f, f.neg[at(r, j)]);
      if (!entry.is_zero()) {
        PolyFq sub = go(mask & ~(1u << j));
        PolyFq term = entry * sub;
        if (pos & 1) term = term.scaled(f.neg[1]);
        acc = acc + term;
      }
      ++pos;
    }
    have[mask] = true;
    memo[mask] = acc;
    return acc;
  };
  return go((1u << n) - 1);
}

bool is_regular_semisimple(const MatFq& m) {
  PolyFq f = m.char_poly();
  PolyFq g = poly_gcd(f, f.derivative());
  return g.degree() == 0;
}

bool fixes_no_vector(const MatFq& m) {
  return m.char_poly().eval(1) != 0;
}

}  // namespace rankscope
