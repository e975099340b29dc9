#include "rankscope/atlas.hh"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <numeric>

namespace rankscope {

std::string GroupDesc::name() const {
  return std::string(kind == GroupKind::GL ? "GL(" : "SL(") +
         std::to_string(n) + "," + std::to_string(q) + ")";
}

GroupDesc parse_group(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace((unsigned char)c)) s += c;
  GroupKind kind;
  if (s.rfind("GL(", 0) == 0)
    kind = GroupKind::GL;
  else if (s.rfind("SL(", 0) == 0)
    kind = GroupKind::SL;
  else
    throw NotInDomain("cannot parse group '" + text +
                      "', expected GL(n,q) or SL(n,q)");
  size_t comma = s.find(',', 3), close = s.find(')', 3);
  if (comma == std::string::npos || close == std::string::npos ||
      close < comma || close + 1 != s.size())
    throw NotInDomain("cannot parse group '" + text + "'");
  int n = 0, q = 0;
  try {
    n = std::stoi(s.substr(3, comma - 3));
    q = std::stoi(s.substr(comma + 1, close - comma - 1));
  } catch (const std::exception&) {
    throw NotInDomain("cannot parse group '" + text + "'");
  }
  if (n < 1) throw NotInDomain("group degree must be positive");
  return {kind, n, q};
}

uint64_t group_order(GroupKind kind, int n, int q) {
  uint64_t qn = ipow(q, n), ord = 1;
  for (int a = 0; a < n; ++a) ord *= qn - ipow(q, a);
  if (kind == GroupKind::SL) ord /= (uint64_t)(q - 1);
  return ord;
}

void PackedOps::init(const FieldTable& f, int n_) {
  F = &f;
  n = n_;
  R = (uint32_t)ipow(f.q, n);
  digit.assign((size_t)R * n, 0);
  for (uint32_t r = 0; r < R; ++r) {
    uint32_t v = r;
    for (int j = 0; j < n; ++j) {
      digit[(size_t)r * n + j] = (uint8_t)(v % f.q);
      v /= f.q;
    }
  }
  rowadd.assign((size_t)R * R, 0);
  for (uint32_t a = 0; a < R; ++a)
    for (uint32_t b = 0; b < R; ++b) {
      uint32_t s = 0;
      for (int j = n - 1; j >= 0; --j)
        s = s * f.q + f.add[digit[(size_t)a * n + j]][digit[(size_t)b * n + j]];
      rowadd[(size_t)a * R + b] = (uint16_t)s;
    }
  for (int sc = 0; sc < f.q; ++sc) {
    rowscale[sc].assign(R, 0);
    for (uint32_t r = 0; r < R; ++r) {
      uint32_t s = 0;
      for (int j = n - 1; j >= 0; --j)
        s = s * f.q + f.mul[sc][digit[(size_t)r * n + j]];
      rowscale[sc][r] = (uint16_t)s;
    }
  }
}

void PackedOps::decode(uint64_t code, PackedRows& out) const {
  for (int i = 0; i < n; ++i) {
    out[i] = (uint16_t)(code % R);
    code /= R;
  }
}

uint64_t PackedOps::encode(const PackedRows& m) const {
  uint64_t code = 0;
  for (int i = n - 1; i >= 0; --i) code = code * R + m[i];
  return code;
}

void PackedOps::mul(const PackedRows& a, const PackedRows& b,
                    PackedRows& out) const {
  for (int i = 0; i < n; ++i) {
    uint16_t acc = 0;
    const uint8_t* di = &digit[(size_t)a[i] * n];
    for (int j = 0; j < n; ++j) {
      uint8_t d = di[j];
      if (d) acc = rowadd[(size_t)acc * R + rowscale[d][b[j]]];
    }
    out[i] = acc;
  }
}

void PackedOps::inv(const PackedRows& a, PackedRows& out) const {
  MatFq m = unpack(a);
  auto iv = m.inverse();
  if (!iv) throw ConsistencyFailure("packed inverse of singular matrix");
  pack(*iv, out);
}

void PackedOps::identity(PackedRows& out) const {
  for (int i = 0; i < n; ++i) out[i] = (uint16_t)ipow(F->q, i);
}

MatFq PackedOps::unpack(const PackedRows& m) const {
  MatFq out(*F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = digit[(size_t)m[i] * n + j];
  return out;
}

void PackedOps::pack(const MatFq& m, PackedRows& out) const {
  for (int i = 0; i < n; ++i) {
    uint32_t r = 0;
    for (int j = n - 1; j >= 0; --j) r = r * F->q + m.at(i, j);
    out[i] = (uint16_t)r;
  }
}

uint64_t GroupAtlas::identity_code() const {
  PackedRows id;
  ops.identity(id);
  return ops.encode(id);
}

uint64_t GroupAtlas::mul_codes(uint64_t a, uint64_t b) const {
  PackedRows pa{}, pb{}, pc{};
  ops.decode(a, pa);
  ops.decode(b, pb);
  ops.mul(pa, pb, pc);
  return ops.encode(pc);
}

uint64_t GroupAtlas::inv_code(uint64_t a) const {
  PackedRows pa, pb;
  ops.decode(a, pa);
  ops.inv(pa, pb);
  return ops.encode(pb);
}

namespace {

std::vector<MatFq> generators_for(GroupKind kind, int n, int q) {
  const FieldTable& F = FieldTable::get(q);
  std::vector<MatFq> gens;
  if (n == 1) {
    if (kind == GroupKind::GL && q > 2) {
      MatFq d(F, 1, 1);
      d.at(0, 0) = F.primitive;
      gens.push_back(d);
    }
    return gens;
  }
  MatFq t = MatFq::identity(F, n);
  t.at(0, 1) = 1;
  gens.push_back(t);

  MatFq cyc(F, n, n);
  for (int i = 0; i < n; ++i) cyc.at((i + 1) % n, i) = 1;
  if (kind == GroupKind::SL && n % 2 == 0) cyc.at(0, n - 1) = F.neg[1];
  gens.push_back(cyc);

  if (kind == GroupKind::GL) {
    if (q > 2) {
      MatFq d = MatFq::identity(F, n);
      d.at(0, 0) = F.primitive;
      gens.push_back(d);
    }
  } else if (!F.is_prime_field()) {
    /* over a proper extension the two standard generators only reach
       prime-subfield transvection amounts, so add a torus element */
    MatFq d = MatFq::identity(F, n);
    d.at(0, 0) = F.primitive;
    d.at(1, 1) = F.inv[F.primitive];
    gens.push_back(d);
  }
  for (const auto& g : gens) {
    uint8_t dt = g.det();
    if (dt == 0 || (kind == GroupKind::SL && dt != 1))
      throw ConsistencyFailure("generator has wrong determinant");
  }
  return gens;
}

uint64_t lcm64(uint64_t a, uint64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

std::shared_ptr<const GroupAtlas> build_atlas(GroupKind kind, int n, int q,
                                              const Limits& lim) {
  const FieldTable& F = FieldTable::get(q);
  if (n < 1 || n > 8) throw BudgetExceeded("degree " + std::to_string(n));
  uint64_t code_space = 1;
  for (int t = 0; t < n * n; ++t) {
    code_space *= (uint64_t)q;
    if (code_space > lim.code_space)
      throw BudgetExceeded("matrix code space exceeds cap");
  }
  uint64_t order = group_order(kind, n, q);
  if (order > lim.element_cap)
    throw BudgetExceeded("group order " + std::to_string(order) +
                         " exceeds element cap");

  auto at = std::make_shared<GroupAtlas>();
  at->kind = kind;
  at->n = n;
  at->q = q;
  at->F = &F;
  at->code_space = code_space;
  at->order = order;
  at->ops.init(F, n);
  const PackedOps& ops = at->ops;

  std::vector<MatFq> gens = generators_for(kind, n, q);
  std::vector<PackedRows> pg(gens.size()), pginv(gens.size());
  for (size_t i = 0; i < gens.size(); ++i) {
    ops.pack(gens[i], pg[i]);
    ops.inv(pg[i], pginv[i]);
  }

  /* breadth-first closure under right multiplication */
  std::vector<bool> visited(code_space, false);
  std::vector<uint32_t> queue;
  queue.reserve(order);
  uint64_t idc = at->identity_code();
  visited[idc] = true;
  queue.push_back((uint32_t)idc);
  PackedRows x, y;
  for (size_t head = 0; head < queue.size(); ++head) {
    ops.decode(queue[head], x);
    for (const auto& g : pg) {
      ops.mul(x, g, y);
      uint64_t c = ops.encode(y);
      if (!visited[c]) {
        visited[c] = true;
        if (queue.size() >= order)
          throw ConsistencyFailure("generated set exceeds expected order");
        queue.push_back((uint32_t)c);
      }
    }
  }
  if (queue.size() != order)
    throw ConsistencyFailure("generated " + std::to_string(queue.size()) +
                             " elements, expected " + std::to_string(order));
  at->elements = std::move(queue);
  std::sort(at->elements.begin(), at->elements.end());
  visited.clear();
  visited.shrink_to_fit();

  /* conjugacy classes by flood fill, seeds in ascending code order */
  at->class_map.assign(code_space, GroupAtlas::kNonMember);
  for (uint32_t c : at->elements) at->class_map[c] = GroupAtlas::kUnassigned;

  std::vector<uint32_t> seed, stack;
  std::vector<uint64_t> size_tmp;
  PackedRows t1;
  for (uint32_t e : at->elements) {
    if (at->class_map[e] != GroupAtlas::kUnassigned) continue;
    uint16_t id = (uint16_t)seed.size();
    if (seed.size() >= lim.class_cap)
      throw BudgetExceeded("class count exceeds cap");
    seed.push_back(e);
    size_tmp.push_back(0);
    at->class_map[e] = id;
    stack.assign(1, e);
    while (!stack.empty()) {
      uint32_t xc = stack.back();
      stack.pop_back();
      ++size_tmp[id];
      ops.decode(xc, x);
      for (size_t gi = 0; gi < pg.size(); ++gi) {
        ops.mul(pg[gi], x, t1);
        ops.mul(t1, pginv[gi], y);
        uint64_t yc = ops.encode(y);
        uint16_t& slot = at->class_map[yc];
        if (slot == GroupAtlas::kNonMember)
          throw ConsistencyFailure("conjugate escaped the group");
        if (slot == GroupAtlas::kUnassigned) {
          slot = id;
          stack.push_back((uint32_t)yc);
        }
      }
    }
  }
  uint32_t K = (uint32_t)seed.size();
  at->K = K;

  /* per-class data in discovery order */
  std::vector<uint32_t> ord_tmp(K);
  for (uint32_t c = 0; c < K; ++c) {
    PackedRows rep, acc;
    ops.decode(seed[c], rep);
    ops.identity(acc);
    uint32_t o = 0;
    PackedRows next;
    do {
      ops.mul(acc, rep, next);
      acc = next;
      ++o;
    } while (ops.encode(acc) != idc);
    ord_tmp[c] = o;
  }

  /* canonical ordering: element order, class size, least member code */
  std::vector<uint32_t> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
    if (ord_tmp[a] != ord_tmp[b]) return ord_tmp[a] < ord_tmp[b];
    if (size_tmp[a] != size_tmp[b]) return size_tmp[a] < size_tmp[b];
    return seed[a] < seed[b];
  });
  std::vector<uint16_t> new_of_old(K);
  for (uint32_t i = 0; i < K; ++i) new_of_old[perm[i]] = (uint16_t)i;

  at->class_rep.resize(K);
  at->class_size.resize(K);
  at->class_order.resize(K);
  for (uint32_t i = 0; i < K; ++i) {
    at->class_rep[i] = seed[perm[i]];
    at->class_size[i] = size_tmp[perm[i]];
    at->class_order[i] = ord_tmp[perm[i]];
  }
  for (uint32_t e : at->elements)
    at->class_map[e] = new_of_old[at->class_map[e]];

  /* members grouped by class, ascending codes inside each class */
  at->class_offset.assign(K + 1, 0);
  for (uint32_t c = 0; c < K; ++c)
    at->class_offset[c + 1] = at->class_offset[c] + at->class_size[c];
  at->by_class.resize(at->elements.size());
  std::vector<uint64_t> cursor(at->class_offset.begin(),
                               at->class_offset.end() - 1);
  for (uint32_t e : at->elements) at->by_class[cursor[at->class_map[e]]++] = e;

  at->class_det.resize(K);
  at->class_fix_dim.resize(K);
  at->class_rss.resize(K);
  at->class_no_fix.resize(K);
  at->inverse_class.resize(K);
  at->power_class.resize(K);
  at->exponent = 1;
  MatFq id_m = MatFq::identity(F, n);
  for (uint32_t c = 0; c < K; ++c) {
    MatFq rep = at->mat_of(at->class_rep[c]);
    at->class_det[c] = rep.det();
    at->class_fix_dim[c] = (uint8_t)(n - (rep - id_m).rank());
    at->class_rss[c] = is_regular_semisimple(rep) ? 1 : 0;
    at->class_no_fix[c] = fixes_no_vector(rep) ? 1 : 0;
    at->inverse_class[c] = at->class_of(at->inv_code(at->class_rep[c]));
    uint32_t o = at->class_order[c];
    at->exponent = lcm64(at->exponent, o);
    at->power_class[c].resize(o);
    uint64_t pw = idc;
    for (uint32_t s = 0; s < o; ++s) {
      at->power_class[c][s] = at->class_of(pw);
      pw = at->mul_codes(pw, at->class_rep[c]);
    }
  }
  if (n >= 2) {
    MatFq t = MatFq::identity(F, n);
    t.at(0, 1) = 1;
    at->transvection_class = at->class_of(t.code());
  }

  /* basic sanity on the finished object */
  uint64_t total = 0;
  for (uint32_t c = 0; c < K; ++c) total += at->class_size[c];
  if (total != order || at->class_order[0] != 1 || at->class_size[0] != 1 ||
      at->class_rep[0] != idc)
    throw ConsistencyFailure("class decomposition is inconsistent");
  for (uint32_t c = 0; c < K; ++c)
    if (at->inverse_class[at->inverse_class[c]] != c ||
        at->class_size[at->inverse_class[c]] != at->class_size[c])
      throw ConsistencyFailure("class inversion is not an involution");
  return at;
}

std::shared_ptr<const GroupAtlas> atlas_of(GroupKind kind, int n, int q) {
  /* SL and GL coincide for q = 2; fold to one cache entry */
  if (q == 2) kind = GroupKind::GL;
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const GroupAtlas>>
      cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple((int)kind, n, q);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_atlas(kind, n, q)).first;
  return it->second;
}

std::shared_ptr<const GroupAtlas> atlas_of(const GroupDesc& g) {
  return atlas_of(g.kind, g.n, g.q);
}

}  // namespace rankscope
