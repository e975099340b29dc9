#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "rankscope/atlas.hh"

using namespace rankscope;

TEST_CASE("group grammar round trips and rejects junk") {
  GroupDesc g = parse_group("GL(3,2)");
  CHECK(g.kind == GroupKind::GL);
  CHECK(g.n == 3);
  CHECK(g.q == 2);
  CHECK(g.name() == "GL(3,2)");
  GroupDesc s = parse_group(" SL( 4 , 3 ) ");
  CHECK(s.kind == GroupKind::SL);
  CHECK(s.n == 4);
  CHECK(s.q == 3);
  CHECK_THROWS_AS(parse_group("PGL(3,2)"), NotInDomain);
  CHECK_THROWS_AS(parse_group("GL(3)"), NotInDomain);
  CHECK_THROWS_AS(parse_group("GL(0,2)"), NotInDomain);
  CHECK_THROWS_AS(parse_group("GL(2,2)x"), NotInDomain);
}

TEST_CASE("order formula reproduces known values") {
  struct Row { GroupKind k; int n, q; uint64_t ord; };
  const Row rows[] = {
      {GroupKind::GL, 2, 2, 6},        {GroupKind::GL, 2, 3, 48},
      {GroupKind::GL, 2, 4, 180},      {GroupKind::GL, 2, 5, 480},
      {GroupKind::GL, 2, 7, 2016},     {GroupKind::GL, 2, 8, 3528},
      {GroupKind::GL, 2, 9, 5760},     {GroupKind::GL, 3, 2, 168},
      {GroupKind::GL, 3, 3, 11232},    {GroupKind::GL, 3, 4, 181440},
      {GroupKind::GL, 4, 2, 20160},    {GroupKind::GL, 4, 3, 24261120},
      {GroupKind::GL, 5, 2, 9999360},  {GroupKind::SL, 2, 3, 24},
      {GroupKind::SL, 2, 4, 60},       {GroupKind::SL, 2, 9, 720},
      {GroupKind::SL, 3, 3, 5616},     {GroupKind::SL, 3, 4, 60480},
      {GroupKind::SL, 4, 3, 12130560}, {GroupKind::SL, 5, 2, 9999360},
  };
  for (const auto& r : rows) CHECK(group_order(r.k, r.n, r.q) == r.ord);
}

TEST_CASE("packed kernels agree with the dense matrix path") {
  std::mt19937 rng(3);
  for (int q : {2, 3, 4, 9}) {
    const FieldTable& F = FieldTable::get(q);
    for (int n : {2, 3}) {
      PackedOps ops;
      ops.init(F, n);
      for (int t = 0; t < 50; ++t) {
        MatFq a(F, n, n), b(F, n, n);
        for (auto& v : a.a) v = (uint8_t)(rng() % q);
        for (auto& v : b.a) v = (uint8_t)(rng() % q);
        PackedRows pa, pb, pc;
        ops.pack(a, pa);
        ops.pack(b, pb);
        CHECK(ops.encode(pa) == a.code());
        CHECK(ops.unpack(pa) == a);
        ops.decode(a.code(), pc);
        CHECK(ops.encode(pc) == a.code());
        ops.mul(pa, pb, pc);
        CHECK(ops.encode(pc) == (a * b).code());
        if (a.det() != 0) {
          ops.inv(pa, pc);
          CHECK(ops.unpack(pc) == *a.inverse());
        }
      }
    }
  }
}

static void check_atlas_consistency(const GroupAtlas& at) {
  CHECK(at.elements.size() == at.order);
  CHECK(std::is_sorted(at.elements.begin(), at.elements.end()));
  CHECK(at.class_rep[0] == at.identity_code());
  CHECK(at.class_order[0] == 1);

  uint64_t total = 0;
  for (uint32_t c = 0; c < at.K; ++c) {
    total += at.class_size[c];
    CHECK(at.order % at.class_size[c] == 0 /* orbit stabilizer */);
    CHECK(at.class_map[at.class_rep[c]] == c);
    CHECK(at.class_order[at.inverse_class[c]] == at.class_order[c]);
    /* canonical sort key is monotone */
    if (c + 1 < at.K) {
      auto ka = std::make_tuple(at.class_order[c], at.class_size[c],
                                at.class_rep[c]);
      auto kb = std::make_tuple(at.class_order[c + 1], at.class_size[c + 1],
                                at.class_rep[c + 1]);
      CHECK(ka < kb);
    }
    /* members grouped and sorted; the representative is the least */
    uint64_t lo = at.class_offset[c], hi = at.class_offset[c + 1];
    CHECK(hi - lo == at.class_size[c]);
    CHECK(at.by_class[lo] == at.class_rep[c]);
    for (uint64_t t = lo; t < hi; ++t) {
      CHECK(at.class_map[at.by_class[t]] == c);
      if (t > lo) CHECK(at.by_class[t - 1] < at.by_class[t]);
    }
    /* order and powers of the representative */
    uint64_t pw = at.class_rep[c];
    for (uint32_t s = 1; s < at.class_order[c]; ++s) {
      CHECK(pw != at.identity_code());
      CHECK(at.class_of(pw) == at.power_class[c][s]);
      pw = at.mul_codes(pw, at.class_rep[c]);
    }
    CHECK(pw == at.identity_code());
    CHECK(at.power_class[c][0] == 0);
    if (at.class_order[c] > 1) CHECK(at.power_class[c][1] == c);
    CHECK(at.exponent % at.class_order[c] == 0);
  }
  CHECK(total == at.order);
}

TEST_CASE("small atlases have the known class structure") {
  auto gl22 = atlas_of(GroupKind::GL, 2, 2);
  CHECK(gl22->order == 6);
  CHECK(gl22->K == 3);
  CHECK(gl22->class_size == std::vector<uint64_t>{1, 3, 2});
  CHECK(gl22->class_order == std::vector<uint32_t>{1, 2, 3});
  CHECK(gl22->transvection_class == 1);
  check_atlas_consistency(*gl22);

  auto sl23 = atlas_of(GroupKind::SL, 2, 3);
  CHECK(sl23->order == 24);
  CHECK(sl23->K == 7);
  check_atlas_consistency(*sl23);
  /* two transvection classes of size 4 each in SL_2(3) */
  uint64_t n_transv = 0;
  for (uint32_t c = 0; c < sl23->K; ++c)
    if (sl23->class_order[c] == 3 && sl23->class_fix_dim[c] == 1)
      n_transv += sl23->class_size[c];
  CHECK(n_transv == 8);

  auto sl32 = atlas_of(GroupKind::SL, 3, 2);
  CHECK(sl32->order == 168);
  CHECK(sl32->K == 6);
  CHECK(sl32->class_size[sl32->transvection_class] == 21);
  check_atlas_consistency(*sl32);

  auto gl23 = atlas_of(GroupKind::GL, 2, 3);
  CHECK(gl23->order == 48);
  CHECK(gl23->K == 8);
  CHECK(gl23->class_size[gl23->transvection_class] == 8);
  check_atlas_consistency(*gl23);
}

TEST_CASE("frozen class counts across the small roster") {
  struct Row { GroupKind k; int n, q; uint32_t classes; };
  const Row rows[] = {
      {GroupKind::GL, 2, 4, 15}, {GroupKind::GL, 2, 5, 24},
      {GroupKind::GL, 2, 7, 48}, {GroupKind::GL, 2, 8, 63},
      {GroupKind::GL, 2, 9, 80}, {GroupKind::GL, 3, 3, 24},
      {GroupKind::SL, 2, 4, 5},  {GroupKind::SL, 2, 5, 9},
      {GroupKind::SL, 2, 7, 11}, {GroupKind::SL, 2, 8, 9},
      {GroupKind::SL, 2, 9, 13}, {GroupKind::SL, 3, 3, 12},
      {GroupKind::GL, 4, 2, 14},
  };
  for (const auto& r : rows) {
    auto at = atlas_of(r.k, r.n, r.q);
    CAPTURE(at->name());
    CHECK(at->K == r.classes);
    CHECK(at->order == group_order(r.k, r.n, r.q));
    check_atlas_consistency(*at);
  }
}

/* independent transvection count: I + v phi^T over pairs with
   phi(v) = 0, v and phi nonzero, modulo the scaling action. */
static uint64_t transvection_count(int n, int q) {
  return (ipow(q, n) - 1) * (ipow(q, n - 1) - 1) / (q - 1);
}

TEST_CASE("transvection classes cover the rank-one unipotents") {
  struct Row { GroupKind k; int n, q; };
  const Row rows[] = {{GroupKind::GL, 2, 3}, {GroupKind::GL, 3, 2},
                      {GroupKind::GL, 3, 3}, {GroupKind::SL, 3, 3},
                      {GroupKind::SL, 2, 5}, {GroupKind::GL, 4, 2}};
  for (const auto& r : rows) {
    auto at = atlas_of(r.k, r.n, r.q);
    CAPTURE(at->name());
    uint64_t total = 0;
    MatFq id = MatFq::identity(*at->F, at->n);
    for (uint32_t c = 0; c < at->K; ++c) {
      MatFq rep = at->mat_of(at->class_rep[c]);
      MatFq u = rep - id;
      if (u.rank() == 1 && (u * u).rank() == 0) total += at->class_size[c];
    }
    CHECK(total == transvection_count(r.n, r.q));
    /* the distinguished class is one of them */
    MatFq t = id;
    t.at(0, 1) = 1;
    CHECK(at->class_of(t.code()) == (uint16_t)at->transvection_class);
  }
  /* all transvections are conjugate in the general linear group */
  auto gl33 = atlas_of(GroupKind::GL, 3, 3);
  CHECK(gl33->class_size[gl33->transvection_class] ==
        transvection_count(3, 3));
  /* and inside the special linear group for n >= 3 as well */
  auto sl33 = atlas_of(GroupKind::SL, 3, 3);
  CHECK(sl33->class_size[sl33->transvection_class] == 104);
}

TEST_CASE("class map is constant on conjugacy orbits") {
  for (auto desc : {GroupDesc{GroupKind::GL, 2, 3}, GroupDesc{GroupKind::SL, 2, 3},
                    GroupDesc{GroupKind::GL, 2, 2}}) {
    auto at = atlas_of(desc);
    for (uint32_t g : at->elements)
      for (uint32_t x : at->elements) {
        uint64_t conj = at->mul_codes(at->mul_codes(g, x), at->inv_code(g));
        CHECK(at->class_of(conj) == at->class_of(x));
      }
  }
}

TEST_CASE("group closure and membership on a random sample") {
  std::mt19937 rng(5);
  auto at = atlas_of(GroupKind::GL, 2, 4);
  for (int t = 0; t < 300; ++t) {
    uint32_t a = at->elements[rng() % at->elements.size()];
    uint32_t b = at->elements[rng() % at->elements.size()];
    uint64_t c = at->mul_codes(a, b);
    CHECK(at->is_member(c));
    CHECK(at->mul_codes(a, at->inv_code(a)) == at->identity_code());
    CHECK(at->mat_of(a).det() != 0);
  }
  /* non-members are flagged */
  MatFq z(*at->F, 2, 2);
  CHECK_FALSE(at->is_member(z.code()));
  CHECK_THROWS_AS(at->class_of(z.code()), NotInDomain);
}

TEST_CASE("determinant splits the general linear group evenly") {
  auto at = atlas_of(GroupKind::GL, 2, 5);
  std::map<int, uint64_t> mass;
  for (uint32_t c = 0; c < at->K; ++c) mass[at->class_det[c]] += at->class_size[c];
  CHECK(mass.size() == 4u);
  for (auto& [d, m] : mass) {
    CHECK(d != 0);
    CHECK(m == at->order / 4);
  }
  auto sl = atlas_of(GroupKind::SL, 2, 5);
  for (uint32_t c = 0; c < sl->K; ++c) CHECK(sl->class_det[c] == 1);
}

TEST_CASE("class predicate flags match the dense predicates") {
  auto at = atlas_of(GroupKind::GL, 2, 3);
  MatFq id = MatFq::identity(*at->F, 2);
  for (uint32_t c = 0; c < at->K; ++c) {
    MatFq rep = at->mat_of(at->class_rep[c]);
    CHECK(at->class_rss[c] == (is_regular_semisimple(rep) ? 1 : 0));
    CHECK(at->class_no_fix[c] == (fixes_no_vector(rep) ? 1 : 0));
    CHECK(at->class_fix_dim[c] == 2 - (rep - id).rank());
    CHECK(at->class_det[c] == rep.det());
  }
  CHECK(at->class_fix_dim[0] == 2);
  CHECK(at->class_fix_dim[at->transvection_class] == 1);
  CHECK_FALSE(at->class_rss[0]);
  /* an order 8 element generates a torus acting without fixed vectors */
  bool found = false;
  for (uint32_t c = 0; c < at->K; ++c)
    if (at->class_order[c] == 8 && at->class_rss[c] && at->class_no_fix[c])
      found = true;
  CHECK(found);
}

TEST_CASE("degree one and the trivial special linear group work") {
  auto gl1 = atlas_of(GroupKind::GL, 1, 5);
  CHECK(gl1->order == 4);
  CHECK(gl1->K == 4);
  check_atlas_consistency(*gl1);
  auto sl1 = atlas_of(GroupKind::SL, 1, 5);
  CHECK(sl1->order == 1);
  CHECK(sl1->K == 1);
}

TEST_CASE("binary special and general linear atlases are shared") {
  auto a = atlas_of(GroupKind::SL, 3, 2);
  auto b = atlas_of(GroupKind::GL, 3, 2);
  CHECK(a.get() == b.get());
  CHECK(a->kind == GroupKind::GL);
}

TEST_CASE("budget violations are rejected up front") {
  CHECK_THROWS_AS(build_atlas(GroupKind::GL, 6, 3), BudgetExceeded);
  CHECK_THROWS_AS(build_atlas(GroupKind::GL, 4, 4), BudgetExceeded);
  CHECK_THROWS_AS(atlas_of(GroupKind::GL, 2, 6), UnsupportedField);
  Limits tight;
  tight.class_cap = 2;
  CHECK_THROWS_AS(build_atlas(GroupKind::GL, 2, 2, tight), BudgetExceeded);
}
