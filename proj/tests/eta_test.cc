#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "rankscope/eta.hh"

using namespace rankscope;

static OrderedPartition pp(const std::string& s) { return parse_partition(s); }

TEST_CASE("partition grammar and enumeration") {
  CHECK(pp("[2,1]").parts == std::vector<int>{2, 1});
  CHECK(pp("[2,1]").text() == "[2,1]");
  CHECK(pp(" [ 3 , 1 , 1 ] ").sum() == 5);
  CHECK_THROWS_AS(pp("2,1"), NotInDomain);
  CHECK_THROWS_AS(pp("[]"), NotInDomain);
  CHECK_THROWS_AS(pp("[1,2]"), NotInDomain);
  CHECK_THROWS_AS(pp("[0]"), NotInDomain);
  CHECK_THROWS_AS(pp("[2,,1]"), NotInDomain);

  auto p4 = partitions_of(4);
  REQUIRE(p4.size() == 5);
  CHECK(p4[0].text() == "[4]");
  CHECK(p4[1].text() == "[3,1]");
  CHECK(p4[2].text() == "[2,2]");
  CHECK(p4[3].text() == "[2,1,1]");
  CHECK(p4[4].text() == "[1,1,1,1]");
  CHECK(partitions_of(5).size() == 7);
}

TEST_CASE("dominance order") {
  for (const auto& d : partitions_of(4)) CHECK(dominance(d, d));
  CHECK(dominance(pp("[1,1,1]"), pp("[3]")));
  CHECK(dominance(pp("[2,2]"), pp("[3,1]")));
  CHECK_FALSE(dominance(pp("[3,1]"), pp("[2,2]")));
  CHECK_FALSE(dominance(pp("[3,1]"), pp("[2,1,1]")));
  CHECK(dominance(pp("[2,1,1]"), pp("[2,2]")));
  CHECK_THROWS_AS(dominance(pp("[2,1]"), pp("[2,2]")), NotInDomain);
}

TEST_CASE("joint two-sided fixed counts") {
  auto jc = joint_character(3, 1, 2);
  const auto& big = *jc->big;
  CHECK((*jc)(0, 0) == 8);
  CHECK((*jc)((uint32_t)big.transvection_class, 0) == 4);

  auto j2 = joint_character(2, 1, 2);
  bool saw_order3 = false;
  for (uint32_t c = 0; c < j2->big->K; ++c)
    if (j2->big->class_order[c] == 3) {
      saw_order3 = true;
      CHECK((*j2)(c, 0) == 1);
    }
  CHECK(saw_order3);

  /* at the identity of the small factor the count is q^(k dim ker(g-1)) */
  auto j32 = joint_character(3, 2, 2);
  for (uint32_t c = 0; c < j32->big->K; ++c)
    CHECK((*j32)(c, 0) ==
          (int64_t)ipow(2, 2u * j32->big->class_fix_dim[c]));
  CHECK_THROWS_AS(joint_character(2, 3, 2), NotInDomain);
}

TEST_CASE("flag characters count fixed flags") {
  auto at23 = atlas_of(GroupKind::GL, 2, 3);
  auto row = flag_permutation_character(*at23, pp("[1,1]"));
  CHECK(guarded_round(row[0]) == 4); /* projective line over F_3 */

  auto at32 = atlas_of(GroupKind::GL, 3, 2);
  auto tab32 = table_of(GroupKind::GL, 3, 2);
  auto grass = flag_permutation_character(*at32, pp("[2,1]"));
  CHECK(guarded_round(grass[0]) == 7);

  /* against generic induction from the explicit block stabilizer */
  std::vector<uint32_t> sub;
  for (uint32_t code : at32->elements) {
    MatFq g = at32->mat_of(code);
    if (g.at(2, 0) == 0 && g.at(2, 1) == 0) sub.push_back(code);
  }
  auto induced = induced_character(*at32, sub, [](uint64_t) { return cplx{1, 0}; });
  for (uint32_t c = 0; c < at32->K; ++c)
    CHECK(std::abs(grass[c] - induced[c]) < 1e-9L);

  auto whole = flag_permutation_character(*at32, pp("[3]"));
  for (uint32_t c = 0; c < at32->K; ++c)
    CHECK(std::abs(whole[c] - cplx{1, 0}) < 1e-12L);

  for (uint32_t r = 0; r < tab32->K; ++r) {
    int64_t m = guarded_round(tab32->inner(grass, tab32->val[r]));
    CHECK(m >= 0);
  }

  Limits tight = default_limits();
  tight.flag_cap = 10; /* below the 21 complete flags */
  CHECK_THROWS_AS(build_flag_space(*at32, pp("[1,1,1]"), tight), BudgetExceeded);
  CHECK_THROWS_AS(build_flag_space(*at32, pp("[2,2]")), NotInDomain);
}

TEST_CASE("distinguished series constituents") {
  auto t32 = table_of(GroupKind::GL, 3, 2);
  CHECK(sps_constituent(*t32, pp("[3]")) == t32->trivial_id);
  CHECK(t32->dims[sps_constituent(*t32, pp("[2,1]"))] == 6);
  uint32_t st32 = sps_constituent(*t32, pp("[1,1,1]"));
  CHECK(t32->dims[st32] == 8);

  /* the full-flag constituent is the largest piece of that character */
  auto borel = flag_permutation_character(*t32->atlas, pp("[1,1,1]"));
  uint64_t biggest = 0;
  for (uint32_t r = 0; r < t32->K; ++r)
    if (guarded_round(t32->inner(borel, t32->val[r])) > 0)
      biggest = std::max(biggest, t32->dims[r]);
  CHECK(t32->dims[st32] == biggest);

  auto t23 = table_of(GroupKind::GL, 2, 3);
  CHECK(t23->dims[sps_constituent(*t23, pp("[1,1]"))] == 3);
  auto t22 = table_of(GroupKind::GL, 2, 2);
  CHECK(t22->dims[sps_constituent(*t22, pp("[1,1]"))] == 2);
  auto t33 = table_of(GroupKind::GL, 3, 3);
  CHECK(t33->dims[sps_constituent(*t33, pp("[2,1]"))] == 12);
  auto t42 = table_of(GroupKind::GL, 4, 2);
  CHECK(t42->dims[sps_constituent(*t42, pp("[2,2]"))] == 20);
  CHECK(t42->dims[sps_constituent(*t42, pp("[3,1]"))] == 14);

  auto sl23 = table_of(GroupKind::SL, 2, 3);
  CHECK_THROWS_AS(sps_constituent(*sl23, pp("[1,1]")), NotInDomain);
}

TEST_CASE("split principal series are irreducible") {
  auto t23 = table_of(GroupKind::GL, 2, 3);
  auto row = split_series_character(*t23, pp("[1,1]"), {pp("[1]"), pp("[1]")},
                                    {0, 1});
  CHECK(guarded_round(row[0]) == 4);
  uint32_t id = match_irrep(*t23, row);
  CHECK(t23->dims[id] == 4);

  /* ordering of the characters does not matter */
  auto swapped = split_series_character(*t23, pp("[1,1]"),
                                        {pp("[1]"), pp("[1]")}, {1, 0});
  for (uint32_t c = 0; c < t23->K; ++c)
    CHECK(std::abs(row[c] - swapped[c]) < 1e-9L);

  CHECK_THROWS_AS(split_series_character(*t23, pp("[1,1]"),
                                         {pp("[1]"), pp("[1]")}, {0, 2}),
                  NotInDomain);
  CHECK_THROWS_AS(split_series_character(*t23, pp("[1,1]"),
                                         {pp("[1]"), pp("[1]")}, {0, 0}),
                  NotInDomain);

  /* one block reproduces the distinguished constituent itself */
  auto t32 = table_of(GroupKind::GL, 3, 2);
  auto single = split_series_character(*t32, pp("[3]"), {pp("[2,1]")}, {0});
  uint32_t rho = sps_constituent(*t32, pp("[2,1]"));
  for (uint32_t c = 0; c < t32->K; ++c)
    CHECK(std::abs(single[c] - t32->val[rho][c]) < 1e-9L);
}

TEST_CASE("first part controls the tensor rank of series constituents") {
  for (auto desc : {GroupDesc{GroupKind::GL, 3, 2}, GroupDesc{GroupKind::GL, 3, 3},
                    GroupDesc{GroupKind::GL, 4, 2}}) {
    CAPTURE(desc.name());
    auto tab = table_of(desc);
    auto rows = corank_fact_check(*tab);
    REQUIRE(rows.size() == partitions_of(desc.n).size());
    for (const auto& row : rows) {
      CAPTURE(row.D.text());
      CHECK(row.expected == desc.n - row.D.parts[0]);
      CHECK(row.ok);
      CHECK(row.plain == row.expected);
      CHECK(row.strict_r == row.expected);
    }
  }
}

TEST_CASE("multiplicity spaces at column count one") {
  auto t23 = table_of(GroupKind::GL, 2, 3);
  auto c3 = table_of(GroupKind::GL, 1, 3);
  uint64_t total = 0;
  for (uint32_t tau = 0; tau < c3->K; ++tau) {
    auto m = multiplicity_space_character(*t23, *c3, tau);
    total += c3->dims[tau] * m.dim;
    if (tau == c3->trivial_id) {
      CHECK(m.dim == 5);
      CHECK(m.mult[t23->trivial_id] == 2);
    } else {
      CHECK(m.dim == 4);
      CHECK(m.mult[t23->trivial_id] == 0);
    }
  }
  CHECK(total == 9); /* q^(n k) */

  auto t32 = table_of(GroupKind::GL, 3, 2);
  auto c2 = table_of(GroupKind::GL, 1, 2);
  auto m = multiplicity_space_character(*t32, *c2, 0);
  CHECK(m.dim == 8);
  CHECK(m.mult[t32->trivial_id] == 2);
  CHECK(m.mult[sps_constituent(*t32, pp("[2,1]"))] == 1);
}

TEST_CASE("rank correspondence on the order 322560 group") {
  auto big = table_of(GroupKind::GL, 4, 2);
  auto small = table_of(GroupKind::GL, 1, 2);
  auto rep = eta_correspondence(*big, *small, EtaMode::u_rank);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].window_ok);
  auto u = u_structure_of({GroupKind::GL, 4, 2});
  CHECK(u_rank_profile(*big, rep.rows[0].eta, *u).u_rank == 1);
  CHECK(eta_of(*big, *small, 0, EtaMode::u_rank) == rep.rows[0].eta);

  auto g2 = table_of(GroupKind::GL, 2, 2);
  auto rep2 = eta_correspondence(*big, *g2, EtaMode::u_rank);
  REQUIRE(rep2.rows.size() == g2->K);
  std::set<uint32_t> images;
  for (const auto& row : rep2.rows) {
    CHECK(row.window_ok);
    CHECK(u_rank_profile(*big, row.eta, *u).u_rank == 2);
    images.insert(row.eta);
  }
  CHECK(images.size() == g2->K);

  auto reps = eta_correspondence(*big, *g2, EtaMode::strict);
  for (const auto& row : reps.rows) {
    CHECK(row.in_domain);
    CHECK(tensor_rank(*big, row.eta, RankMode::strict) == 2);
  }

  auto ex = exhaustion_check(*big, *small);
  CHECK(ex.k == 1);
  CHECK(!ex.rank_k.empty());
  for (uint32_t r : ex.missing)
    CHECK(std::find(ex.rank_k.begin(), ex.rank_k.end(), r) != ex.rank_k.end());
}

TEST_CASE("rank correspondence reproduces the column space picture") {
  auto big = table_of(GroupKind::GL, 4, 3);
  auto small = table_of(GroupKind::GL, 1, 3);
  auto rep = eta_correspondence(*big, *small, EtaMode::u_rank);
  REQUIRE(rep.rows.size() == 2);

  for (const auto& row : rep.rows) {
    CAPTURE(row.tau);
    CHECK(row.window_ok);
    if (row.tau == small->trivial_id) {
      /* two copies of the trivial piece split off and the rest is simple */
      CHECK(row.eta_dim == 39);
      REQUIRE(row.constituents.size() == 2);
      CHECK(row.constituents[0].first == big->trivial_id);
      CHECK(row.constituents[0].second == 2);
      CHECK(row.constituents[1] == std::pair<uint32_t, int64_t>{row.eta, 1});
    } else {
      /* the twisted space is already irreducible */
      CHECK(row.eta_dim == 40);
      REQUIRE(row.constituents.size() == 1);
      CHECK(row.constituents[0] == std::pair<uint32_t, int64_t>{row.eta, 1});
    }
  }

  auto reps = eta_correspondence(*big, *small, EtaMode::strict);
  for (uint32_t tau = 0; tau < small->K; ++tau)
    CHECK(reps.rows[tau].eta == rep.rows[tau].eta);

  auto ex = exhaustion_check(*big, *small);
  CHECK(ex.complete);

  CHECK_THROWS_AS(split_series_character(*big, pp("[2,2]"),
                                         {pp("[2]"), pp("[2]")}, {0, 1}),
                  BudgetExceeded);
  CHECK_THROWS_AS(eta_correspondence(*big, *table_of(GroupKind::GL, 3, 3),
                                     EtaMode::u_rank),
                  NotInDomain);
}
