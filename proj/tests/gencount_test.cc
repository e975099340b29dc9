#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rankscope/gencount.hh"

using namespace rankscope;

static uint32_t pick_regss_nofix(const GroupAtlas& at) {
  for (uint32_t c = 0; c < at.K; ++c)
    if (at.class_rss[c] && at.class_no_fix[c]) return c;
  throw std::runtime_error("no eligible class");
}

TEST_CASE("convolution oracle bookkeeping") {
  auto at = atlas_of(GroupKind::SL, 3, 2);
  auto f = convolution_oracle(*at, 4);
  REQUIRE(f.size() == 5);
  uint32_t t = (uint32_t)at->transvection_class;
  for (uint32_t c = 0; c < at->K; ++c) {
    CHECK(f[0][c] == (c == 0 ? 1 : 0));
    CHECK(f[1][c] == (c == t ? 1 : 0));
  }

  Limits tight = default_limits();
  tight.convolution_cap = 10;
  CHECK_THROWS_AS(convolution_oracle(*at, 4, tight), BudgetExceeded);
}

TEST_CASE("character formula matches the convolution oracle") {
  for (auto desc : {GroupDesc{GroupKind::SL, 3, 2}, GroupDesc{GroupKind::SL, 3, 3}}) {
    CAPTURE(desc.name());
    auto tab = table_of(desc);
    auto f = convolution_oracle(*tab->atlas, 8);
    for (int l = 1; l <= 8; ++l)
      for (uint32_t c = 0; c < tab->K; ++c) {
        CAPTURE(l);
        CAPTURE(c);
        CHECK(frobenius_count(*tab, l, c) == f[l][c]);
      }
  }
}

TEST_CASE("identity words pair generators with inverses") {
  for (auto desc : {GroupDesc{GroupKind::SL, 3, 2}, GroupDesc{GroupKind::SL, 3, 3}}) {
    CAPTURE(desc.name());
    auto tab = table_of(desc);
    const auto& at = *tab->atlas;
    uint32_t t = (uint32_t)at.transvection_class;
    REQUIRE(at.inverse_class[t] == t); /* the class happens to be symmetric */
    CHECK(frobenius_count(*tab, 2, 0) == (int64_t)at.class_size[t]);
  }
}

TEST_CASE("short words cannot reach classes that move every vector") {
  for (auto desc : {GroupDesc{GroupKind::SL, 3, 2}, GroupDesc{GroupKind::SL, 3, 3}}) {
    CAPTURE(desc.name());
    auto tab = table_of(desc);
    const auto& at = *tab->atlas;
    for (uint32_t c = 0; c < at.K; ++c) {
      if (!at.class_no_fix[c]) continue;
      CHECK(frobenius_count(*tab, 1, c) == 0);
      CHECK(frobenius_count(*tab, 2, c) == 0);
    }
  }
}

TEST_CASE("rank slices reassemble the deviation") {
  auto tab = table_of(GroupKind::SL, 3, 3);
  const auto& at = *tab->atlas;
  uint32_t g = pick_regss_nofix(at);
  for (int l = 3; l <= 8; ++l) {
    CAPTURE(l);
    auto s = rank_split_sums(*tab, l, g);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == 0.0L);
    long double total = s[1] + s[2] + s[3];
    long double lhs = total + 1.0L;
    long double rhs = (long double)frobenius_count(*tab, l, g) *
                      (long double)at.order /
                      std::pow((long double)at.class_size[at.transvection_class],
                               (long double)l);
    CHECK(std::fabs(lhs - rhs) < 1e-6L * (1.0L + std::fabs(rhs)));
  }
  CHECK(rank_split_sums(*tab, 3, g)[1] < 0.0L);
}

TEST_CASE("rank one character sums obey the fixed point law") {
  auto t32 = table_of(GroupKind::SL, 3, 2);
  auto rep = rank_one_sum_check(*t32);
  REQUIRE(rep.rank_one_irreps.size() == 1);
  CHECK(t32->dims[rep.rank_one_irreps[0]] == 6);
  REQUIRE(rep.rows.size() == 2); /* the two classes of order seven */
  for (const auto& row : rep.rows) {
    CHECK(t32->atlas->class_order[row.g_class] == 7);
    CHECK(row.sum == -1);
    CHECK_FALSE(row.matches_minus_two);
  }
  CHECK_FALSE(rep.all_minus_two);

  auto t33 = table_of(GroupKind::SL, 3, 3);
  auto rep3 = rank_one_sum_check(*t33);
  uint64_t dims = 0;
  for (uint32_t r : rep3.rank_one_irreps) dims += t33->dims[r];
  CHECK(dims == 25); /* q^n - 2 */
  CHECK(!rep3.rows.empty());
  for (const auto& row : rep3.rows) CHECK(row.sum == -1);
  CHECK_FALSE(rep3.all_minus_two);
}

TEST_CASE("deviation table of a regular class") {
  auto tab = table_of(GroupKind::SL, 3, 3);
  const auto& at = *tab->atlas;
  uint32_t g = pick_regss_nofix(at);
  auto gt = sts_deviation_table(*tab, g, 8);
  REQUIRE(gt.rows.size() == 8);
  CHECK(gt.g_class == g);

  CHECK(gt.rows[0].deviation == 1.0L); /* lengths below n reach nothing */
  CHECK(gt.rows[1].deviation == 1.0L);
  CHECK(gt.rows[0].frobenius == 0);
  CHECK(gt.rows[1].frobenius == 0);
  CHECK(gt.rows[2].frobenius > 0);
  for (const auto& row : gt.rows) {
    REQUIRE(row.oracle.has_value());
    CHECK(*row.oracle == row.frobenius);
  }
  CHECK(gt.rows[3].deviation > 0.0L);
  for (int l = 4; l <= 8; ++l) {
    CAPTURE(l);
    long double ratio = gt.rows[l - 1].deviation / gt.rows[l - 2].deviation;
    CHECK(ratio >= 1.0L / 6);
    CHECK(ratio <= 2.0L / 3);
  }

  CHECK_THROWS_AS(sts_deviation_table(*tab, 0, 4), InvalidClass);
  CHECK_THROWS_AS(
      sts_deviation_table(*tab, (uint32_t)at.transvection_class, 4),
      InvalidClass);
}

TEST_CASE("character values stay small on regular semisimple classes") {
  for (auto desc : {GroupDesc{GroupKind::SL, 3, 2}, GroupDesc{GroupKind::SL, 3, 3}}) {
    CAPTURE(desc.name());
    auto tab = table_of(desc);
    const auto& at = *tab->atlas;
    for (uint32_t c = 0; c < at.K; ++c) {
      if (!at.class_rss[c]) continue;
      for (uint32_t r = 0; r < tab->K; ++r)
        CHECK(std::abs(tab->val[r][c]) <= 6.0L + 1e-9L);
    }
  }
}
