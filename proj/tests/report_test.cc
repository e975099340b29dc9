#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rankscope/gencount.hh"
#include "rankscope/report.hh"

using namespace rankscope;
namespace fs = std::filesystem;

static int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
               std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = run_command(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

static std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("rounding is half away from zero") {
  CHECK(round_half_away(0.0L) == 0);
  CHECK(round_half_away(0.49L) == 0);
  CHECK(round_half_away(0.5L) == 1);
  CHECK(round_half_away(-0.5L) == -1);
  CHECK(round_half_away(2.5L) == 3);
  CHECK(round_half_away(-2.5L) == -3);
  CHECK(round_half_away(3.0L) == 3);
  CHECK(round_half_away(-1.2L) == -1);
}

TEST_CASE("figure kinds have stable names") {
  const auto& kinds = all_figure_kinds();
  REQUIRE(kinds.size() == 7);
  std::set<std::string> names;
  for (auto kind : kinds) {
    CHECK(figure_from_name(figure_name(kind)) == kind);
    names.insert(figure_name(kind));
  }
  CHECK(names.size() == 7);
  CHECK(names.count("count_by_rank") == 1);
  CHECK(names.count("sts_deviation") == 1);
  CHECK_THROWS_AS(figure_from_name("histogram"), NotInDomain);
}

TEST_CASE("figure cells aggregate the profile table") {
  GroupDesc desc{GroupKind::GL, 3, 2};
  auto tab = table_of(desc);
  auto u = u_structure_of(desc);
  auto profs = profile_all(*tab, *u);

  for (auto kind : all_figure_kinds()) {
    if (kind == FigureKind::sts_deviation) {
      CHECK_THROWS_AS(make_figure(*tab, profs, kind), NotInDomain);
      continue;
    }
    auto fig = make_figure(*tab, profs, kind);
    CHECK(fig.kind == kind);
    CHECK(fig.group.name() == "GL(3,2)");
    CHECK(fig.analogue_of ==
          std::string("Figure ") + figure_name(kind) + " at n=8,q=3");
    uint64_t total = 0;
    std::set<std::pair<int64_t, int64_t>> cells;
    for (const auto& row : fig.rows) {
      total += row.count;
      CHECK(cells.insert({row.x, row.y_finite ? row.y : INT64_MIN}).second);
    }
    CHECK(total == tab->K);
  }

  /* the trivial character sits at the origin of the ratio/dimension plot */
  auto cr_dim = make_figure(*tab, profs, FigureKind::cr_vs_dim);
  bool origin = false;
  for (const auto& row : cr_dim.rows)
    if (row.x == 0 && row.y_finite && row.y == 0) {
      origin = true;
      CHECK(row.count >= 1);
      CHECK(row.raw_x == 0.0L);
      CHECK(row.raw_y == 0.0L);
    }
  CHECK(origin);

  /* full tensor rank pins the ratio at 1/(q^{n-1} - 1) = 1/3 */
  auto cr_tr = make_figure(*tab, profs, FigureKind::cr_vs_trank);
  size_t full = 0;
  for (const auto& p : profs)
    if (p.tensor_rank == 3) ++full;
  REQUIRE(full > 0);
  uint64_t seen = 0;
  for (const auto& row : cr_tr.rows) {
    if (row.x != 3) continue;
    seen += row.count;
    REQUIRE(row.y_finite);
    CHECK(row.y == 2);
    CHECK(std::fabs(row.raw_y - std::log2(3.0L)) < 1e-12L);
  }
  CHECK(seen == full);
}

TEST_CASE("rank counts figure matches the two marginals") {
  GroupDesc desc{GroupKind::GL, 2, 3};
  auto tab = table_of(desc);
  auto u = u_structure_of(desc);
  auto profs = profile_all(*tab, *u);
  auto fig = make_figure(*tab, profs, FigureKind::count_by_rank);

  std::map<int64_t, uint64_t> by_u, by_t;
  for (const auto& p : profs) {
    ++by_u[p.u_rank];
    ++by_t[p.tensor_rank];
  }
  std::map<int64_t, uint64_t> fig_u, fig_t;
  for (const auto& row : fig.rows) {
    REQUIRE(row.y_finite);
    CHECK(row.raw_x == (long double)row.x);
    CHECK(row.raw_y == (long double)row.y);
    fig_u[row.x] += row.count;
    fig_t[row.y] += row.count;
    if (row.x == 0 && row.y == 0) CHECK(row.count == 2);
  }
  CHECK(fig_u == by_u);
  CHECK(fig_t == by_t);
}

TEST_CASE("figure csv round trips") {
  GroupDesc desc{GroupKind::GL, 3, 2};
  auto tab = table_of(desc);
  auto profs = profile_all(*tab, *u_structure_of(desc));

  std::vector<FigureDataset> figs;
  for (auto kind : all_figure_kinds())
    if (kind != FigureKind::sts_deviation)
      figs.push_back(make_figure(*tab, profs, kind));
  figs.push_back(make_sts_figure(*table_of(GroupKind::SL, 3, 2), 6));

  for (const auto& fig : figs) {
    CAPTURE(figure_name(fig.kind));
    std::string text = figure_csv(fig);
    CHECK(text.rfind("x,y,count,raw_x,raw_y\n", 0) == 0);
    auto rows = parse_figure_csv(text);
    REQUIRE(rows.size() == fig.rows.size());
    for (size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == fig.rows[i]);
    FigureDataset copy = fig;
    copy.rows = rows;
    CHECK(figure_csv(copy) == text);
  }

  /* a vanishing ratio is written as the "inf" sentinel and survives the trip */
  FigureDataset inf_fig;
  inf_fig.kind = FigureKind::cr_vs_dim;
  inf_fig.rows.push_back({2, false, 0, 3, 1.5L, 0.0L});
  inf_fig.rows.push_back({2, true, -1, 1, 1.5L, -0.75L});
  std::string text = figure_csv(inf_fig);
  CHECK(text.find("2,inf,3,") != std::string::npos);
  auto rows = parse_figure_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == inf_fig.rows[0]);
  CHECK(rows[1] == inf_fig.rows[1]);
}

TEST_CASE("deviation figure tracks the word counts") {
  auto tab = table_of(GroupKind::SL, 3, 2);
  int g = first_regss_no_fix_class(*tab->atlas);
  REQUIRE(g >= 0);

  auto fig = make_sts_figure(*tab, 6);
  CHECK(fig.kind == FigureKind::sts_deviation);
  REQUIRE(fig.rows.size() == 6);

  auto gen = sts_deviation_table(*tab, (uint32_t)g, 6);
  for (size_t i = 0; i < fig.rows.size(); ++i) {
    const auto& row = fig.rows[i];
    CHECK(row.x == (int64_t)(i + 1));
    CHECK(row.count == 1);
    CHECK(row.raw_x == (long double)row.x);
    long double dev = gen.rows[i].deviation;
    REQUIRE(row.y_finite);
    if (i < 2) {
      CHECK(dev == 1.0L);
      CHECK(row.y == 0);
      CHECK(std::fabs(row.raw_y) < 1e-12L);
    } else {
      CHECK(std::fabs(row.raw_y + std::log2(std::fabs(dev))) < 1e-9L);
    }
  }

  auto same = make_sts_figure(*tab, 6, g);
  REQUIRE(same.rows.size() == fig.rows.size());
  for (size_t i = 0; i < fig.rows.size(); ++i) CHECK(same.rows[i] == fig.rows[i]);
}

TEST_CASE("table export carries the class data") {
  auto tab = table_of(GroupKind::GL, 2, 2);
  auto j = nlohmann::json::parse(table_json(*tab));
  CHECK(j["group"] == "GL(2,2)");
  CHECK(j["order"] == 6);
  REQUIRE(j["classes"].size() == 3);
  uint64_t total = 0;
  for (const auto& c : j["classes"]) {
    total += c["size"].get<uint64_t>();
    CHECK(c["flags"]["regular_semisimple"].is_boolean());
    CHECK(c["flags"]["fixes_no_vector"].is_boolean());
  }
  CHECK(total == 6);
  REQUIRE(j["irreps"].size() == 3);
  std::multiset<int> dims;
  for (const auto& r : j["irreps"]) {
    dims.insert(r["dim"].get<int>());
    REQUIRE(r["values"].size() == 3);
    for (const auto& v : r["values"]) REQUIRE(v.size() == 2);
  }
  CHECK(dims == std::multiset<int>{1, 1, 2});

  std::string csv = table_csv(*tab);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "irrep,dim,class_0,class_1,class_2");
  int data_lines = 0;
  while (std::getline(lines, line)) {
    ++data_lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(data_lines == 3);
}

TEST_CASE("profile export writes one row per irrep") {
  GroupDesc desc{GroupKind::GL, 3, 2};
  auto u = u_structure_of(desc);
  auto profs = profile_all(*table_of(desc), *u);
  std::string csv = profiles_csv(*u, profs);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "irrep,dim,cr_num,cr_den,m_0,m_1,u_rank,tensor_rank,strict_rank");
  int data_lines = 0;
  while (std::getline(lines, line)) ++data_lines;
  CHECK((uint32_t)data_lines == profs.size());

  /* odd special linear tables: refined strata cells and non-rational ratios */
  GroupDesc sdesc{GroupKind::SL, 2, 3};
  auto su = u_structure_of(sdesc);
  auto sprofs = profile_all(*table_of(sdesc), *su);
  std::string scsv = profiles_csv(*su, sprofs);
  CHECK(scsv.find('|') != std::string::npos);
  std::istringstream slines(scsv);
  REQUIRE(std::getline(slines, line));
  bool empty_ratio = false;
  while (std::getline(slines, line)) {
    auto first = line.find(',');
    auto second = line.find(',', first + 1);
    auto third = line.find(',', second + 1);
    if (third == second + 1) empty_ratio = true;
  }
  CHECK(empty_ratio);
}

TEST_CASE("matrix transform report round trips through json") {
  auto rep = make_ft_report(2, 2, 2, 2, true);
  REQUIRE(rep.brute_ft.has_value());
  CHECK(*rep.brute_ft == -2);
  auto j = nlohmann::json::parse(ft_report_json(rep));
  CHECK(j["m"] == 2);
  CHECK(j["closed_ft"] == "-2");
  CHECK(j["brute_ft"] == -2);
  CHECK(j["sign"] == -1);
  CHECK(j["count_rank"] == "6");
  CHECK(j["orthogonal"]["total"] == "2");
}

TEST_CASE("verify reports structured findings") {
  auto rep = run_verify({GroupKind::GL, 2, 3});
  CHECK(rep.group.name() == "GL(2,3)");
  CHECK(rep.ok);
  REQUIRE(!rep.checks.empty());
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.status == "ok");
  }
  CHECK(!rep.findings.empty());

  auto srep = run_verify({GroupKind::SL, 3, 3});
  CHECK(srep.ok);
  bool sums_reported = false;
  for (const auto& f : srep.findings)
    if (f.find("rank-one") != std::string::npos &&
        f.find("-1") != std::string::npos)
      sums_reported = true;
  CHECK(sums_reported);
}

TEST_CASE("command line transform and table paths") {
  std::string out;
  CHECK(cli({"ft", "--m", "2", "--n", "2", "--k", "2", "--q", "2", "--brute"},
            &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j["closed_ft"] == "-2");
  CHECK(j["brute_ft"] == -2);

  CHECK(cli({"table", "--group", "GL(2,2)", "--format", "csv"}, &out) == 0);
  CHECK(out.rfind("irrep,dim,", 0) == 0);

  CHECK(cli({"ranks", "--group", "GL(2,3)"}, &out) == 0);
  CHECK(out.rfind("irrep,dim,cr_num,cr_den,", 0) == 0);

  fs::path dir = fs::temp_directory_path() / "rankscope_report_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path table_file = dir / "table.json";
  CHECK(cli({"table", "--group", "GL(2,2)", "--out", table_file.string()}) == 0);
  auto jf = nlohmann::json::parse(slurp(table_file));
  CHECK(jf["group"] == "GL(2,2)");
  fs::remove_all(dir);
}

TEST_CASE("command line word counts agree with the oracle") {
  std::string out;
  CHECK(cli({"count", "--group", "SL(3,2)", "--g-auto-regss", "--ell", "4"},
            &out) == 0);
  auto j = nlohmann::json::parse(out);
  REQUIRE(j["rows"].size() == 4);
  CHECK(j["rows"][0]["ell"] == 1);
  CHECK(j["rows"][0]["frobenius"] == 0);
  for (const auto& row : j["rows"]) {
    REQUIRE(!row["oracle"].is_null());
    CHECK(row["frobenius"] == row["oracle"]);
  }
}

TEST_CASE("command line figure bundle") {
  fs::path dir = fs::temp_directory_path() / "rankscope_figsdir";
  fs::remove_all(dir);
  CHECK(cli({"figures", "--group", "GL(2,3)", "--out", dir.string()}) == 0);

  for (auto kind : all_figure_kinds())
    CHECK(fs::exists(dir / (std::string(figure_name(kind)) + ".csv")));
  auto meta = nlohmann::json::parse(slurp(dir / "figures_meta.json"));
  CHECK(meta["group"] == "GL(2,3)");
  CHECK(meta["files"].size() == 7);

  auto rows = parse_figure_csv(slurp(dir / "count_by_rank.csv"));
  bool origin = false;
  for (const auto& row : rows)
    if (row.x == 0 && row.y_finite && row.y == 0 && row.count == 2) origin = true;
  CHECK(origin);
  fs::remove_all(dir);
}

TEST_CASE("command line rejects malformed requests") {
  std::string out, err;
  CHECK(cli({}, &out, &err) == 2);
  CHECK(cli({"decompose"}, &out, &err) == 2);
  CHECK(cli({"table"}, &out, &err) == 2);
  CHECK(cli({"table", "--group", "XX(2,2)"}, &out, &err) == 2);
  CHECK(cli({"table", "--group", "GL(2,6)"}, &out, &err) == 2);
  CHECK(cli({"count", "--group", "SL(3,2)"}, &out, &err) == 2);
  CHECK(cli({"count", "--group", "SL(3,2)", "--g-class", "0"}, &out, &err) == 2);
  CHECK(cli({"count", "--group", "SL(3,2)", "--g-class", "4", "--g-auto-regss"},
            &out, &err) == 2);
  CHECK(cli({"table", "--group", "GL(6,5)"}, &out, &err) == 3);

  CHECK(cli({"--help"}, &out, &err) == 0);
  CHECK(out.find("table") != std::string::npos);
  CHECK(cli({"figures", "--help"}, &out, &err) == 0);
  CHECK(cli({"verify", "--group", "GL(2,2)"}, &out, &err) == 0);
}
