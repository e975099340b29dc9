#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rankscope/eta.hh"
#include "rankscope/gencount.hh"
#include "rankscope/mft.hh"

namespace rankscope {

/* ---- figure datasets --------------------------------------------- */

enum class FigureKind {
  cr_vs_dim,
  cr_vs_urank,
  cr_vs_trank,
  dim_vs_urank,
  dim_vs_trank,
  count_by_rank,
  sts_deviation,
};

const std::vector<FigureKind>& all_figure_kinds();
const char* figure_name(FigureKind kind);
FigureKind figure_from_name(const std::string& name);

/* nearest integer, halves away from zero */
long long round_half_away(long double v);

/* one aggregated cell.  x is always a finite integer; y may carry the
   "inf" sentinel (vanishing ratio or deviation, whose log scale is
   unbounded).  raw_x / raw_y hold the unrounded coordinates. */
struct FigureRow {
  int64_t x = 0;
  bool y_finite = true;
  int64_t y = 0;
  uint64_t count = 0;
  long double raw_x = 0;
  long double raw_y = 0; /* +infinity when y is the sentinel */

  bool operator==(const FigureRow& o) const;
};

struct FigureDataset {
  FigureKind kind = FigureKind::cr_vs_dim;
  GroupDesc group;
  std::string analogue_of;
  std::vector<FigureRow> rows;
};

/* scatter kinds, aggregated by (x, y) with multiplicity.  the axis
   conventions: rank axes carry the rank itself, the dimension axis is
   x = round(log_q dim), ratio axes are y = round(log_{1/q}|ratio|);
   count_by_rank is the joint (block rank, tensor rank) histogram. */
FigureDataset make_figure(const CharTable& tab,
                          const std::vector<RankProfile>& profiles,
                          FigureKind kind);

/* least class id that is regular semisimple and moves every nonzero
   vector; -1 when the group has none */
int first_regss_no_fix_class(const GroupAtlas& at);

/* deviation-vs-length dataset for a product-generation class;
   g_class < 0 picks the first eligible class per the helper above,
   and an empty dataset is returned when the group has none. */
FigureDataset make_sts_figure(const CharTable& tab, int ell_max,
                              int g_class = -1);

/* header "x,y,count,raw_x,raw_y", LF line endings */
std::string figure_csv(const FigureDataset& fig);
std::vector<FigureRow> parse_figure_csv(const std::string& text);

/* ---- serialization ----------------------------------------------- */

std::string table_json(const CharTable& tab);
std::string table_csv(const CharTable& tab);
std::string profiles_csv(const USplitStructure& u,
                         const std::vector<RankProfile>& profiles);
std::string ft_report_json(const FTReport& rep);
std::string generation_json(const GenerationTable& gen);

/* ---- whole-group invariant suite --------------------------------- */

struct VerifyCheck {
  std::string name;
  std::string status; /* "ok" | "skipped" | "failed" */
  std::string detail;
};

struct VerifyReport {
  GroupDesc group;
  std::vector<VerifyCheck> checks;
  std::vector<std::string> findings;
  bool ok = true;
};

VerifyReport run_verify(const GroupDesc& desc,
                        const Limits& lim = default_limits());

/* ---- command driver ---------------------------------------------- */

/* args exclude the program name.  exits: 0 success, 1 internal,
   2 usage or out-of-domain request, 3 budget, 4 consistency or
   numeric-integrity failure. */
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace rankscope
