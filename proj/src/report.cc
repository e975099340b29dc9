#include "rankscope/report.hh"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace rankscope {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr long double kResidualTol = 1e-9L;

struct KindInfo {
  FigureKind kind;
  const char* name;
};

const KindInfo kKinds[] = {
    {FigureKind::cr_vs_dim, "cr_vs_dim"},
    {FigureKind::cr_vs_urank, "cr_vs_urank"},
    {FigureKind::cr_vs_trank, "cr_vs_trank"},
    {FigureKind::dim_vs_urank, "dim_vs_urank"},
    {FigureKind::dim_vs_trank, "dim_vs_trank"},
    {FigureKind::count_by_rank, "count_by_rank"},
    {FigureKind::sts_deviation, "sts_deviation"},
};

std::string analogue_of(FigureKind kind) {
  return std::string("Figure ") + figure_name(kind) + " at n=8,q=3";
}

std::string fmt_raw(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

bool raw_equal(long double a, long double b) {
  if (std::isinf(a) || std::isinf(b))
    return std::isinf(a) && std::isinf(b) && std::signbit(a) == std::signbit(b);
  return a == b;
}

struct CellKey {
  int64_t x = 0;
  bool y_inf = false;
  int64_t y = 0;

  bool operator<(const CellKey& o) const {
    if (x != o.x) return x < o.x;
    if (y_inf != o.y_inf) return !y_inf; /* finite cells first */
    return y < o.y;
  }
};

/* shared cell aggregator; the first contribution pins the raw pair */
class FigureCells {
 public:
  void add(long double rx, long double ry, bool y_is_inf) {
    CellKey key{round_half_away(rx), y_is_inf,
                y_is_inf ? 0 : round_half_away(ry)};
    auto [it, fresh] = cells_.try_emplace(key, FigureRow{});
    if (fresh) {
      it->second.x = key.x;
      it->second.y_finite = !key.y_inf;
      it->second.y = key.y;
      it->second.raw_x = rx;
      it->second.raw_y = y_is_inf ? INFINITY : ry;
    }
    it->second.count++;
  }

  std::vector<FigureRow> rows() const {
    std::vector<FigureRow> out;
    out.reserve(cells_.size());
    for (const auto& [key, row] : cells_) out.push_back(row);
    return out;
  }

 private:
  std::map<CellKey, FigureRow> cells_;
};

/* log_{1/q}|v|; flips the inf flag at v = 0 */
/* values are ratios of algebraic integers to dimensions, so anything below
   the cutoff is table residue around an exact zero */
long double ratio_log(long double v, long double log_q, bool& is_inf) {
  long double am = std::fabs(v);
  if (am < 1e-12L) {
    is_inf = true;
    return 0;
  }
  return -std::log(am) / log_q;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw NotInDomain("cannot open " + path + " for writing");
  os << text;
  if (!os) throw NotInDomain("short write to " + path);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

int64_t parse_int(const std::string& s) {
  size_t used = 0;
  int64_t v = std::stoll(s, &used);
  if (used != s.size() || s.empty())
    throw NotInDomain("malformed integer field '" + s + "'");
  return v;
}

long double parse_raw(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  long double v = std::strtold(begin, &end);
  if (end != begin + s.size() || s.empty())
    throw NotInDomain("malformed numeric field '" + s + "'");
  return v;
}

}  // namespace

const std::vector<FigureKind>& all_figure_kinds() {
  static const std::vector<FigureKind> kinds = [] {
    std::vector<FigureKind> v;
    for (const auto& info : kKinds) v.push_back(info.kind);
    return v;
  }();
  return kinds;
}

const char* figure_name(FigureKind kind) {
  for (const auto& info : kKinds)
    if (info.kind == kind) return info.name;
  throw NotInDomain("unknown figure kind");
}

FigureKind figure_from_name(const std::string& name) {
  for (const auto& info : kKinds)
    if (name == info.name) return info.kind;
  throw NotInDomain("unknown figure kind '" + name + "'");
}

long long round_half_away(long double v) { return std::llroundl(v); }

bool FigureRow::operator==(const FigureRow& o) const {
  if (x != o.x || y_finite != o.y_finite || count != o.count) return false;
  if (y_finite && y != o.y) return false;
  return raw_equal(raw_x, o.raw_x) && raw_equal(raw_y, o.raw_y);
}

FigureDataset make_figure(const CharTable& tab,
                          const std::vector<RankProfile>& profiles,
                          FigureKind kind) {
  if (kind == FigureKind::sts_deviation)
    throw NotInDomain("the deviation figure is built from a generation class");
  const auto& at = *tab.atlas;
  long double log_q = std::log((long double)at.q);
  FigureDataset fig;
  fig.kind = kind;
  fig.group = at.desc();
  fig.analogue_of = analogue_of(kind);

  FigureCells cells;
  for (const auto& p : profiles) {
    long double dim_log = std::log((long double)p.dim) / log_q;
    long double rx = 0, ry = 0;
    bool y_inf = false;
    switch (kind) {
      case FigureKind::cr_vs_dim:
        rx = dim_log;
        ry = ratio_log(std::abs(p.cr_raw) / (long double)p.dim, log_q, y_inf);
        break;
      case FigureKind::cr_vs_urank:
        rx = p.u_rank;
        ry = ratio_log(std::abs(p.cr_raw) / (long double)p.dim, log_q, y_inf);
        break;
      case FigureKind::cr_vs_trank:
        rx = p.tensor_rank;
        ry = ratio_log(std::abs(p.cr_raw) / (long double)p.dim, log_q, y_inf);
        break;
      case FigureKind::dim_vs_urank:
        rx = dim_log;
        ry = p.u_rank;
        break;
      case FigureKind::dim_vs_trank:
        rx = dim_log;
        ry = p.tensor_rank;
        break;
      case FigureKind::count_by_rank:
        rx = p.u_rank;
        ry = p.tensor_rank;
        break;
      case FigureKind::sts_deviation:
        break;
    }
    cells.add(rx, ry, y_inf);
  }
  fig.rows = cells.rows();
  return fig;
}

int first_regss_no_fix_class(const GroupAtlas& at) {
  for (uint32_t c = 0; c < at.K; ++c)
    if (at.class_rss[c] && at.class_no_fix[c]) return (int)c;
  return -1;
}

FigureDataset make_sts_figure(const CharTable& tab, int ell_max, int g_class) {
  const auto& at = *tab.atlas;
  FigureDataset fig;
  fig.kind = FigureKind::sts_deviation;
  fig.group = at.desc();
  fig.analogue_of = analogue_of(FigureKind::sts_deviation);
  if (at.transvection_class < 0) return fig;
  if (g_class < 0) {
    g_class = first_regss_no_fix_class(at);
    if (g_class < 0) return fig;
  }
  if ((uint32_t)g_class >= at.K) throw InvalidClass("no such class");

  uint32_t t = (uint32_t)at.transvection_class;
  uint32_t ginv = at.inverse_class[g_class];
  long double log_q = std::log((long double)at.q);
  FigureCells cells;
  for (int ell = 1; ell <= ell_max; ++ell) {
    cplx sum{0, 0};
    for (uint32_t r = 0; r < tab.K; ++r) {
      if (r == tab.trivial_id) continue;
      cplx cr = tab.val[r][t] / (long double)tab.dims[r];
      sum += (long double)tab.dims[r] * std::pow(cr, ell) * tab.val[r][ginv];
    }
    if (std::fabs(sum.imag()) > 1e-6L)
      throw NumericalGuard("deviation sum has an imaginary part");
    long double dev = -sum.real();
    bool y_inf = false;
    long double ry = ratio_log(dev, log_q, y_inf);
    cells.add((long double)ell, ry, y_inf);
  }
  fig.rows = cells.rows();
  return fig;
}

std::string figure_csv(const FigureDataset& fig) {
  std::string text = "x,y,count,raw_x,raw_y\n";
  for (const auto& row : fig.rows) {
    text += std::to_string(row.x);
    text += ',';
    text += row.y_finite ? std::to_string(row.y) : std::string("inf");
    text += ',';
    text += std::to_string(row.count);
    text += ',';
    text += fmt_raw(row.raw_x);
    text += ',';
    text += fmt_raw(row.raw_y);
    text += '\n';
  }
  return text;
}

std::vector<FigureRow> parse_figure_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "x,y,count,raw_x,raw_y")
    throw NotInDomain("missing figure csv header");
  std::vector<FigureRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 5)
      throw NotInDomain("figure csv row with " +
                        std::to_string(fields.size()) + " fields");
    FigureRow row;
    row.x = parse_int(fields[0]);
    if (fields[1] == "inf") {
      row.y_finite = false;
    } else {
      row.y = parse_int(fields[1]);
    }
    int64_t count = parse_int(fields[2]);
    if (count < 0) throw NotInDomain("negative multiplicity");
    row.count = (uint64_t)count;
    row.raw_x = parse_raw(fields[3]);
    row.raw_y = parse_raw(fields[4]);
    rows.push_back(row);
  }
  return rows;
}

std::string table_json(const CharTable& tab) {
  const auto& at = *tab.atlas;
  ordered_json j;
  j["group"] = at.name();
  j["order"] = at.order;
  auto& classes = j["classes"] = ordered_json::array();
  for (uint32_t c = 0; c < at.K; ++c) {
    ordered_json jc;
    jc["id"] = c;
    jc["size"] = at.class_size[c];
    jc["order"] = at.class_order[c];
    jc["flags"] = {{"regular_semisimple", (bool)at.class_rss[c]},
                   {"fixes_no_vector", (bool)at.class_no_fix[c]}};
    classes.push_back(std::move(jc));
  }
  auto& irreps = j["irreps"] = ordered_json::array();
  for (uint32_t r = 0; r < tab.K; ++r) {
    ordered_json jr;
    jr["id"] = r;
    jr["dim"] = tab.dims[r];
    auto& values = jr["values"] = ordered_json::array();
    for (uint32_t c = 0; c < tab.K; ++c)
      values.push_back({(double)tab.val[r][c].real(),
                        (double)tab.val[r][c].imag()});
    irreps.push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

std::string table_csv(const CharTable& tab) {
  std::string text = "irrep,dim";
  for (uint32_t c = 0; c < tab.K; ++c) text += ",class_" + std::to_string(c);
  text += '\n';
  for (uint32_t r = 0; r < tab.K; ++r) {
    text += std::to_string(r) + ',' + std::to_string(tab.dims[r]);
    for (uint32_t c = 0; c < tab.K; ++c) {
      text += ',';
      text += format_complex(tab.val[r][c]);
    }
    text += '\n';
  }
  return text;
}

std::string profiles_csv(const USplitStructure& u,
                         const std::vector<RankProfile>& profiles) {
  std::string text = "irrep,dim,cr_num,cr_den";
  for (int r = 0; r <= u.mrank; ++r) text += ",m_" + std::to_string(r);
  text += ",u_rank,tensor_rank,strict_rank\n";
  for (const auto& p : profiles) {
    text += std::to_string(p.irrep) + ',' + std::to_string(p.dim) + ',';
    if (p.cr_rational)
      text += std::to_string(p.cr.num) + ',' + std::to_string(p.cr.den);
    else
      text += ',';
    for (int r = 0; r <= u.mrank; ++r) {
      text += ',';
      bool first = true;
      for (uint32_t o = 0; o < u.S; ++o) {
        if (u.orbit_rank[o] != r) continue;
        if (!first) text += '|';
        text += std::to_string(p.mult[o]);
        first = false;
      }
    }
    text += ',' + std::to_string(p.u_rank) + ',' +
            std::to_string(p.tensor_rank) + ',' + std::to_string(p.strict_rank);
    text += '\n';
  }
  return text;
}

std::string ft_report_json(const FTReport& rep) {
  ordered_json j;
  j["m"] = rep.m;
  j["n"] = rep.n;
  j["k"] = rep.k;
  j["q"] = rep.q;
  j["count_rank"] = rep.count_rank.str();
  j["orthogonal"] = {{"total", rep.orth.total.str()},
                     {"a", rep.orth.a.str()},
                     {"b", rep.orth.b.str()},
                     {"c", rep.orth.c.str()},
                     {"d", rep.orth.d.str()}};
  j["closed_ft"] = rep.closed_ft.str();
  if (rep.brute_ft)
    j["brute_ft"] = *rep.brute_ft;
  else
    j["brute_ft"] = nullptr;
  j["sign"] = rep.sign;
  return j.dump(2) + "\n";
}

std::string generation_json(const GenerationTable& gen) {
  ordered_json j;
  j["group"] = gen.group.name();
  j["g_class"] = gen.g_class;
  auto& rows = j["rows"] = ordered_json::array();
  long double prev_dev = 0;
  bool have_prev = false;
  for (const auto& row : gen.rows) {
    ordered_json jr;
    jr["ell"] = row.ell;
    jr["frobenius"] = row.frobenius;
    if (row.oracle)
      jr["oracle"] = *row.oracle;
    else
      jr["oracle"] = nullptr;
    jr["deviation"] = (double)row.deviation;
    auto& sums = jr["rank_sums"] = ordered_json::array();
    for (long double s : row.rank_sums) sums.push_back((double)s);
    if (have_prev && prev_dev > 0 && row.deviation > 0)
      jr["ratio_log"] =
          (double)(std::log(row.deviation / prev_dev) /
                   std::log(1.0L / (long double)gen.group.q));
    else
      jr["ratio_log"] = nullptr;
    prev_dev = row.deviation;
    have_prev = true;
    rows.push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

/* ---- verify ------------------------------------------------------ */

namespace {

std::string join_sizes(const std::vector<uint64_t>& v) {
  std::string s;
  for (uint64_t x : v) {
    if (!s.empty()) s += ',';
    s += std::to_string(x);
  }
  return s;
}

}  // namespace

VerifyReport run_verify(const GroupDesc& desc, const Limits& lim) {
  VerifyReport rep;
  rep.group = desc;
  auto run = [&](const char* name, auto&& body) {
    VerifyCheck check{name, "ok", ""};
    try {
      check.detail = body();
    } catch (const BudgetExceeded& e) {
      check.status = "skipped";
      check.detail = e.what();
    } catch (const ConsistencyFailure& e) {
      check.status = "failed";
      check.detail = e.what();
      rep.ok = false;
    } catch (const NumericalGuard& e) {
      check.status = "failed";
      check.detail = e.what();
      rep.ok = false;
    }
    rep.checks.push_back(std::move(check));
  };

  auto at = atlas_of(desc);
  auto tab = table_of(desc);
  const int n = at->n, q = at->q;
  const bool gl_like = at->kind == GroupKind::GL;
  const bool sl_like = desc.kind == GroupKind::SL || q == 2;

  run("class equation", [&] {
    uint64_t sum = 0;
    for (uint64_t s : at->class_size) {
      if (at->order % s)
        throw ConsistencyFailure("class size " + std::to_string(s) +
                                 " does not divide the group order");
      sum += s;
    }
    if (sum != at->order)
      throw ConsistencyFailure("class sizes sum to " + std::to_string(sum) +
                               ", expected " + std::to_string(at->order));
    return std::to_string(at->K) + " classes, order " +
           std::to_string(at->order);
  });

  run("degree squares", [&] {
    uint64_t sum = 0;
    for (uint64_t d : tab->dims) sum += d * d;
    if (sum != at->order)
      throw ConsistencyFailure("squared degrees sum to " +
                               std::to_string(sum));
    return "sum of squared degrees = " + std::to_string(sum);
  });

  run("row orthogonality", [&] {
    long double worst = 0;
    for (uint32_t i = 0; i < tab->K; ++i)
      for (uint32_t j = i; j < tab->K; ++j) {
        cplx ip = tab->inner(tab->val[i], tab->val[j]);
        long double expect = i == j ? 1.0L : 0.0L;
        worst = std::max(worst, (long double)std::abs(ip - expect));
      }
    if (worst > kResidualTol)
      throw ConsistencyFailure("row residual " +
                               std::to_string((double)worst));
    return "max residual " + std::to_string((double)worst);
  });

  run("column orthogonality", [&] {
    long double worst = 0;
    for (uint32_t c = 0; c < at->K; ++c)
      for (uint32_t d = c; d < at->K; ++d) {
        cplx sum{0, 0};
        for (uint32_t r = 0; r < tab->K; ++r)
          sum += tab->val[r][c] * std::conj(tab->val[r][d]);
        long double scale = (long double)at->order / at->class_size[c];
        long double expect = c == d ? scale : 0.0L;
        worst = std::max(worst, (long double)std::abs(sum - expect) / scale);
      }
    if (worst > kResidualTol)
      throw ConsistencyFailure("column residual " +
                               std::to_string((double)worst));
    return "max residual " + std::to_string((double)worst);
  });

  std::shared_ptr<const USplitStructure> u;
  std::vector<RankProfile> profiles;
  if (n >= 2) {
    run("block orbit strata", [&] {
      u = u_structure_of(desc);
      uint64_t total = 0;
      for (uint64_t s : u->orbit_size) total += s;
      if (total != u->space)
        throw ConsistencyFailure("orbit sizes sum to " +
                                 std::to_string(total));
      if (gl_like) orbit_ft_matrix(*u);
      return "orbit sizes " + join_sizes(u->orbit_size);
    });

    run("restriction profiles", [&] {
      if (!u) throw BudgetExceeded("no block structure");
      profiles = profile_all(*tab, *u);
      return "all " + std::to_string(profiles.size()) +
             " irreps reconstruct on the block subgroup";
    });

    run("twist invariance", [&] {
      if (profiles.empty()) throw BudgetExceeded("no profiles");
      std::map<uint32_t, const RankProfile*> lead;
      for (const auto& p : profiles) {
        auto [it, fresh] = lead.try_emplace(p.twist_orbit, &p);
        if (fresh) continue;
        const auto& base = *it->second;
        if (p.u_rank != base.u_rank || p.tensor_rank != base.tensor_rank ||
            p.mult != base.mult)
          throw ConsistencyFailure("ranks vary inside twist orbit " +
                                   std::to_string(p.twist_orbit));
      }
      return std::to_string(lead.size()) + " twist orbits";
    });
  }

  if (gl_like) {
    run("power filtration", [&] {
      auto chain = filtration_chain(*tab);
      std::string sizes;
      for (const auto& level : chain) {
        if (!sizes.empty()) sizes += ',';
        sizes += std::to_string(level.size());
      }
      return "level sizes " + sizes;
    });

    if (n >= 2) {
      run("rank agreement", [&] {
        if (!u) throw BudgetExceeded("no block structure");
        auto rows = agreement_check(*tab, *u);
        for (const auto& row : rows) {
          std::string f = "rank-" + std::to_string(row.k) +
                          " sets: tensor " +
                          std::to_string(row.tensor_set.size()) + ", block " +
                          std::to_string(row.u_set.size()) +
                          (row.equal ? " (equal)" : " (strict subset)");
          rep.findings.push_back(std::move(f));
        }
        return std::to_string(rows.size()) + " ranks compared";
      });

      run("block rank split stability", [&] {
        if (profiles.empty()) throw BudgetExceeded("no profiles");
        if (n < 3) return std::string("single split, nothing to compare");
        int tested = 0;
        for (const auto& p : profiles) {
          if (p.u_rank > 1 || (int)p.u_rank >= n / 2) continue;
          auto ir = rank_independence_check(*tab, p.irrep);
          if (!ir.all_equal)
            throw ConsistencyFailure("split ranks disagree at irrep " +
                                     std::to_string(p.irrep));
          ++tested;
        }
        return std::to_string(tested) + " low-rank irreps across splits";
      });

      run("multiplicity spaces", [&] {
        int m = n / 2;
        for (int k = 1; k <= m; ++k) {
          auto small = table_of(GroupKind::GL, k, q);
          auto block = eta_correspondence(*tab, *small, EtaMode::u_rank);
          eta_correspondence(*tab, *small, EtaMode::strict);
          for (const auto& row : block.rows)
            if (!row.window_ok)
              rep.findings.push_back(
                  "eta image of tau " + std::to_string(row.tau) + " at k=" +
                  std::to_string(k) + " outside the dimension window");
          if (2 * k < n) {
            auto ex = exhaustion_check(*tab, *small);
            rep.findings.push_back(
                "rank-" + std::to_string(k) + " coverage by twisted images: " +
                (ex.complete ? "complete"
                             : std::to_string(ex.missing.size()) + " missing"));
          }
        }
        return "correspondence checked for k <= " + std::to_string(m);
      });

      run("parabolic constituents", [&] {
        auto rows = corank_fact_check(*tab);
        for (const auto& row : rows)
          if (!row.ok)
            rep.findings.push_back("tensor co-rank deviates at D = " +
                                   row.D.text());
        return std::to_string(rows.size()) + " partitions";
      });
    }
  }

  if (n >= 2) {
    run("block transform positivity", [&] {
      auto pos = positivity_report(n, q, lim);
      for (const auto& row : pos.rows) {
        if (row.r >= pos.m) continue;
        if (row.value <= 0)
          throw ConsistencyFailure("transform not positive at rank " +
                                   std::to_string(row.r));
        if (!row.window_ok)
          throw ConsistencyFailure("transform ratio outside the window at " +
                                   std::to_string(row.r));
      }
      return "ranks below " + std::to_string(pos.m) + " positive and sized";
    });
  }

  if (sl_like && n >= 3) {
    run("rank one character law", [&] {
      auto rr = rank_one_sum_check(*tab);
      std::string sums;
      for (const auto& row : rr.rows) {
        if (!sums.empty()) sums += ',';
        sums += std::to_string(row.sum);
      }
      rep.findings.push_back(
          std::string("claimed rank-one constant -2: observed sums ") +
          (sums.empty() ? "none (no eligible class)" : sums));
      return std::to_string(rr.rank_one_irreps.size()) +
             " rank-one irreps against the fixed-vector law";
    });

    run("generation counts", [&] {
      auto oracle = convolution_oracle(*at, 8, lim);
      for (int ell = 1; ell <= 8; ++ell)
        for (uint32_t c = 0; c < at->K; ++c)
          if (frobenius_count(*tab, ell, c) != oracle[ell][c])
            throw ConsistencyFailure(
                "formula and convolution disagree at length " +
                std::to_string(ell) + ", class " + std::to_string(c));
      return "formula = convolution for all classes, lengths <= 8";
    });

    run("deviation profile", [&] {
      int g = first_regss_no_fix_class(*at);
      if (g < 0) return std::string("no eligible class");
      auto gen = sts_deviation_table(*tab, (uint32_t)g, 8, lim);
      for (const auto& row : gen.rows)
        if (row.ell > n && row.deviation > 0) {
          const auto& prev = gen.rows[row.ell - 2];
          if (prev.deviation > 0) {
            long double ratio = row.deviation / prev.deviation;
            if (ratio < 1.0L / (2 * q) || ratio > 2.0L / q)
              rep.findings.push_back(
                  "deviation ratio at length " + std::to_string(row.ell) +
                  " = " + std::to_string((double)ratio) +
                  " outside [1/2q, 2/q]");
          }
        }
      return "class " + std::to_string(g) + ", lengths <= 8";
    });
  } else if (n >= 3) {
    run("deviation profile", [&] {
      auto fig = make_sts_figure(*tab, 8);
      return fig.rows.empty() ? std::string("no eligible class")
                              : std::to_string(fig.rows.size()) + " lengths";
    });
  }

  return rep;
}

/* ---- command driver ---------------------------------------------- */

namespace {

void write_or_stream(const std::string& path, const std::string& text,
                     std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_text_file(path, text);
}

int dispatch_table(const std::string& group_s, const std::string& out_path,
                   const std::string& format, std::ostream& out) {
  auto tab = table_of(parse_group(group_s));
  write_or_stream(out_path,
                  format == "csv" ? table_csv(*tab) : table_json(*tab), out);
  return 0;
}

int dispatch_ranks(const std::string& group_s, const std::string& out_path,
                   std::ostream& out) {
  auto desc = parse_group(group_s);
  auto tab = table_of(desc);
  auto u = u_structure_of(desc);
  auto profiles = profile_all(*tab, *u);
  write_or_stream(out_path, profiles_csv(*u, profiles), out);
  return 0;
}

int dispatch_count(const std::string& group_s, int ell, int g_class,
                   bool auto_regss, const std::string& out_path,
                   std::ostream& out) {
  auto desc = parse_group(group_s);
  auto tab = table_of(desc);
  if (auto_regss) {
    g_class = first_regss_no_fix_class(*tab->atlas);
    if (g_class < 0)
      throw InvalidClass("no regular semisimple class without eigenvalue one");
  }
  auto gen = sts_deviation_table(*tab, (uint32_t)g_class, ell);
  write_or_stream(out_path, generation_json(gen), out);
  return 0;
}

int dispatch_figures(const std::string& group_s, const std::string& out_dir,
                     int ell) {
  auto desc = parse_group(group_s);
  auto tab = table_of(desc);
  auto u = u_structure_of(desc);
  auto profiles = profile_all(*tab, *u);
  std::filesystem::create_directories(out_dir);

  ordered_json meta;
  meta["group"] = tab->atlas->name();
  auto& files = meta["files"] = ordered_json::array();
  for (FigureKind kind : all_figure_kinds()) {
    FigureDataset fig = kind == FigureKind::sts_deviation
                            ? make_sts_figure(*tab, ell)
                            : make_figure(*tab, profiles, kind);
    std::string file = std::string(figure_name(kind)) + ".csv";
    write_text_file(out_dir + "/" + file, figure_csv(fig));
    files.push_back({{"file", file},
                     {"kind", figure_name(kind)},
                     {"analogue_of", fig.analogue_of},
                     {"rows", fig.rows.size()}});
  }
  int sts_class = first_regss_no_fix_class(*tab->atlas);
  meta["sts"] = {{"g_class", sts_class < 0 ? ordered_json(nullptr)
                                           : ordered_json(sts_class)},
                 {"ell_max", ell}};
  write_text_file(out_dir + "/figures_meta.json", meta.dump(2) + "\n");
  return 0;
}

int dispatch_verify(const std::string& group_s, std::ostream& out) {
  auto rep = run_verify(parse_group(group_s));
  for (const auto& check : rep.checks) {
    if (check.status == "ok")
      out << "ok      " << check.name << ": " << check.detail << "\n";
    else if (check.status == "skipped")
      out << "skipped " << check.name << ": " << check.detail << "\n";
    else
      out << "FAILED  " << check.name << ": " << check.detail << "\n";
  }
  for (const auto& f : rep.findings) out << "finding " << f << "\n";
  out << "verify " << rep.group.name() << ": " << (rep.ok ? "OK" : "FAILED")
      << "\n";
  return rep.ok ? 0 : 4;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"exact character tables, rank invariants, and product "
               "generation counts for small matrix groups"};
  app.name("rankscope");
  app.require_subcommand(1);

  std::string group_s, out_path, format = "json", out_dir;
  int ell = 8, g_class = -1;
  int m = 0, n = 0, k = 0, q = 0;
  bool brute = false, auto_regss = false;

  auto* cmd_table = app.add_subcommand("table", "exact character table");
  cmd_table->add_option("--group", group_s, "GL(n,q) | SL(n,q)")->required();
  cmd_table->add_option("--out", out_path, "output file (stdout if omitted)");
  cmd_table->add_option("--format", format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* cmd_ranks = app.add_subcommand("ranks", "per-irrep rank profiles");
  cmd_ranks->add_option("--group", group_s, "GL(n,q) | SL(n,q)")->required();
  cmd_ranks->add_option("--out", out_path, "output file (stdout if omitted)");

  auto* cmd_ft = app.add_subcommand(
      "ft", "rank stratum transform at a rank-one point");
  cmd_ft->add_option("--m", m, "row count")->required();
  cmd_ft->add_option("--n", n, "column count")->required();
  cmd_ft->add_option("--k", k, "rank")->required();
  cmd_ft->add_option("--q", q, "field size")->required();
  cmd_ft->add_flag("--brute", brute, "also run the exhaustive sum");
  cmd_ft->add_option("--out", out_path, "output file (stdout if omitted)");

  auto* cmd_count =
      app.add_subcommand("count", "transvection product generation table");
  cmd_count->add_option("--group", group_s, "GL(n,q) | SL(n,q)")->required();
  cmd_count->add_option("--ell", ell, "maximum product length")
      ->check(CLI::Range(1, 64));
  auto* opt_class = cmd_count->add_option("--g-class", g_class, "target class");
  auto* opt_auto = cmd_count->add_flag(
      "--g-auto-regss", auto_regss,
      "first regular semisimple class without eigenvalue one");
  opt_class->excludes(opt_auto);
  opt_auto->excludes(opt_class);
  cmd_count->add_option("--out", out_path, "output file (stdout if omitted)");

  auto* cmd_figures = app.add_subcommand("figures", "plot-ready datasets");
  cmd_figures->add_option("--group", group_s, "GL(n,q) | SL(n,q)")->required();
  cmd_figures->add_option("--out", out_dir, "output directory")->required();
  cmd_figures->add_option("--ell", ell, "deviation figure length range")
      ->check(CLI::Range(1, 64));

  auto* cmd_verify =
      app.add_subcommand("verify", "full invariant suite for one group");
  cmd_verify->add_option("--group", group_s, "GL(n,q) | SL(n,q)")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("rankscope");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_table->parsed()) return dispatch_table(group_s, out_path, format, out);
    if (cmd_ranks->parsed()) return dispatch_ranks(group_s, out_path, out);
    if (cmd_ft->parsed()) {
      auto rep = make_ft_report(m, n, k, q, brute);
      write_or_stream(out_path, ft_report_json(rep), out);
      return 0;
    }
    if (cmd_count->parsed()) {
      if (!auto_regss && g_class < 0) {
        err << "count needs --g-class or --g-auto-regss\n";
        return 2;
      }
      return dispatch_count(group_s, ell, g_class, auto_regss, out_path, out);
    }
    if (cmd_figures->parsed()) return dispatch_figures(group_s, out_dir, ell);
    if (cmd_verify->parsed()) return dispatch_verify(group_s, out);
    err << "no subcommand\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    err << "budget: " << e.what() << "\n";
    return 3;
  } catch (const ConsistencyFailure& e) {
    err << "consistency: " << e.what() << "\n";
    return 4;
  } catch (const NumericalGuard& e) {
    err << "numeric: " << e.what() << "\n";
    return 4;
  } catch (const NotInDomain& e) {
    err << "domain: " << e.what() << "\n";
    return 2;
  } catch (const InvalidClass& e) {
    err << "class: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedField& e) {
    err << "field: " << e.what() << "\n";
    return 2;
  } catch (const NotSquare& e) {
    err << "field: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rankscope
