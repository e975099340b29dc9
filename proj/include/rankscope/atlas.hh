#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "rankscope/common.hh"
#include "rankscope/gf.hh"

namespace rankscope {

enum class GroupKind { GL, SL };

struct GroupDesc {
  GroupKind kind;
  int n, q;
  std::string name() const;
};

/* accepts "GL(n,q)" or "SL(n,q)", case sensitive, spaces allowed. */
GroupDesc parse_group(const std::string& text);

uint64_t group_order(GroupKind kind, int n, int q);

/* matrices packed as n base-q row codes; one row fits in 16 bits. */
using PackedRows = std::array<uint16_t, 8>;

struct PackedOps {
  const FieldTable* F = nullptr;
  int n = 0;
  uint32_t R = 0; /* q^n */
  std::vector<uint16_t> rowadd;             /* [a*R+b] */
  std::array<std::vector<uint16_t>, 9> rowscale; /* [s][row] */
  std::vector<uint8_t> digit;               /* [row*n+j] */

  void init(const FieldTable& f, int n_);
  void decode(uint64_t code, PackedRows& out) const;
  uint64_t encode(const PackedRows& m) const;
  void mul(const PackedRows& a, const PackedRows& b, PackedRows& out) const;
  void inv(const PackedRows& a, PackedRows& out) const;
  void identity(PackedRows& out) const;
  MatFq unpack(const PackedRows& m) const;
  void pack(const MatFq& m, PackedRows& out) const;
};

/* fully enumerated group with conjugacy class data.  class ids are
   canonical: sorted by (element order, class size, least member code),
   which puts the identity at id 0.  class_map is dense over the full
   matrix code space with sentinels for non-members. */
struct GroupAtlas {
  static constexpr uint16_t kNonMember = 0xFFFF;
  static constexpr uint16_t kUnassigned = 0xFFFE;

  GroupKind kind;
  int n = 0, q = 0;
  const FieldTable* F = nullptr;
  PackedOps ops;
  uint64_t code_space = 0;
  uint64_t order = 0;
  uint64_t exponent = 0;
  uint32_t K = 0;

  std::vector<uint32_t> elements;   /* ascending codes */
  std::vector<uint16_t> class_map;  /* code -> class id */
  std::vector<uint32_t> class_rep;  /* least member code */
  std::vector<uint64_t> class_size;
  std::vector<uint32_t> class_order;
  std::vector<uint8_t> class_det;   /* field code of det on the class */
  std::vector<uint8_t> class_fix_dim; /* dim ker(g - 1) */
  std::vector<uint8_t> class_rss;     /* regular semisimple flag */
  std::vector<uint8_t> class_no_fix;  /* no eigenvalue one flag */
  std::vector<uint32_t> inverse_class;
  std::vector<std::vector<uint16_t>> power_class; /* [c][s], s < order */
  int transvection_class = -1;

  std::vector<uint32_t> by_class;     /* members grouped by class id */
  std::vector<uint64_t> class_offset; /* K+1 prefix sums into by_class */

  uint16_t class_of(uint64_t code) const {
    uint16_t c = class_map[code];
    if (c >= kUnassigned) throw NotInDomain("code is not a group member");
    return c;
  }
  bool is_member(uint64_t code) const { return class_map[code] < kUnassigned; }
  MatFq mat_of(uint64_t code) const {
    return MatFq::from_code(*F, n, n, code);
  }
  uint64_t identity_code() const;
  uint64_t mul_codes(uint64_t a, uint64_t b) const;
  uint64_t inv_code(uint64_t a) const;
  GroupDesc desc() const { return {kind, n, q}; }
  std::string name() const { return desc().name(); }
};

std::shared_ptr<const GroupAtlas> build_atlas(GroupKind kind, int n, int q,
                                              const Limits& lim = default_limits());

/* process-wide cache.  SL(n,2) and GL(n,2) are the same group and
   share one entry (the stored object reports kind GL). */
std::shared_ptr<const GroupAtlas> atlas_of(GroupKind kind, int n, int q);
std::shared_ptr<const GroupAtlas> atlas_of(const GroupDesc& g);

}  // namespace rankscope
