#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "provet/shuffle.hpp"
#include "provet/vfu.hpp"

namespace provet {

// Operand index expression: a literal, or AGU-style counter-relative
// (@cK+base). Slice and broadcast contexts wrap counter-derived values into
// range; SRAM addresses are taken raw and bounds-checked.
struct IndexExpr {
  std::int32_t base = 0;
  std::int32_t counter = -1;  // -1 means literal

  bool is_counter() const { return counter >= 0; }
  static IndexExpr lit(std::int32_t v) { return {v, -1}; }
  static IndexExpr ctr(std::int32_t c, std::int32_t off = 0) { return {off, c}; }

  bool operator==(const IndexExpr&) const = default;
};

// A datapath location: a local register, one VWR slice, or a whole VWR
// (flat operand addressing, used by broadcasts).
struct Loc {
  enum class Kind { reg, vwr_slice, vwr };
  Kind kind = Kind::reg;
  std::uint32_t reg = 1;    // 1..4
  std::uint32_t vwr = 0;    // VWR id (printed as A, B, ...)
  IndexExpr slice;

  static Loc r(std::uint32_t idx) { return {Kind::reg, idx, 0, {}}; }
  static Loc vwr_at(std::uint32_t v, IndexExpr s) { return {Kind::vwr_slice, 1, v, s}; }
  static Loc vwr_flat(std::uint32_t v) { return {Kind::vwr, 1, v, {}}; }

  bool operator==(const Loc&) const = default;
};

struct InstNop {
  bool operator==(const InstNop&) const = default;
};

// SRAM word -> VWR, optionally through the tile shuffler.
struct InstRlb {
  std::uint32_t vwr = 0;
  IndexExpr addr;
  std::optional<std::int32_t> shuffle_steps;
  bool operator==(const InstRlb&) const = default;
};

// VWR -> SRAM word, optionally through the tile shuffler.
struct InstWlb {
  std::uint32_t vwr = 0;
  IndexExpr addr;
  std::optional<std::int32_t> shuffle_steps;
  bool operator==(const InstWlb&) const = default;
};

// In-place rotation of a VWR through the tile shuffler.
struct InstGlmv {
  std::uint32_t vwr = 0;
  std::int32_t steps = 0;
  bool operator==(const InstGlmv&) const = default;
};

// Move between VWR and local registers (or register to register). With
// broadcast set, one source operand is replicated to every lane of dst.
struct InstVmv {
  Loc src;
  Loc dst;
  std::optional<IndexExpr> broadcast;
  bool operator==(const InstVmv&) const = default;
};

// Shift a local register through the VFU shuffler into a register or slice.
struct InstRmv {
  std::uint32_t src_reg = 1;
  Loc dst;
  std::int32_t step = 0;
  ShuffleFill fill = ShuffleFill::rotate;
  bool operator==(const InstRmv&) const = default;
};

// Word-level permutation of a register or slice, in place.
struct InstPerm {
  Loc target;
  PermSpec spec;
  bool operator==(const InstPerm&) const = default;
};

// VFU computation. in2 is only present for the binary modes; outs all
// receive the identical result; post sends the result through the VFU
// shuffler before writeback.
struct InstVfux {
  VfuMode mode = VfuMode::add;
  std::uint32_t in1_reg = 1;
  std::optional<Loc> in2;
  std::vector<Loc> outs;
  std::optional<std::int64_t> imm;
  std::optional<std::int32_t> post_step;
  ShuffleFill post_fill = ShuffleFill::rotate;
  bool operator==(const InstVfux&) const = default;
};

// Scalar counter ops. set uses imm; *i ops use a and imm; the rest a and b.
struct InstCalc {
  CalcOp op = CalcOp::set;
  std::uint32_t dst = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::int64_t imm = 0;
  bool operator==(const InstCalc&) const = default;
};

// Branch: unconditional, or hardware-loop style (jump while the counter is
// nonzero, decrementing it on every taken branch).
struct InstBran {
  enum class Cond { always, counter_nonzero };
  Cond cond = Cond::always;
  std::uint32_t counter = 0;
  std::string target;  // label name; resolved index lives in Program
  bool operator==(const InstBran&) const = default;
};

using Instruction = std::variant<InstNop, InstRlb, InstWlb, InstVmv, InstGlmv, InstRmv, InstPerm,
                                 InstVfux, InstCalc, InstBran>;

struct Program {
  std::vector<Instruction> instructions;
  std::map<std::string, std::uint32_t> labels;  // name -> instruction index
  std::string name;
  std::string arch_fingerprint;

  bool operator==(const Program&) const = default;

  std::uint32_t label_index(const std::string& label) const;
};

// Text assembly: one instruction or label per line, '#' comments,
// optional .name / .arch directives. Throws with line numbers on errors.
Program assemble(const std::string& text);
// Canonical text form; assemble(disassemble(p)) == p.
std::string disassemble(const Program& p);

std::string format_instruction(const Instruction& inst);
const char* mnemonic(const Instruction& inst);

Program load_program(const std::string& path);
void save_program(const Program& p, const std::string& path);

}  // namespace provet
