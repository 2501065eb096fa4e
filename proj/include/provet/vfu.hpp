#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "provet/word.hpp"

namespace provet {

// The elementwise VFU modes. Arithmetic is two's-complement wrap at the
// operand width; Clip is the only saturating mode. The accumulate modes
// compute op(a, b) and add the result into acc with wrap.
enum class VfuMode {
  mult,
  add,
  max,
  mult_acc,
  add_acc,
  max_acc,
  clip,
  shift,
  relu,
  sigmoid,
  tanh,
};

const char* vfu_mode_name(VfuMode m);
std::optional<VfuMode> vfu_mode_from_name(const std::string& name);
constexpr int kVfuModeCount = 11;

// Lane-wise VFU evaluation.
//   - binary modes (mult/add/max and their acc variants) use a and b
//   - unary modes (clip/shift/relu/sigmoid/tanh) use a and ignore b
//   - acc is only read by the *_acc modes
//   - imm: shift distance for shift (positive = left, negative = arithmetic
//     right) and the target bit width for clip
// Fixed-point sigmoid/tanh interpret lanes with 5 fractional bits and
// round-to-nearest-even, then clip to the representable range.
LaneVector vfu_execute(VfuMode mode, const LaneVector& a, const LaneVector& b,
                       const LaneVector& acc, std::int64_t imm = 0);

// Scalar ALU used by CALC for loop bookkeeping.
enum class CalcOp { set, add, addi, sub, subi, divi, modi, cmplt, cmpeq };

const char* calc_op_name(CalcOp op);
std::optional<CalcOp> calc_op_from_name(const std::string& name);

std::int64_t vfu_scalar_calc(CalcOp op, std::int64_t a, std::int64_t b);

constexpr std::uint32_t kFixedPointFracBits = 5;

}  // namespace provet
