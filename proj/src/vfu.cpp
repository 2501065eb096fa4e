#include "provet/vfu.hpp"

#include <algorithm>
#include <cmath>

namespace provet {

const char* vfu_mode_name(VfuMode m) {
  switch (m) {
    case VfuMode::mult: return "mult";
    case VfuMode::add: return "add";
    case VfuMode::max: return "max";
    case VfuMode::mult_acc: return "multacc";
    case VfuMode::add_acc: return "addacc";
    case VfuMode::max_acc: return "maxacc";
    case VfuMode::clip: return "clip";
    case VfuMode::shift: return "shift";
    case VfuMode::relu: return "relu";
    case VfuMode::sigmoid: return "sigmoid";
    case VfuMode::tanh: return "tanh";
  }
  return "?";
}

std::optional<VfuMode> vfu_mode_from_name(const std::string& name) {
  for (int i = 0; i < kVfuModeCount; ++i) {
    const auto m = static_cast<VfuMode>(i);
    if (name == vfu_mode_name(m)) return m;
  }
  return std::nullopt;
}

namespace {

bool is_binary(VfuMode m) {
  switch (m) {
    case VfuMode::mult:
    case VfuMode::add:
    case VfuMode::max:
    case VfuMode::mult_acc:
    case VfuMode::add_acc:
    case VfuMode::max_acc:
      return true;
    default:
      return false;
  }
}

bool is_acc(VfuMode m) {
  return m == VfuMode::mult_acc || m == VfuMode::add_acc || m == VfuMode::max_acc;
}

// Round to nearest, ties to even; deterministic regardless of FP env.
std::int64_t round_nearest_even(double x) {
  const double fl = std::floor(x);
  const double frac = x - fl;
  if (frac > 0.5) return static_cast<std::int64_t>(fl) + 1;
  if (frac < 0.5) return static_cast<std::int64_t>(fl);
  const auto lo = static_cast<std::int64_t>(fl);
  return (lo % 2 == 0) ? lo : lo + 1;
}

std::int64_t fixed_point_apply(double (*f)(double), std::int64_t lane, const LaneVector& ref) {
  const double scale = static_cast<double>(std::int64_t{1} << kFixedPointFracBits);
  const std::int64_t r = round_nearest_even(f(static_cast<double>(lane) / scale) * scale);
  return std::clamp(r, ref.min_value(), ref.max_value());
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LaneVector vfu_execute(VfuMode mode, const LaneVector& a, const LaneVector& b,
                       const LaneVector& acc, std::int64_t imm) {
  const std::size_t l = a.size();
  if (is_binary(mode) && b.size() != l)
    throw Error(Errc::lane_count_mismatch,
                "a has " + std::to_string(l) + " lanes, b has " + std::to_string(b.size()));
  if (is_acc(mode) && acc.size() != l)
    throw Error(Errc::lane_count_mismatch,
                "a has " + std::to_string(l) + " lanes, acc has " + std::to_string(acc.size()));

  // Wrap semantics via unsigned arithmetic, defined even at 64-bit operands.
  auto mul = [](std::int64_t p, std::int64_t q) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(q));
  };
  auto sum = [](std::int64_t p, std::int64_t q) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(q));
  };

  LaneVector out(l, a.operand_width_bits());
  for (std::size_t i = 0; i < l; ++i) {
    const std::int64_t x = a.at(i);
    std::int64_t r = 0;
    switch (mode) {
      case VfuMode::mult: r = mul(x, b.at(i)); break;
      case VfuMode::add: r = sum(x, b.at(i)); break;
      case VfuMode::max: r = std::max(x, b.at(i)); break;
      case VfuMode::mult_acc: r = sum(acc.at(i), out.wrap(mul(x, b.at(i)))); break;
      case VfuMode::add_acc: r = sum(acc.at(i), out.wrap(sum(x, b.at(i)))); break;
      case VfuMode::max_acc: r = sum(acc.at(i), std::max(x, b.at(i))); break;
      case VfuMode::clip: {
        // imm is the target bit width; saturate into its representable range.
        const std::int64_t w = std::clamp<std::int64_t>(imm, 1, a.operand_width_bits());
        const std::int64_t hi = (std::int64_t{1} << (w - 1)) - 1;
        r = std::clamp(x, -hi - 1, hi);
        break;
      }
      case VfuMode::shift:
        if (imm >= 64) {
          r = 0;
        } else if (imm >= 0) {
          r = static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << imm);
        } else {
          r = x >> std::min<std::int64_t>(-imm, 63);
        }
        break;
      case VfuMode::relu: r = std::max<std::int64_t>(x, 0); break;
      case VfuMode::sigmoid: r = fixed_point_apply(&sigmoid, x, out); break;
      case VfuMode::tanh: r = fixed_point_apply(&std::tanh, x, out); break;
    }
    out.set(i, r);
  }
  return out;
}

const char* calc_op_name(CalcOp op) {
  switch (op) {
    case CalcOp::set: return "set";
    case CalcOp::add: return "add";
    case CalcOp::addi: return "addi";
    case CalcOp::sub: return "sub";
    case CalcOp::subi: return "subi";
    case CalcOp::divi: return "divi";
    case CalcOp::modi: return "modi";
    case CalcOp::cmplt: return "cmplt";
    case CalcOp::cmpeq: return "cmpeq";
  }
  return "?";
}

std::optional<CalcOp> calc_op_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(CalcOp::cmpeq); ++i) {
    const auto op = static_cast<CalcOp>(i);
    if (name == calc_op_name(op)) return op;
  }
  return std::nullopt;
}

std::int64_t vfu_scalar_calc(CalcOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CalcOp::set: return a;
    case CalcOp::add:
    case CalcOp::addi: return a + b;
    case CalcOp::sub:
    case CalcOp::subi: return a - b;
    case CalcOp::divi:
      if (b == 0) throw Error(Errc::simulation_fault, "CALC division by zero");
      return a / b;
    case CalcOp::modi:
      if (b == 0) throw Error(Errc::simulation_fault, "CALC modulo by zero");
      return a % b;
    case CalcOp::cmplt: return a < b ? 1 : 0;
    case CalcOp::cmpeq: return a == b ? 1 : 0;
  }
  return 0;
}

}  // namespace provet
