#include <doctest.h>

#include <algorithm>
#include <random>

#include "provet/vfu.hpp"

using namespace provet;

namespace {

LaneVector lv(std::vector<std::int64_t> v) { return LaneVector(std::move(v), 8); }

}  // namespace

TEST_CASE("mult is the elementwise product") {
  CHECK(vfu_execute(VfuMode::mult, lv({2, 3}), lv({4, 5}), lv({0, 0})) == lv({8, 15}));
}

TEST_CASE("relu clamps negatives to zero") {
  CHECK(vfu_execute(VfuMode::relu, lv({-3, 5}), lv({0, 0}), lv({0, 0})) == lv({0, 5}));
}

TEST_CASE("tanh of zero is zero in any fixed-point format") {
  const LaneVector z(16, 8);
  CHECK(vfu_execute(VfuMode::tanh, z, z, z) == z);
}

TEST_CASE("sigmoid of zero is one half: 16 in 5-fraction-bit fixed point") {
  CHECK(vfu_execute(VfuMode::sigmoid, lv({0}), lv({0}), lv({0})) == lv({16}));
}

TEST_CASE("mult-accumulate adds the product into acc") {
  CHECK(vfu_execute(VfuMode::mult_acc, lv({2}), lv({3}), lv({10})) == lv({16}));
}

TEST_CASE("accumulate modes equal op-then-add under wrap") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> d(-128, 127);
  for (int iter = 0; iter < 300; ++iter) {
    LaneVector a(8, 8), b(8, 8), acc(8, 8);
    for (std::size_t i = 0; i < 8; ++i) {
      a.set(i, d(rng));
      b.set(i, d(rng));
      acc.set(i, d(rng));
    }
    const LaneVector mac = vfu_execute(VfuMode::mult_acc, a, b, acc);
    const LaneVector two_step =
        vfu_execute(VfuMode::add, vfu_execute(VfuMode::mult, a, b, acc), acc, acc);
    CHECK(mac == two_step);
  }
}

TEST_CASE("arithmetic wraps at the operand width") {
  CHECK(vfu_execute(VfuMode::add, lv({127}), lv({1}), lv({0})) == lv({-128}));
  CHECK(vfu_execute(VfuMode::mult, lv({16}), lv({16}), lv({0})) == lv({0}));
}

TEST_CASE("clip saturates into the immediate bit width") {
  const LaneVector in = lv({-100, -8, 0, 7, 100});
  const LaneVector out = vfu_execute(VfuMode::clip, in, in, in, 4);
  CHECK(out == lv({-8, -8, 0, 7, 7}));
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.at(i) >= -8);
    CHECK(out.at(i) <= 7);
  }
}

TEST_CASE("shift: positive immediates shift left with wrap, negative arithmetic right") {
  CHECK(vfu_execute(VfuMode::shift, lv({3, -2}), lv({0, 0}), lv({0, 0}), 2) == lv({12, -8}));
  CHECK(vfu_execute(VfuMode::shift, lv({-3, 8}), lv({0, 0}), lv({0, 0}), -1) == lv({-2, 4}));
}

TEST_CASE("max picks the larger lane") {
  CHECK(vfu_execute(VfuMode::max, lv({-1, 5}), lv({2, 3}), lv({0, 0})) == lv({2, 5}));
}

TEST_CASE("lane count mismatches are rejected") {
  try {
    vfu_execute(VfuMode::add, lv({1, 2}), lv({1}), lv({0, 0}));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::lane_count_mismatch);
  }
}

TEST_CASE("every mode is elementwise: permuting inputs permutes outputs") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> d(-128, 127);
  for (int m = 0; m < kVfuModeCount; ++m) {
    const auto mode = static_cast<VfuMode>(m);
    LaneVector a(8, 8), b(8, 8), acc(8, 8);
    for (std::size_t i = 0; i < 8; ++i) {
      a.set(i, d(rng));
      b.set(i, d(rng));
      acc.set(i, d(rng));
    }
    std::vector<std::size_t> perm{3, 1, 7, 0, 5, 2, 6, 4};
    LaneVector pa(8, 8), pb(8, 8), pacc(8, 8);
    for (std::size_t i = 0; i < 8; ++i) {
      pa.set(i, a.at(perm[i]));
      pb.set(i, b.at(perm[i]));
      pacc.set(i, acc.at(perm[i]));
    }
    const LaneVector out = vfu_execute(mode, a, b, acc, 2);
    const LaneVector pout = vfu_execute(mode, pa, pb, pacc, 2);
    for (std::size_t i = 0; i < 8; ++i) CHECK(pout.at(i) == out.at(perm[i]));
  }
}

TEST_CASE("fixed-point spot values: one unit of input is 32") {
  // sigmoid(1.0)*32 = 23.39 -> 23; tanh(1.0)*32 = 24.37 -> 24; tanh(-4.0) -> -32.
  CHECK(vfu_execute(VfuMode::sigmoid, lv({32}), lv({0}), lv({0})) == lv({23}));
  CHECK(vfu_execute(VfuMode::tanh, lv({32}), lv({0}), lv({0})) == lv({24}));
  CHECK(vfu_execute(VfuMode::tanh, lv({-128}), lv({0}), lv({0})) == lv({-32}));
  CHECK(vfu_execute(VfuMode::sigmoid, lv({-128}), lv({0}), lv({0})) == lv({1}));
}

TEST_CASE("sigmoid and tanh are monotone and bounded over the full input range") {
  std::int64_t prev_sig = -1000, prev_tanh = -1000;
  for (std::int64_t x = -128; x <= 127; ++x) {
    const auto sig = vfu_execute(VfuMode::sigmoid, lv({x}), lv({0}), lv({0})).at(0);
    const auto th = vfu_execute(VfuMode::tanh, lv({x}), lv({0}), lv({0})).at(0);
    CHECK(sig >= prev_sig);
    CHECK(th >= prev_tanh);
    CHECK(sig >= 0);
    CHECK(sig <= 32);   // 1.0 in Q.5
    CHECK(th >= -32);
    CHECK(th <= 32);
    prev_sig = sig;
    prev_tanh = th;
  }
}

TEST_CASE("scalar calc covers loop bookkeeping") {
  CHECK(vfu_scalar_calc(CalcOp::add, 3, 4) == 7);
  CHECK(vfu_scalar_calc(CalcOp::sub, 4, 4) == 0);
  CHECK(vfu_scalar_calc(CalcOp::cmplt, 2, 5) == 1);
  CHECK(vfu_scalar_calc(CalcOp::cmplt, 5, 2) == 0);
  CHECK(vfu_scalar_calc(CalcOp::cmpeq, 5, 5) == 1);
  CHECK(vfu_scalar_calc(CalcOp::divi, 19, 4) == 4);
  CHECK(vfu_scalar_calc(CalcOp::modi, 19, 4) == 3);
  CHECK_THROWS_AS(vfu_scalar_calc(CalcOp::divi, 1, 0), Error);
}
