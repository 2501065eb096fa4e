#include <doctest.h>

#include <random>

#include "provet/oracle.hpp"

using namespace provet;

namespace {

// Frozen case: 16x16 image and 5x5 kernel drawn from mt19937(42) over [-4,4],
// output computed by the brute-force quadruple loop and wrapped to 8 bits.
const std::vector<std::int64_t> kSeededImage = {
    -1,3,4,-3,2,3,1,1,-3,0,-3,-4,-4,0,3,-1,1,-3,2,1,-4,-4,4,2,3,4,-3,-4,-3,4,-3,1,-2,1,0,-4,
    -1,-4,-2,0,1,-1,-3,-4,-2,4,-1,-2,0,-4,3,1,-3,-1,0,4,1,0,-4,3,1,2,-3,0,-4,-4,4,4,4,1,3,-1,
    -2,-4,-4,-2,2,-2,-1,2,-3,1,0,3,-4,-3,4,-1,-2,-3,1,2,-2,-1,0,-3,0,1,-3,-4,4,3,2,0,4,-1,4,
    4,1,2,4,-2,-4,1,-3,0,-4,4,-2,3,-1,2,-2,0,3,1,-1,4,-2,1,0,-2,-3,-2,3,-3,-4,-4,4,-1,2,-1,
    -3,-2,-4,-4,3,-3,2,2,2,3,2,1,-4,4,-1,1,-3,4,3,3,1,0,-2,-4,-4,-1,-2,2,-2,1,2,1,1,-2,3,1,
    0,-1,-3,4,2,3,2,2,1,-2,2,-2,0,-4,0,2,-1,-4,-4,-1,-4,-3,-4,4,1,0,-2,1,0,2,4,-3,-2,1,-1,0,
    2,-3,-2,4,-4,1,-2,2,-3,3,4,1,3,-2,1,-4,3,0,3,-3,-3,-1,4,3,0,-2,3,-3,4,-1,-2,4,-4,-2,-2,
    1,-1,-4,3,-1,3,-2};
const std::vector<std::int64_t> kSeededKernel = {
    -4,-3,0,0,-1,0,-3,2,-3,-2,-1,-2,4,-3,-2,-3,0,1,2,-1,-1,-4,4,-2,4};
const std::vector<std::int64_t> kSeededConvOut = {
    77,-9,-3,-45,7,-53,-5,6,33,3,54,67,40,56,-18,-15,39,-10,-17,-5,-34,24,23,47,62,-4,26,-4,41,
    15,31,-3,3,37,31,3,-28,52,-61,34,13,36,-26,-6,7,44,15,-12,13,-28,-6,-44,27,-71,38,-47,71,16,
    4,-14,57,-34,-16,37,5,-1,-70,18,-23,43,-60,11,-8,11,-24,29,-20,26,-44,-13,-12,-19,12,-59,32,
    -6,-2,32,22,0,21,-27,-6,-25,48,-33,2,-42,7,28,5,27,-16,72,-39,22,-34,34,16,12,-12,19,-2,-21,
    -31,48,-52,4,-7,10,0,-45,17,18,48,-20,-5,14,23,-16,42,-27,-2,19,-43,72,-5,1,-50,26,-47,-8,
    51,6};

// Frozen case: 8x8 matrix and vector from mt19937(7) over [-4,4].
const std::vector<std::int64_t> kSeededW = {
    -4,-2,3,-2,-1,4,2,0,4,-2,0,-2,0,-4,-4,-1,-2,-4,0,0,2,3,3,-2,-1,-1,-4,2,-2,2,4,2,-3,-1,0,4,
    4,-2,-4,2,1,-2,4,3,-2,-3,0,3,4,4,-3,0,0,-1,2,-1,2,-3,0,-4,-3,0,0,1};
const std::vector<std::int64_t> kSeededX = {-1, 4, 0, -1, -1, -2, 3, 0};
const std::vector<std::int64_t> kSeededY = {-3, -14, -13, 5, -17, -4, 20, -7};

Tensor2D constant_image(std::uint32_t n, std::int64_t c) {
  Tensor2D t(n, n);
  for (auto& v : t.data) v = c;
  return t;
}

}  // namespace

TEST_CASE("1x1 unit kernel leaves the image unchanged") {
  Tensor2D img(3, 4, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const Tensor2D out = oracle_conv2d(img, Tensor2D(1, 1, {1}), 1);
  CHECK(out == img);
}

TEST_CASE("3x3 ones kernel over a constant image gives 9c in the interior") {
  Tensor2D ones(3, 3, std::vector<std::int64_t>(9, 1));
  const Tensor2D out = oracle_conv2d(constant_image(6, 5), ones, 1);
  CHECK(out.rows == 4);
  CHECK(out.cols == 4);
  for (auto v : out.data) CHECK(v == 45);
}

TEST_CASE("frozen seeded 16x16 / 5x5 case") {
  const Tensor2D img(16, 16, kSeededImage);
  const Tensor2D ker(5, 5, kSeededKernel);
  const Tensor2D out = oracle_conv2d(img, ker, 1, 8);
  CHECK(out == Tensor2D(12, 12, kSeededConvOut));
}

TEST_CASE("matvec: identity, ones row, frozen seeded case") {
  Tensor2D eye(4, 4);
  for (std::uint32_t i = 0; i < 4; ++i) eye.set(i, i, 1);
  const std::vector<std::int64_t> x{7, -2, 0, 5};
  CHECK(oracle_matvec(eye, x) == x);

  Tensor2D ones_row(1, 4, {1, 1, 1, 1});
  CHECK(oracle_matvec(ones_row, x) == std::vector<std::int64_t>{10});

  CHECK(oracle_matvec(Tensor2D(8, 8, kSeededW), kSeededX, 8) == kSeededY);
}

TEST_CASE("oracle errors") {
  CHECK_THROWS_AS(oracle_conv2d(Tensor2D(2, 2), Tensor2D(3, 3), 1), Error);
  CHECK_THROWS_AS(oracle_matvec(Tensor2D(2, 3), {1, 2}), Error);
  CHECK_THROWS_AS(Tensor2D(2, 2, {1, 2, 3}), Error);
}

TEST_CASE("translation equivariance: shifting the image shifts the valid output") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int iter = 0; iter < 50; ++iter) {
    Tensor2D img(10, 10);
    for (auto& v : img.data) v = d(rng);
    Tensor2D ker(3, 3);
    for (auto& v : ker.data) v = d(rng);

    Tensor2D shifted(10, 10);
    for (std::uint32_t r = 1; r < 10; ++r)
      for (std::uint32_t c = 1; c < 10; ++c) shifted.set(r, c, img.at(r - 1, c - 1));

    const Tensor2D a = oracle_conv2d(img, ker, 1);
    const Tensor2D b = oracle_conv2d(shifted, ker, 1);
    for (std::uint32_t r = 0; r + 1 < a.rows; ++r)
      for (std::uint32_t c = 0; c + 1 < a.cols; ++c) CHECK(b.at(r + 1, c + 1) == a.at(r, c));
  }
}

TEST_CASE("linearity before width reduction") {
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> d(-4, 4);
  Tensor2D img(8, 8), ker(3, 3);
  for (auto& v : img.data) v = d(rng);
  for (auto& v : ker.data) v = d(rng);
  Tensor2D img3 = img;
  for (auto& v : img3.data) v *= 3;
  const Tensor2D a = oracle_conv2d(img, ker, 1);
  const Tensor2D b = oracle_conv2d(img3, ker, 1);
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(b.data[i] == 3 * a.data[i]);
}

TEST_CASE("maxpool and avgpool") {
  Tensor2D t(2, 2, {1, 2, 3, 4});
  CHECK(oracle_maxpool(t, 2, 2).at(0, 0) == 4);
  CHECK(oracle_avgpool(constant_image(4, 7), 2, 2) == constant_image(2, 7));
  // Negative sums divide toward minus infinity, matching the datapath shift.
  Tensor2D neg(2, 2, {-1, 0, 0, 0});
  CHECK(oracle_avgpool(neg, 2, 2).at(0, 0) == -1);
  CHECK_THROWS_AS(oracle_avgpool(constant_image(3, 1), 3, 1), Error);  // 9 not a power of two
}
