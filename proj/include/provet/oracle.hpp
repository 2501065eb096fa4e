#pragma once

#include <cstdint>
#include <vector>

#include "provet/error.hpp"

namespace provet {

// Plain row-major integer matrix used as ground truth for the mappings.
struct Tensor2D {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::int64_t> data;  // rows*cols, row-major

  Tensor2D() = default;
  Tensor2D(std::uint32_t r, std::uint32_t c) : rows(r), cols(c), data(std::size_t{r} * c, 0) {}
  Tensor2D(std::uint32_t r, std::uint32_t c, std::vector<std::int64_t> d);

  std::int64_t at(std::uint32_t r, std::uint32_t c) const { return data.at(idx(r, c)); }
  void set(std::uint32_t r, std::uint32_t c, std::int64_t v) { data.at(idx(r, c)) = v; }

  bool operator==(const Tensor2D&) const = default;

 private:
  std::size_t idx(std::uint32_t r, std::uint32_t c) const {
    return std::size_t{r} * cols + c;
  }
};

// Wraps a value into two's-complement range of the given width.
std::int64_t wrap_to_width(std::int64_t v, std::uint32_t width_bits);
Tensor2D wrap_tensor(const Tensor2D& t, std::uint32_t width_bits);

// Valid-region cross-correlation (no kernel flip) with unbounded integer
// accumulation, reduced to operand width at the end. Deliberately naive.
Tensor2D oracle_conv2d(const Tensor2D& image, const Tensor2D& kernel, std::uint32_t stride = 1,
                       std::uint32_t operand_width_bits = 64);

// Exact integer matrix-vector product, wrapped at the end.
std::vector<std::int64_t> oracle_matvec(const Tensor2D& w, const std::vector<std::int64_t>& x,
                                        std::uint32_t operand_width_bits = 64);

// Valid-region pooling. Average divides by an arithmetic right shift, so the
// window area must be a power of two.
Tensor2D oracle_maxpool(const Tensor2D& image, std::uint32_t k, std::uint32_t stride,
                        std::uint32_t operand_width_bits = 64);
Tensor2D oracle_avgpool(const Tensor2D& image, std::uint32_t k, std::uint32_t stride,
                        std::uint32_t operand_width_bits = 64);

}  // namespace provet
