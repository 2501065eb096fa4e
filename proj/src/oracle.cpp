#include "provet/oracle.hpp"

#include <algorithm>
#include <string>

namespace provet {

Tensor2D::Tensor2D(std::uint32_t r, std::uint32_t c, std::vector<std::int64_t> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != std::size_t{r} * c)
    throw Error(Errc::dim_mismatch, "tensor data length " + std::to_string(data.size()) +
                                        " != " + std::to_string(r) + "x" + std::to_string(c));
}

std::int64_t wrap_to_width(std::int64_t v, std::uint32_t width_bits) {
  if (width_bits >= 64) return v;
  const std::uint64_t mask = (std::uint64_t{1} << width_bits) - 1;
  std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
  if (u & (std::uint64_t{1} << (width_bits - 1))) u |= ~mask;
  return static_cast<std::int64_t>(u);
}

Tensor2D wrap_tensor(const Tensor2D& t, std::uint32_t width_bits) {
  Tensor2D out = t;
  for (auto& v : out.data) v = wrap_to_width(v, width_bits);
  return out;
}

Tensor2D oracle_conv2d(const Tensor2D& image, const Tensor2D& kernel, std::uint32_t stride,
                       std::uint32_t operand_width_bits) {
  if (kernel.rows > image.rows || kernel.cols > image.cols)
    throw Error(Errc::kernel_larger_than_image,
                std::to_string(kernel.rows) + "x" + std::to_string(kernel.cols) + " kernel on " +
                    std::to_string(image.rows) + "x" + std::to_string(image.cols) + " image");
  if (stride == 0) throw Error(Errc::dim_mismatch, "stride must be >= 1");

  const std::uint32_t out_h = (image.rows - kernel.rows) / stride + 1;
  const std::uint32_t out_w = (image.cols - kernel.cols) / stride + 1;
  Tensor2D out(out_h, out_w);
  for (std::uint32_t r = 0; r < out_h; ++r) {
    for (std::uint32_t c = 0; c < out_w; ++c) {
      std::int64_t acc = 0;
      for (std::uint32_t j = 0; j < kernel.rows; ++j)
        for (std::uint32_t i = 0; i < kernel.cols; ++i)
          acc += image.at(r * stride + j, c * stride + i) * kernel.at(j, i);
      out.set(r, c, wrap_to_width(acc, operand_width_bits));
    }
  }
  return out;
}

std::vector<std::int64_t> oracle_matvec(const Tensor2D& w, const std::vector<std::int64_t>& x,
                                        std::uint32_t operand_width_bits) {
  if (x.size() != w.cols)
    throw Error(Errc::dim_mismatch, "matrix is " + std::to_string(w.rows) + "x" +
                                        std::to_string(w.cols) + ", vector has " +
                                        std::to_string(x.size()) + " entries");
  std::vector<std::int64_t> out(w.rows, 0);
  for (std::uint32_t r = 0; r < w.rows; ++r) {
    std::int64_t acc = 0;
    for (std::uint32_t c = 0; c < w.cols; ++c) acc += w.at(r, c) * x[c];
    out[r] = wrap_to_width(acc, operand_width_bits);
  }
  return out;
}

namespace {

Tensor2D pool(const Tensor2D& image, std::uint32_t k, std::uint32_t stride, bool take_max,
              std::uint32_t operand_width_bits) {
  if (k > image.rows || k > image.cols)
    throw Error(Errc::kernel_larger_than_image, "pool window " + std::to_string(k) + " on " +
                                                    std::to_string(image.rows) + "x" +
                                                    std::to_string(image.cols));
  if (stride == 0) throw Error(Errc::dim_mismatch, "stride must be >= 1");
  const std::uint32_t area = k * k;
  std::uint32_t shift = 0;
  if (!take_max) {
    while ((1u << shift) < area) ++shift;
    if ((1u << shift) != area)
      throw Error(Errc::param_validation, "average pooling needs a power-of-two window area");
  }

  const std::uint32_t out_h = (image.rows - k) / stride + 1;
  const std::uint32_t out_w = (image.cols - k) / stride + 1;
  Tensor2D out(out_h, out_w);
  for (std::uint32_t r = 0; r < out_h; ++r) {
    for (std::uint32_t c = 0; c < out_w; ++c) {
      std::int64_t acc = take_max ? image.at(r * stride, c * stride) : 0;
      for (std::uint32_t j = 0; j < k; ++j)
        for (std::uint32_t i = 0; i < k; ++i) {
          const std::int64_t v = image.at(r * stride + j, c * stride + i);
          acc = take_max ? std::max(acc, v) : acc + v;
        }
      out.set(r, c, wrap_to_width(take_max ? acc : (acc >> shift), operand_width_bits));
    }
  }
  return out;
}

}  // namespace

Tensor2D oracle_maxpool(const Tensor2D& image, std::uint32_t k, std::uint32_t stride,
                        std::uint32_t operand_width_bits) {
  return pool(image, k, stride, true, operand_width_bits);
}

Tensor2D oracle_avgpool(const Tensor2D& image, std::uint32_t k, std::uint32_t stride,
                        std::uint32_t operand_width_bits) {
  return pool(image, k, stride, false, operand_width_bits);
}

}  // namespace provet
