#pragma once

#include <cstdint>
#include <vector>

#include "provet/arch_config.hpp"
#include "provet/error.hpp"

namespace provet {

// One SIMD vector: L two's-complement lanes of operand_width_bits each.
// Lane values are kept normalized to [-2^(w-1), 2^(w-1)-1]; every mutation
// wraps back into that range.
class LaneVector {
 public:
  LaneVector() = default;
  LaneVector(std::size_t lanes, std::uint32_t operand_width_bits);
  LaneVector(std::vector<std::int64_t> lanes, std::uint32_t operand_width_bits);

  std::size_t size() const { return lanes_.size(); }
  std::uint32_t operand_width_bits() const { return width_; }

  std::int64_t at(std::size_t i) const { return lanes_.at(i); }
  void set(std::size_t i, std::int64_t v) { lanes_.at(i) = wrap(v); }

  const std::vector<std::int64_t>& lanes() const { return lanes_; }

  std::int64_t min_value() const { return -(std::int64_t{1} << (width_ - 1)); }
  std::int64_t max_value() const { return (std::int64_t{1} << (width_ - 1)) - 1; }
  std::int64_t wrap(std::int64_t v) const;

  bool operator==(const LaneVector&) const = default;

 private:
  std::vector<std::int64_t> lanes_;
  std::uint32_t width_ = 8;
};

// One ultra-wide word: a fixed-length bit vector of sram_width_bits,
// addressable as port_ratio() slices of vfu_width_bits or as flat operands.
// Slice 0 is the least-significant vfu_width_bits; operand 0 is the
// least-significant operand of its slice.
class WideWord {
 public:
  WideWord() = default;
  explicit WideWord(std::uint32_t width_bits);

  std::uint32_t width_bits() const { return width_bits_; }

  // Raw bit-field access; width <= 64, may not cross the word end.
  std::uint64_t get_bits(std::uint32_t offset, std::uint32_t width) const;
  void set_bits(std::uint32_t offset, std::uint32_t width, std::uint64_t value);

  // Operand access by flat index (sign-extended / wrapped two's complement).
  std::int64_t get_operand(std::uint32_t flat_index, std::uint32_t operand_width_bits) const;
  void set_operand(std::uint32_t flat_index, std::uint32_t operand_width_bits, std::int64_t value);

  // Slice <-> lane-vector conversion.
  LaneVector get_slice(const ArchConfig& cfg, std::uint32_t slice_idx) const;
  void set_slice(const ArchConfig& cfg, std::uint32_t slice_idx, const LaneVector& v);

  // Raw block (vfu-width bit group) copy, used by the tile shuffler.
  std::vector<std::uint64_t> raw() const { return storage_; }

  bool operator==(const WideWord&) const = default;

 private:
  std::uint32_t width_bits_ = 0;
  std::vector<std::uint64_t> storage_;
};

WideWord word_from_operands(const ArchConfig& cfg, const std::vector<std::int64_t>& ops);
std::vector<std::int64_t> operands_from_word(const ArchConfig& cfg, const WideWord& w);

}  // namespace provet
