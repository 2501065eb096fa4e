#include "provet/word.hpp"

#include <string>

namespace provet {

LaneVector::LaneVector(std::size_t lanes, std::uint32_t operand_width_bits)
    : lanes_(lanes, 0), width_(operand_width_bits) {}

LaneVector::LaneVector(std::vector<std::int64_t> lanes, std::uint32_t operand_width_bits)
    : lanes_(std::move(lanes)), width_(operand_width_bits) {
  for (auto& v : lanes_) v = wrap(v);
}

std::int64_t LaneVector::wrap(std::int64_t v) const {
  if (width_ >= 64) return v;
  const std::uint64_t mask = (std::uint64_t{1} << width_) - 1;
  std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
  // Sign-extend.
  if (u & (std::uint64_t{1} << (width_ - 1))) u |= ~mask;
  return static_cast<std::int64_t>(u);
}

WideWord::WideWord(std::uint32_t width_bits)
    : width_bits_(width_bits), storage_((width_bits + 63) / 64, 0) {}

std::uint64_t WideWord::get_bits(std::uint32_t offset, std::uint32_t width) const {
  if (width == 0 || width > 64 || offset + width > width_bits_)
    throw Error(Errc::index_out_of_range,
                "bit range [" + std::to_string(offset) + ", +" + std::to_string(width) +
                    ") outside word of " + std::to_string(width_bits_) + " bits");
  const std::uint32_t idx = offset / 64;
  const std::uint32_t sh = offset % 64;
  std::uint64_t v = storage_[idx] >> sh;
  if (sh != 0 && idx + 1 < storage_.size()) v |= storage_[idx + 1] << (64 - sh);
  if (width < 64) v &= (std::uint64_t{1} << width) - 1;
  return v;
}

void WideWord::set_bits(std::uint32_t offset, std::uint32_t width, std::uint64_t value) {
  if (width == 0 || width > 64 || offset + width > width_bits_)
    throw Error(Errc::index_out_of_range,
                "bit range [" + std::to_string(offset) + ", +" + std::to_string(width) +
                    ") outside word of " + std::to_string(width_bits_) + " bits");
  const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  value &= mask;
  const std::uint32_t idx = offset / 64;
  const std::uint32_t sh = offset % 64;
  storage_[idx] = (storage_[idx] & ~(mask << sh)) | (value << sh);
  if (sh != 0 && sh + width > 64) {
    const std::uint32_t hi = sh + width - 64;  // bits spilling into the next limb
    const std::uint64_t himask = (std::uint64_t{1} << hi) - 1;
    storage_[idx + 1] = (storage_[idx + 1] & ~himask) | (value >> (64 - sh));
  }
}

std::int64_t WideWord::get_operand(std::uint32_t flat_index, std::uint32_t w) const {
  std::uint64_t raw = get_bits(flat_index * w, w);
  if (w < 64 && (raw & (std::uint64_t{1} << (w - 1)))) raw |= ~((std::uint64_t{1} << w) - 1);
  return static_cast<std::int64_t>(raw);
}

void WideWord::set_operand(std::uint32_t flat_index, std::uint32_t w, std::int64_t value) {
  set_bits(flat_index * w, w, static_cast<std::uint64_t>(value));
}

LaneVector WideWord::get_slice(const ArchConfig& cfg, std::uint32_t slice_idx) const {
  if (slice_idx >= cfg.port_ratio())
    throw Error(Errc::slice_out_of_range, "slice " + std::to_string(slice_idx) + " of " +
                                              std::to_string(cfg.port_ratio()));
  const std::uint32_t l = cfg.lane_count();
  LaneVector v(l, cfg.operand_width_bits);
  for (std::uint32_t i = 0; i < l; ++i)
    v.set(i, get_operand(slice_idx * l + i, cfg.operand_width_bits));
  return v;
}

void WideWord::set_slice(const ArchConfig& cfg, std::uint32_t slice_idx, const LaneVector& v) {
  if (slice_idx >= cfg.port_ratio())
    throw Error(Errc::slice_out_of_range, "slice " + std::to_string(slice_idx) + " of " +
                                              std::to_string(cfg.port_ratio()));
  if (v.size() != cfg.lane_count())
    throw Error(Errc::lane_count_mismatch, "vector has " + std::to_string(v.size()) +
                                               " lanes, slice needs " +
                                               std::to_string(cfg.lane_count()));
  const std::uint32_t l = cfg.lane_count();
  for (std::uint32_t i = 0; i < l; ++i)
    set_operand(slice_idx * l + i, cfg.operand_width_bits, v.at(i));
}

WideWord word_from_operands(const ArchConfig& cfg, const std::vector<std::int64_t>& ops) {
  WideWord w(cfg.sram_width_bits);
  const std::uint32_t n = cfg.operands_per_word();
  for (std::uint32_t i = 0; i < n && i < ops.size(); ++i)
    w.set_operand(i, cfg.operand_width_bits, ops[i]);
  return w;
}

std::vector<std::int64_t> operands_from_word(const ArchConfig& cfg, const WideWord& w) {
  std::vector<std::int64_t> ops(cfg.operands_per_word());
  for (std::uint32_t i = 0; i < ops.size(); ++i)
    ops[i] = w.get_operand(i, cfg.operand_width_bits);
  return ops;
}

}  // namespace provet
