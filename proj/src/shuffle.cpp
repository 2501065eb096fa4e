#include "provet/shuffle.hpp"

#include <cstdlib>
#include <string>

namespace provet {

WideWord tile_shuffle(const ArchConfig& cfg, const WideWord& word, const TileShuffleSpec& spec) {
  if (spec.block_bits != cfg.vfu_width_bits)
    throw Error(Errc::block_size_mismatch,
                "tile shuffle block is " + std::to_string(spec.block_bits) + " bits, VFU width is " +
                    std::to_string(cfg.vfu_width_bits));
  if (word.width_bits() != cfg.sram_width_bits)
    throw Error(Errc::width_mismatch, "word width " + std::to_string(word.width_bits()) +
                                          " != sram width " + std::to_string(cfg.sram_width_bits));
  const auto n = static_cast<std::int32_t>(cfg.port_ratio());
  if (std::abs(spec.steps) > static_cast<std::int32_t>(cfg.tile_shuffle_max_steps))
    throw Error(Errc::step_exceeds_range,
                "tile shuffle of " + std::to_string(spec.steps) + " blocks exceeds single-op range " +
                    std::to_string(cfg.tile_shuffle_max_steps));

  WideWord out(word.width_bits());
  const std::uint32_t block = cfg.vfu_width_bits;
  for (std::int32_t i = 0; i < n; ++i) {
    const std::int32_t dst = ((i + spec.steps) % n + n) % n;
    // Copy block i -> dst, 64 bits at a time.
    for (std::uint32_t off = 0; off < block; off += 64) {
      const std::uint32_t chunk = std::min<std::uint32_t>(64, block - off);
      out.set_bits(static_cast<std::uint32_t>(dst) * block + off, chunk,
                   word.get_bits(static_cast<std::uint32_t>(i) * block + off, chunk));
    }
  }
  return out;
}

LaneVector vfu_shuffle(const ArchConfig& cfg, const LaneVector& v, const VfuShuffleSpec& spec) {
  const auto l = static_cast<std::int32_t>(v.size());
  if (std::abs(spec.step) > static_cast<std::int32_t>(cfg.vfu_shuffle_max_range))
    throw Error(Errc::step_exceeds_range,
                "vfu shuffle of " + std::to_string(spec.step) + " operands exceeds single-op range " +
                    std::to_string(cfg.vfu_shuffle_max_range));
  LaneVector out(v.size(), v.operand_width_bits());
  for (std::int32_t i = 0; i < l; ++i) {
    const std::int32_t src = i - spec.step;
    if (spec.fill == ShuffleFill::rotate) {
      out.set(static_cast<std::size_t>(i), v.at(static_cast<std::size_t>((src % l + l) % l)));
    } else if (src >= 0 && src < l) {
      out.set(static_cast<std::size_t>(i), v.at(static_cast<std::size_t>(src)));
    }
  }
  return out;
}

LaneVector vfu_permute(const ArchConfig& cfg, const LaneVector& v, const PermSpec& spec) {
  (void)cfg;
  const std::uint32_t l = static_cast<std::uint32_t>(v.size());
  std::vector<bool> taken(l, false);
  for (const auto& [src, dst] : spec.pairs) {
    if (src >= l || dst >= l)
      throw Error(Errc::index_out_of_range, "permutation pair (" + std::to_string(src) + " -> " +
                                                std::to_string(dst) + ") outside " +
                                                std::to_string(l) + " lanes");
    if (taken[dst])
      throw Error(Errc::duplicate_destination, "lane " + std::to_string(dst) + " written twice");
    taken[dst] = true;
  }
  LaneVector out = v;
  for (const auto& [src, dst] : spec.pairs) out.set(dst, v.at(src));
  return out;
}

double tile_shuffle_energy(const ArchConfig& cfg, std::int32_t steps) {
  return std::abs(steps) * static_cast<double>(cfg.port_ratio()) *
         cfg.energy.shuffle_cost_per_block_step;
}

double vfu_shuffle_energy(const ArchConfig& cfg, std::int32_t step) {
  return std::abs(step) * cfg.energy.shuffle_cost_per_block_step;
}

std::vector<std::int32_t> decompose_steps(std::int32_t distance, std::uint32_t max_single) {
  if (distance == 0) return {0};
  if (max_single == 0)
    throw Error(Errc::step_exceeds_range, "shuffle range is 0, distance " +
                                              std::to_string(distance) + " cannot be decomposed");
  std::vector<std::int32_t> ops;
  const std::int32_t sign = distance < 0 ? -1 : 1;
  std::int64_t remaining = std::abs(static_cast<std::int64_t>(distance));
  while (remaining > 0) {
    const std::int64_t s = std::min<std::int64_t>(remaining, max_single);
    ops.push_back(sign * static_cast<std::int32_t>(s));
    remaining -= s;
  }
  return ops;
}

}  // namespace provet
