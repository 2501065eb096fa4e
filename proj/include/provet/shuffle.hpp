#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "provet/arch_config.hpp"
#include "provet/word.hpp"

namespace provet {

// Coarse tile shuffler: rotates whole VFU-width blocks inside one wide word.
// Positive steps move block i to position (i + steps) mod N.
struct TileShuffleSpec {
  std::uint32_t block_bits = 0;  // must equal cfg.vfu_width_bits
  std::int32_t steps = 0;

  bool operator==(const TileShuffleSpec&) const = default;
};

// Fine VFU shuffler: shifts operands within one VFU width. Rotate wraps the
// vacated lanes around, zero fill injects zeros at the vacated edge.
enum class ShuffleFill { rotate, zero };

struct VfuShuffleSpec {
  std::int32_t step = 0;  // operands; positive moves lane i to lane i+step
  ShuffleFill fill = ShuffleFill::rotate;

  bool operator==(const VfuShuffleSpec&) const = default;
};

// Word-level permutation: destination lanes receive source lanes; lanes not
// named as a destination keep their prior value.
struct PermSpec {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (src, dst)

  bool operator==(const PermSpec&) const = default;
};

// Single-operation shuffles. A spec whose distance exceeds the configured
// single-op range throws StepExceedsRange; the executor decomposes long
// distances into several in-range operations instead.
WideWord tile_shuffle(const ArchConfig& cfg, const WideWord& word, const TileShuffleSpec& spec);
LaneVector vfu_shuffle(const ArchConfig& cfg, const LaneVector& v, const VfuShuffleSpec& spec);
LaneVector vfu_permute(const ArchConfig& cfg, const LaneVector& v, const PermSpec& spec);

// Energy of one in-range tile shuffle op: |steps| * N * shuffle_cost_per_block_step.
double tile_shuffle_energy(const ArchConfig& cfg, std::int32_t steps);
// Energy of one in-range VFU shuffle op: |step| * shuffle_cost_per_block_step.
double vfu_shuffle_energy(const ArchConfig& cfg, std::int32_t step);

// Splits a long distance into sequential ops, each within max_single (each
// costs one cycle). max_single == 0 with distance != 0 is unsatisfiable.
std::vector<std::int32_t> decompose_steps(std::int32_t distance, std::uint32_t max_single);

}  // namespace provet
