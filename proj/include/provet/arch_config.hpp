#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "provet/error.hpp"

namespace provet {

// Energy coefficients of the SRAM/VWR/shuffler model, in dimensionless model
// units. The bit-line/word-line split follows the usual SRAM access model:
// one word access energizes W bit lines of length D and one word line of
// length W.
struct EnergyParams {
  double bl_cost_per_cell = 0.1;
  double wl_cost_per_cell = 0.2;
  double vwr_access_cost_per_bit = 0.01;
  double shuffle_cost_per_block_step = 0.05;

  bool operator==(const EnergyParams&) const = default;
};

// Parametric description of one tile: an ultra-wide shallow SRAM, a set of
// single-row very wide registers (VWRs) with asymmetric ports, and SIMD
// vector functional units (VFUs) fed through a fine-grained shuffler.
struct ArchConfig {
  std::uint32_t sram_width_bits = 4096;   // bits per SRAM word / VWR width
  std::uint32_t sram_depth_words = 8;     // word lines
  std::uint32_t vfu_width_bits = 512;     // narrow VWR port / VFU width
  std::uint32_t operand_width_bits = 8;   // bits per SIMD lane operand
  std::uint32_t vfu_count = 1;
  std::uint32_t vwr_count = 2;
  std::uint32_t tile_shuffle_max_steps = 2;   // blocks, per single op
  std::uint32_t vfu_shuffle_max_range = 4;    // operands, per single op
  EnergyParams energy;

  bool operator==(const ArchConfig&) const = default;

  // Port ratio: how many narrow (VFU-wide) slices one SRAM word contains.
  std::uint32_t port_ratio() const { return sram_width_bits / vfu_width_bits; }
  // SIMD lanes per VFU.
  std::uint32_t lane_count() const { return vfu_width_bits / operand_width_bits; }
  std::uint32_t operands_per_word() const { return port_ratio() * lane_count(); }
};

struct ConfigIssue {
  Errc code;
  std::string detail;
};

// Returns every violated invariant; empty means the config is valid.
std::vector<ConfigIssue> check(const ArchConfig& cfg);

// Returns the config unchanged if valid, otherwise throws an Error whose
// message lists every violation. Idempotent by construction.
ArchConfig validate(const ArchConfig& cfg);

// Energy of one full-width SRAM word access: W*D*BL + W*WL.
double energy_per_word_access(const ArchConfig& cfg);

// Word-access energy normalized by width: D*BL + WL. Independent of W.
double energy_per_bit(const ArchConfig& cfg);

// JSON (de)serialization. Unknown keys in the file are hard errors.
ArchConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ArchConfig& cfg);
ArchConfig load_config(const std::string& path);
void save_config(const ArchConfig& cfg, const std::string& path);

// Short stable hex digest of the canonical JSON form; used to tie programs
// and memory images to the config they were generated for.
std::string config_fingerprint(const ArchConfig& cfg);

}  // namespace provet
