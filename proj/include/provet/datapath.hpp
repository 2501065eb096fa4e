#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "provet/arch_config.hpp"
#include "provet/word.hpp"

namespace provet {

// Ultra-wide shallow SRAM with exact access and energy metering. Reads of
// uninitialized storage return zero words.
class SramState {
 public:
  SramState() = default;
  explicit SramState(const ArchConfig& cfg);

  WideWord read(std::uint32_t addr);
  void write(std::uint32_t addr, const WideWord& word);

  // Unmetered access for loading images and inspecting results.
  const WideWord& peek(std::uint32_t addr) const;
  void poke(std::uint32_t addr, const WideWord& word);

  std::uint64_t reads() const { return reads_; }
  std::uint64_t writes() const { return writes_; }
  double energy_accum() const { return energy_; }
  std::uint32_t depth() const { return static_cast<std::uint32_t>(words_.size()); }

  // Extra metered accesses charged by the VWR-bypass baseline mode.
  void charge_bypass_access();

 private:
  void check_addr(std::uint32_t addr) const;

  ArchConfig cfg_;
  std::vector<WideWord> words_;
  std::uint64_t reads_ = 0;
  std::uint64_t writes_ = 0;
  double energy_ = 0.0;
};

// Single-row very wide register with asymmetric ports: the wide side moves
// whole SRAM words, the narrow side moves one VFU-width slice (or a single
// operand, for broadcasts) per access.
class VwrState {
 public:
  VwrState() = default;
  explicit VwrState(const ArchConfig& cfg);

  void load_wide(const WideWord& word);
  const WideWord& store_wide();  // metered read of the full word
  LaneVector read_slice(std::uint32_t slice_idx);
  void write_slice(std::uint32_t slice_idx, const LaneVector& v);
  std::int64_t read_operand(std::uint32_t flat_index);  // metered as one narrow read

  const WideWord& peek() const { return word_; }
  void poke(const WideWord& word) { word_ = word; }

  std::uint64_t wide_loads() const { return wide_loads_; }
  std::uint64_t wide_stores() const { return wide_stores_; }
  std::uint64_t narrow_reads() const { return narrow_reads_; }
  std::uint64_t narrow_writes() const { return narrow_writes_; }
  double energy_accum() const { return energy_; }

 private:
  ArchConfig cfg_;
  WideWord word_;
  std::uint64_t wide_loads_ = 0;
  std::uint64_t wide_stores_ = 0;
  std::uint64_t narrow_reads_ = 0;
  std::uint64_t narrow_writes_ = 0;
  double energy_ = 0.0;
};

// The four local registers of one VFU; each is VFU-wide.
struct LocalRegs {
  std::array<LaneVector, 4> regs;  // R1..R4 at indices 0..3

  LocalRegs() = default;
  explicit LocalRegs(const ArchConfig& cfg);

  LaneVector& r(std::uint32_t idx1based);
  const LaneVector& r(std::uint32_t idx1based) const;
};

// --- Memory image files -----------------------------------------------------
//
// A memory image is the raw SRAM contents (word 0 first, little-endian bytes
// within a word) plus a JSON layout descriptor mapping named tensors to
// word/slice/lane positions.

struct TensorRowPlacement {
  std::uint32_t row = 0;
  std::uint32_t word = 0;
  std::uint32_t slice = 0;
  std::uint32_t lane0 = 0;
};

struct ValidRegion {
  std::uint32_t row0 = 0, rows = 0;
  std::uint32_t col0 = 0, cols = 0;
  std::uint32_t row_stride = 1;  // output row r maps to stored row row0 + r*row_stride
  std::uint32_t col_stride = 1;  // output col c maps to lane col0 + c*col_stride

  bool operator==(const ValidRegion&) const = default;
};

struct TensorLayout {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  // Row-mapped tensors place each row in a slice; flat tensors start at one
  // operand offset inside a word and run row-major. Column-major tensors map
  // each rowmap entry to a column spread along the lanes.
  bool flat = false;
  bool col_major = false;
  std::uint32_t flat_word = 0;
  std::uint32_t flat_op0 = 0;
  std::vector<TensorRowPlacement> rowmap;
  bool has_valid = false;
  ValidRegion valid;
};

struct MemoryLayout {
  std::uint32_t words = 0;
  std::uint32_t operand_width_bits = 8;
  std::vector<TensorLayout> tensors;

  const TensorLayout* find(const std::string& name) const;
};

std::vector<std::uint8_t> sram_to_bytes(const ArchConfig& cfg, const SramState& sram);
void bytes_to_sram(const ArchConfig& cfg, const std::vector<std::uint8_t>& bytes, SramState& sram);

void save_memory_image(const ArchConfig& cfg, const SramState& sram, const std::string& bin_path);
void load_memory_image(const ArchConfig& cfg, SramState& sram, const std::string& bin_path);

std::string layout_to_json_text(const MemoryLayout& layout);
MemoryLayout layout_from_json_text(const std::string& text);
void save_layout(const MemoryLayout& layout, const std::string& path);
MemoryLayout load_layout(const std::string& path);

}  // namespace provet
