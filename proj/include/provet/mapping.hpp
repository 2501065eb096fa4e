#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "provet/datapath.hpp"
#include "provet/executor.hpp"
#include "provet/isa.hpp"
#include "provet/oracle.hpp"

namespace provet {

struct ConvLayerSpec {
  std::uint32_t in_h = 0, in_w = 0;
  std::uint32_t k_h = 0, k_w = 0;
  std::uint32_t channels_in = 1, channels_out = 1;
  std::uint32_t stride = 1;
  bool depthwise = false;
};

struct ExpectedCounts {
  std::uint64_t inner_iterations = 0;  // multiply-accumulate steps per row pass
  std::uint64_t row_passes = 0;
  std::uint64_t vfux_mult = 0;  // total executions of the mult mode
  std::uint64_t sram_reads_lower_bound = 0;
  std::uint64_t sram_writes = 0;
  std::uint64_t total_macs = 0;  // valid-region workload
};

// A complete mapping: data layout, instruction stream, expected counters and
// the valid output description. Input data is supplied per run through
// build_memory_image.
struct MappingPlan {
  std::string kind;  // conv2d | depthwise | fc | maxpool | avgpool | conv2d_packed
  ArchConfig cfg;
  MemoryLayout layout;
  Program program;
  ExpectedCounts expected;
  std::uint32_t stride = 1;
  std::uint32_t channels = 1;   // depthwise channels / packed image count
  std::uint32_t filters = 1;    // output maps (multi-filter conv)
  std::uint32_t k_h = 0, k_w = 0;
  // Plan-intrinsic values written into the image before user inputs
  // (e.g. the max-pool lane initializer).
  std::map<std::string, Tensor2D> constants;
};

// Folding strategies for size mismatches.
struct FoldPiece {
  std::uint32_t col0 = 0;   // first image column covered by this piece
  std::uint32_t width = 0;  // piece width in pixels
  std::uint32_t lane0 = 0;  // lane offset (pack mode)
};

struct FoldPlan {
  enum class Mode { partition_with_overlap, pack_multiple };
  Mode mode = Mode::partition_with_overlap;
  std::vector<FoldPiece> pieces;
  double duplicated_fraction = 0.0;  // duplicated pixels / total image pixels
  double lane_utilization = 1.0;     // pack mode: used lanes / L
};

// --- generators --------------------------------------------------------------

// The sliding CONV dataflow: kernel resident in VWR B, image rows streamed
// through VWR A, partial sums held in R4 and realigned with +1 rotations.
MappingPlan map_conv(const ConvLayerSpec& spec, const ArchConfig& cfg);

// Fully connected out = W*x via broadcast-multiply-accumulate over columns.
MappingPlan map_fc(std::uint32_t in_features, std::uint32_t out_features, const ArchConfig& cfg);

// Pooling reuses the CONV sliding structure with max/add accumulation.
MappingPlan map_maxpool(std::uint32_t in_h, std::uint32_t in_w, std::uint32_t k,
                        std::uint32_t stride, const ArchConfig& cfg);
MappingPlan map_avgpool(std::uint32_t in_h, std::uint32_t in_w, std::uint32_t k,
                        std::uint32_t stride, const ArchConfig& cfg);

// Two or more images sharing one kernel, packed side by side in the lanes.
MappingPlan map_conv_packed(const ConvLayerSpec& spec, std::uint32_t images,
                            const ArchConfig& cfg);

// Chooses a folding strategy when the layer does not fit the tile width.
FoldPlan plan_fold(const ConvLayerSpec& spec, const ArchConfig& cfg);

// Template library front end.
MappingPlan expand_template(const std::string& name,
                            const std::map<std::string, std::int64_t>& params,
                            const ArchConfig& cfg);

// --- data movement helpers ---------------------------------------------------

Tensor2D read_tensor(const ArchConfig& cfg, const SramState& sram, const TensorLayout& t);
void write_tensor(const ArchConfig& cfg, SramState& sram, const TensorLayout& t, const Tensor2D& v);

// Builds the initial memory image for a plan from named input tensors.
void fill_memory(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs,
                 SramState& sram);

// Valid-region output of a finished run (name defaults to "output").
Tensor2D extract_output(const MappingPlan& plan, const SramState& sram,
                        const std::string& name = "output");
Tensor2D extract_valid(const ArchConfig& cfg, const SramState& sram, const MemoryLayout& layout,
                       const std::string& name);

// Runs a plan on the given inputs and returns (report, final state).
struct PlanRun {
  RunReport report;
  MachineState state;
};
PlanRun run_plan(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs,
                 const RunOptions& opt = {});

// --- persistence ---------------------------------------------------------------

// Writes program.pvt, layout.json, expected.json, config.json and mem.bin
// (from the given inputs) into a directory.
void save_plan(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs,
               const std::string& dir);
MappingPlan load_plan(const std::string& dir);

std::string expected_to_json_text(const MappingPlan& plan);

}  // namespace provet
