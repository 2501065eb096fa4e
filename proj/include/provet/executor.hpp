#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "provet/datapath.hpp"
#include "provet/isa.hpp"

namespace provet {

// Per-component control-action counters (the distributed loop-buffer model).
// An LB update happens the first time a program location is executed; loop
// re-executions fire the stored control word without an update.
struct ControlActionTrace {
  std::uint64_t vfu_config_actions = 0;
  std::uint64_t vwr_enable_actions = 0;
  std::uint64_t reg_enable_actions = 0;
  std::uint64_t mux_select_actions = 0;
  std::uint64_t lb_update_events = 0;

  std::uint64_t total_actions() const {
    return vfu_config_actions + vwr_enable_actions + reg_enable_actions + mux_select_actions;
  }
};

// Full mutable state of one tile plus all access metering.
struct MachineState {
  ArchConfig cfg;
  SramState sram;
  std::vector<VwrState> vwrs;
  std::vector<LocalRegs> regs;  // one set per VFU
  std::array<std::int64_t, 8> counters{};
  std::uint64_t pc = 0;
  std::uint64_t cycle = 0;
  bool halted = false;

  std::array<std::uint64_t, kVfuModeCount> vfux_by_mode{};
  std::uint64_t shuffle_ops = 0;
  double shuffle_energy = 0.0;
  std::uint64_t instructions_executed = 0;
  ControlActionTrace trace;
  std::vector<bool> pc_seen;

  MachineState() = default;
  explicit MachineState(const ArchConfig& cfg);
};

struct RunOptions {
  std::uint64_t max_cycles = 50'000'000;
  // Baseline mode: every VFU operand fetch from a VWR is metered as a fresh
  // SRAM access, modelling a machine without the asymmetric register.
  bool vwr_bypass = false;
  std::ostream* trace_out = nullptr;  // per-cycle CSV rows when set
};

enum class StopReason { halted, cycle_limit };

struct VwrCounters {
  std::uint64_t wide_loads = 0;
  std::uint64_t wide_stores = 0;
  std::uint64_t narrow_reads = 0;
  std::uint64_t narrow_writes = 0;
};

struct RunReport {
  std::uint64_t cycles = 0;
  std::uint64_t instructions_executed = 0;
  StopReason stop = StopReason::halted;

  std::uint64_t sram_reads = 0;
  std::uint64_t sram_writes = 0;
  double sram_energy = 0.0;

  std::vector<VwrCounters> vwrs;
  std::uint64_t vwr_narrow_reads = 0;   // summed over VWRs
  std::uint64_t vwr_narrow_writes = 0;
  std::uint64_t vwr_wide_loads = 0;
  std::uint64_t vwr_wide_stores = 0;
  double vwr_energy = 0.0;

  std::array<std::uint64_t, kVfuModeCount> vfux_by_mode{};
  std::uint64_t vfux_total = 0;
  std::uint64_t vfux_mult_ops = 0;  // executions of the mult mode

  std::uint64_t shuffle_ops = 0;
  double shuffle_energy = 0.0;

  ControlActionTrace trace;

  double total_energy() const { return sram_energy + vwr_energy + shuffle_energy; }
};

RunReport make_report(const MachineState& st, StopReason stop);
std::string report_to_json_text(const RunReport& r);
RunReport report_from_json_text(const std::string& text);

struct StepResult {
  std::uint64_t cycles = 1;
  bool branched = false;
};

// Executes the instruction at pc. Component errors surface as
// SimulationFault with pc and instruction context; no partial effects of the
// faulting instruction remain visible.
StepResult step(MachineState& st, const Program& p, const RunOptions& opt = {});

// Runs to halt or cycle limit and reports the final counters.
RunReport run(MachineState& st, const Program& p, const RunOptions& opt = {});

// Per-VFU instruction streams (one program per VFU). Streams share the SRAM
// and VWRs but own their registers and scalar counters; only stream 0 may
// issue the structural RLB/WLB/GLMV ops.
RunReport run_per_vfu_streams(MachineState& st, const std::vector<Program>& programs,
                              const RunOptions& opt = {});

struct LoopBufferSummary {
  std::uint64_t total_actions = 0;
  std::uint64_t lb_update_events = 0;
  double actions_per_update = 0.0;
};

LoopBufferSummary loop_buffer_summary(const ControlActionTrace& trace);

// Declared cycle cost of one instruction under the configured shuffle ranges.
std::uint64_t instruction_cost(const ArchConfig& cfg, const Instruction& inst);

}  // namespace provet
