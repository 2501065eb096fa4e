#include "provet/executor.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace provet {

using nlohmann::json;

MachineState::MachineState(const ArchConfig& cfg_in)
    : cfg(validate(cfg_in)), sram(cfg_in), vwrs(cfg_in.vwr_count, VwrState(cfg_in)),
      regs(cfg_in.vfu_count, LocalRegs(cfg_in)) {}

namespace {

struct ExecCtx {
  MachineState& st;
  const RunOptions& opt;
  // VFUs driven by this instruction stream (lockstep: all; per-stream: one).
  std::uint32_t vfu_begin = 0;
  std::uint32_t vfu_end = 1;
  std::array<std::int64_t, 8>* counters = nullptr;

  std::uint32_t vfus() const { return vfu_end - vfu_begin; }
};

std::int64_t resolve(const ExecCtx& cx, const IndexExpr& e) {
  std::int64_t v = e.base;
  if (e.is_counter()) v += (*cx.counters)[e.counter];
  return v;
}

// Slice index for one VFU. Counter-derived values wrap into range (modulo
// addressing); literals out of range are faults.
std::uint32_t resolve_slice(const ExecCtx& cx, const IndexExpr& e, std::uint32_t vfu) {
  const auto n = static_cast<std::int64_t>(cx.st.cfg.port_ratio());
  std::int64_t v = resolve(cx, e);
  if (e.is_counter()) {
    v %= n;
    if (v < 0) v += n;
  } else if (v < 0 || v >= n) {
    throw Error(Errc::slice_out_of_range, "slice " + std::to_string(v) + " of " + std::to_string(n));
  }
  return static_cast<std::uint32_t>((v + vfu) % n);
}

std::uint32_t resolve_flat(const ExecCtx& cx, const IndexExpr& e, std::uint32_t vfu) {
  const auto total = static_cast<std::int64_t>(cx.st.cfg.operands_per_word());
  const auto lanes = static_cast<std::int64_t>(cx.st.cfg.lane_count());
  std::int64_t v = resolve(cx, e);
  if (e.is_counter()) {
    v %= total;
    if (v < 0) v += total;
  } else if (v < 0 || v >= total) {
    throw Error(Errc::slice_out_of_range,
                "operand " + std::to_string(v) + " of " + std::to_string(total));
  }
  return static_cast<std::uint32_t>((v + vfu * lanes) % total);
}

std::uint32_t resolve_lane(const ExecCtx& cx, const IndexExpr& e) {
  const auto lanes = static_cast<std::int64_t>(cx.st.cfg.lane_count());
  std::int64_t v = resolve(cx, e);
  if (e.is_counter()) {
    v %= lanes;
    if (v < 0) v += lanes;
  } else if (v < 0 || v >= lanes) {
    throw Error(Errc::index_out_of_range,
                "lane " + std::to_string(v) + " of " + std::to_string(lanes));
  }
  return static_cast<std::uint32_t>(v);
}

std::uint32_t resolve_addr(const ExecCtx& cx, const IndexExpr& e) {
  const std::int64_t v = resolve(cx, e);
  if (v < 0 || v >= static_cast<std::int64_t>(cx.st.cfg.sram_depth_words))
    throw Error(Errc::address_out_of_range, "sram address " + std::to_string(v) + " of " +
                                                std::to_string(cx.st.cfg.sram_depth_words));
  return static_cast<std::uint32_t>(v);
}

VwrState& vwr_at(const ExecCtx& cx, std::uint32_t id) {
  if (id >= cx.st.vwrs.size())
    throw Error(Errc::index_out_of_range,
                "VWR " + std::to_string(id) + " of " + std::to_string(cx.st.vwrs.size()));
  return cx.st.vwrs[id];
}

// Applies a long tile shuffle as a chain of in-range single ops; meters each.
WideWord tile_shuffle_chain(ExecCtx& cx, WideWord word, std::int32_t steps, std::uint64_t& ops) {
  const auto parts = decompose_steps(steps, cx.st.cfg.tile_shuffle_max_steps);
  for (std::int32_t s : parts) {
    word = tile_shuffle(cx.st.cfg, word, {cx.st.cfg.vfu_width_bits, s});
    cx.st.shuffle_ops += 1;
    cx.st.shuffle_energy += tile_shuffle_energy(cx.st.cfg, s);
    cx.st.trace.mux_select_actions += 1;
    ops += 1;
  }
  return word;
}

LaneVector vfu_shuffle_chain(ExecCtx& cx, LaneVector v, std::int32_t step, ShuffleFill fill,
                             std::uint64_t& ops) {
  const auto parts = decompose_steps(step, cx.st.cfg.vfu_shuffle_max_range);
  for (std::int32_t s : parts) {
    v = vfu_shuffle(cx.st.cfg, v, {s, fill});
    cx.st.shuffle_ops += 1;
    cx.st.shuffle_energy += vfu_shuffle_energy(cx.st.cfg, s);
    cx.st.trace.mux_select_actions += 1;
    ops += 1;
  }
  return v;
}

// Reads a full slice as a VFU operand, honoring the bypass baseline.
LaneVector fetch_slice_operand(ExecCtx& cx, std::uint32_t vwr_id, std::uint32_t slice) {
  VwrState& vwr = vwr_at(cx, vwr_id);
  if (cx.opt.vwr_bypass) {
    LaneVector v = vwr.peek().get_slice(cx.st.cfg, slice);
    cx.st.sram.charge_bypass_access();
    return v;
  }
  return vwr.read_slice(slice);
}

std::int64_t fetch_flat_operand(ExecCtx& cx, std::uint32_t vwr_id, std::uint32_t flat) {
  VwrState& vwr = vwr_at(cx, vwr_id);
  if (cx.opt.vwr_bypass) {
    const std::int64_t v = vwr.peek().get_operand(flat, cx.st.cfg.operand_width_bits);
    cx.st.sram.charge_bypass_access();
    return v;
  }
  return vwr.read_operand(flat);
}

struct Executor {
  ExecCtx& cx;
  const Program& program;
  std::uint64_t& pc;
  bool branched = false;
  std::uint64_t cycles = 1;

  MachineState& st() const { return cx.st; }
  ControlActionTrace& trace() const { return cx.st.trace; }

  // Instruction-level atomicity: reject undecomposable shuffles before any
  // counter or storage mutation.
  void check_tile_shuffle(std::int32_t steps) const {
    decompose_steps(steps, st().cfg.tile_shuffle_max_steps);
  }
  void check_vfu_shuffle(std::int32_t step) const {
    decompose_steps(step, st().cfg.vfu_shuffle_max_range);
  }

  void operator()(const InstNop&) {}

  void operator()(const InstRlb& i) {
    const std::uint32_t addr = resolve_addr(cx, i.addr);
    VwrState& vwr = vwr_at(cx, i.vwr);
    if (i.shuffle_steps) check_tile_shuffle(*i.shuffle_steps);
    WideWord word = st().sram.read(addr);
    std::uint64_t ops = 0;
    if (i.shuffle_steps) word = tile_shuffle_chain(cx, word, *i.shuffle_steps, ops);
    vwr.load_wide(word);
    trace().vwr_enable_actions += 1;
    trace().mux_select_actions += 1;
    cycles = std::max<std::uint64_t>(1, ops);
  }

  void operator()(const InstWlb& i) {
    const std::uint32_t addr = resolve_addr(cx, i.addr);
    VwrState& vwr = vwr_at(cx, i.vwr);
    if (i.shuffle_steps) check_tile_shuffle(*i.shuffle_steps);
    WideWord word = vwr.store_wide();
    std::uint64_t ops = 0;
    if (i.shuffle_steps) word = tile_shuffle_chain(cx, word, *i.shuffle_steps, ops);
    st().sram.write(addr, word);
    trace().vwr_enable_actions += 1;
    trace().mux_select_actions += 1;
    cycles = std::max<std::uint64_t>(1, ops);
  }

  void operator()(const InstGlmv& i) {
    VwrState& vwr = vwr_at(cx, i.vwr);
    check_tile_shuffle(i.steps);
    WideWord word = vwr.store_wide();
    std::uint64_t ops = 0;
    word = tile_shuffle_chain(cx, word, i.steps, ops);
    vwr.load_wide(word);
    trace().vwr_enable_actions += 2;
    cycles = std::max<std::uint64_t>(1, ops);
  }

  void operator()(const InstVmv& i) {
    const std::uint32_t lanes = st().cfg.lane_count();
    for (std::uint32_t v = cx.vfu_begin; v < cx.vfu_end; ++v) {
      LocalRegs& regs = st().regs[v];
      LaneVector value(lanes, st().cfg.operand_width_bits);

      if (i.broadcast) {
        std::int64_t scalar = 0;
        switch (i.src.kind) {
          case Loc::Kind::reg:
            scalar = regs.r(i.src.reg).at(resolve_lane(cx, *i.broadcast));
            trace().reg_enable_actions += 1;
            break;
          case Loc::Kind::vwr:
            scalar = fetch_flat_operand(cx, i.src.vwr, resolve_flat(cx, *i.broadcast, v));
            trace().vwr_enable_actions += 1;
            break;
          case Loc::Kind::vwr_slice: {
            const std::uint32_t slice = resolve_slice(cx, i.src.slice, v);
            const std::uint32_t lane = resolve_lane(cx, *i.broadcast);
            scalar = fetch_flat_operand(cx, i.src.vwr, slice * lanes + lane);
            trace().vwr_enable_actions += 1;
            break;
          }
        }
        for (std::uint32_t k = 0; k < lanes; ++k) value.set(k, scalar);
        trace().mux_select_actions += 2;  // source select + broadcast network
      } else {
        switch (i.src.kind) {
          case Loc::Kind::reg:
            value = regs.r(i.src.reg);
            trace().reg_enable_actions += 1;
            break;
          case Loc::Kind::vwr_slice:
            value = fetch_slice_operand(cx, i.src.vwr, resolve_slice(cx, i.src.slice, v));
            trace().vwr_enable_actions += 1;
            break;
          case Loc::Kind::vwr:
            throw Error(Errc::operand_range_error, "VMV from a bare VWR needs broadcast=");
        }
        trace().mux_select_actions += 1;
      }

      switch (i.dst.kind) {
        case Loc::Kind::reg:
          regs.r(i.dst.reg) = value;
          trace().reg_enable_actions += 1;
          break;
        case Loc::Kind::vwr_slice:
          vwr_at(cx, i.dst.vwr).write_slice(resolve_slice(cx, i.dst.slice, v), value);
          trace().vwr_enable_actions += 1;
          break;
        case Loc::Kind::vwr:
          throw Error(Errc::operand_range_error, "VMV destination must be a register or slice");
      }
    }
  }

  void operator()(const InstRmv& i) {
    std::uint64_t ops = 0;
    for (std::uint32_t v = cx.vfu_begin; v < cx.vfu_end; ++v) {
      LocalRegs& regs = st().regs[v];
      std::uint64_t vops = 0;
      LaneVector value = vfu_shuffle_chain(cx, regs.r(i.src_reg), i.step, i.fill, vops);
      ops = std::max(ops, vops);
      trace().reg_enable_actions += 1;
      switch (i.dst.kind) {
        case Loc::Kind::reg:
          regs.r(i.dst.reg) = value;
          trace().reg_enable_actions += 1;
          break;
        case Loc::Kind::vwr_slice:
          vwr_at(cx, i.dst.vwr).write_slice(resolve_slice(cx, i.dst.slice, v), value);
          trace().vwr_enable_actions += 1;
          break;
        case Loc::Kind::vwr:
          throw Error(Errc::operand_range_error, "RMV destination must be a register or slice");
      }
    }
    cycles = std::max<std::uint64_t>(1, ops);
  }

  void operator()(const InstPerm& i) {
    {
      // Validate the permutation before any metered access.
      const LaneVector probe(st().cfg.lane_count(), st().cfg.operand_width_bits);
      vfu_permute(st().cfg, probe, i.spec);
    }
    for (std::uint32_t v = cx.vfu_begin; v < cx.vfu_end; ++v) {
      LocalRegs& regs = st().regs[v];
      switch (i.target.kind) {
        case Loc::Kind::reg: {
          regs.r(i.target.reg) = vfu_permute(st().cfg, regs.r(i.target.reg), i.spec);
          trace().reg_enable_actions += 2;
          break;
        }
        case Loc::Kind::vwr_slice: {
          const std::uint32_t slice = resolve_slice(cx, i.target.slice, v);
          LaneVector cur = fetch_slice_operand(cx, i.target.vwr, slice);
          vwr_at(cx, i.target.vwr).write_slice(slice, vfu_permute(st().cfg, cur, i.spec));
          trace().vwr_enable_actions += 2;
          break;
        }
        case Loc::Kind::vwr:
          throw Error(Errc::operand_range_error, "PERM target must be a register or slice");
      }
      trace().mux_select_actions += 1;
    }
  }

  void operator()(const InstVfux& i) {
    const bool is_acc =
        i.mode == VfuMode::mult_acc || i.mode == VfuMode::add_acc || i.mode == VfuMode::max_acc;
    if (i.post_step) check_vfu_shuffle(*i.post_step);
    std::uint64_t ops = 0;
    for (std::uint32_t v = cx.vfu_begin; v < cx.vfu_end; ++v) {
      LocalRegs& regs = st().regs[v];

      // Resolve and validate writeback targets before any metered read.
      std::vector<std::pair<std::uint32_t, std::uint32_t>> slice_outs;  // (vwr, slice)
      std::vector<std::uint32_t> reg_outs;
      for (const Loc& o : i.outs) {
        switch (o.kind) {
          case Loc::Kind::reg:
            reg_outs.push_back(o.reg);
            break;
          case Loc::Kind::vwr_slice:
            vwr_at(cx, o.vwr);
            slice_outs.emplace_back(o.vwr, resolve_slice(cx, o.slice, v));
            break;
          case Loc::Kind::vwr:
            throw Error(Errc::operand_range_error, "VFUX out must be registers or slices");
        }
      }

      const LaneVector& a = regs.r(i.in1_reg);
      trace().reg_enable_actions += 1;
      LaneVector b = a;
      if (i.in2) {
        switch (i.in2->kind) {
          case Loc::Kind::reg:
            b = regs.r(i.in2->reg);
            trace().reg_enable_actions += 1;
            break;
          case Loc::Kind::vwr_slice:
            b = fetch_slice_operand(cx, i.in2->vwr, resolve_slice(cx, i.in2->slice, v));
            trace().vwr_enable_actions += 1;
            break;
          case Loc::Kind::vwr:
            throw Error(Errc::operand_range_error, "VFUX in2 must be a register or slice");
        }
      }
      if (is_acc) trace().reg_enable_actions += 1;  // accumulator (R4) read

      LaneVector result = vfu_execute(i.mode, a, b, regs.r(4), i.imm.value_or(0));
      if (i.post_step) {
        std::uint64_t vops = 0;
        result = vfu_shuffle_chain(cx, result, *i.post_step, i.post_fill, vops);
        ops = std::max(ops, vops);
      }

      for (std::uint32_t r : reg_outs) {
        regs.r(r) = result;
        trace().reg_enable_actions += 1;
      }
      for (const auto& [vwr, slice] : slice_outs) {
        st().vwrs[vwr].write_slice(slice, result);
        trace().vwr_enable_actions += 1;
      }

      trace().vfu_config_actions += 1;
      trace().mux_select_actions += 2;  // input select + output route
      st().vfux_by_mode[static_cast<std::size_t>(i.mode)] += 1;
    }
    cycles = 1 + (ops > 0 ? ops - 1 : 0);  // single in-range post shuffle rides the VFUX cycle
  }

  void operator()(const InstCalc& i) {
    std::int64_t a = 0, b = 0;
    switch (i.op) {
      case CalcOp::set:
        a = i.imm;
        break;
      case CalcOp::addi:
      case CalcOp::subi:
      case CalcOp::divi:
      case CalcOp::modi:
        a = (*cx.counters)[i.a];
        b = i.imm;
        break;
      default:
        a = (*cx.counters)[i.a];
        b = (*cx.counters)[i.b];
        break;
    }
    (*cx.counters)[i.dst] = vfu_scalar_calc(i.op, a, b);
    trace().reg_enable_actions += 1;
  }

  void operator()(const InstBran& i) {
    const std::uint32_t target = program.label_index(i.target);
    bool take = true;
    if (i.cond == InstBran::Cond::counter_nonzero) {
      take = (*cx.counters)[i.counter] != 0;
      if (take) (*cx.counters)[i.counter] -= 1;
    }
    if (take) {
      pc = target;
      branched = true;
    }
    trace().mux_select_actions += 1;
  }
};

StepResult exec_one(ExecCtx& cx, const Program& p, std::uint64_t& pc, std::vector<bool>& pc_seen) {
  if (pc >= p.instructions.size())
    throw Error(Errc::simulation_fault, "pc " + std::to_string(pc) + " outside program");

  if (pc_seen.size() != p.instructions.size()) pc_seen.assign(p.instructions.size(), false);
  if (!pc_seen[pc]) {
    pc_seen[pc] = true;
    cx.st.trace.lb_update_events += 1;
  }

  const Instruction& inst = p.instructions[pc];
  Executor ex{cx, p, pc};
  try {
    std::visit(ex, inst);
  } catch (const Error& e) {
    throw Error(Errc::simulation_fault, "at pc " + std::to_string(pc) + " [" +
                                            format_instruction(inst) + "]: " + e.what());
  }
  if (!ex.branched) pc += 1;
  cx.st.instructions_executed += 1;
  return {ex.cycles, ex.branched};
}

}  // namespace

StepResult step(MachineState& st, const Program& p, const RunOptions& opt) {
  if (st.halted) throw Error(Errc::simulation_fault, "machine is halted");
  ExecCtx cx{st, opt, 0, st.cfg.vfu_count, &st.counters};
  if (opt.trace_out)
    *opt.trace_out << st.cycle << "," << st.pc << "," << mnemonic(p.instructions.at(st.pc)) << "\n";
  StepResult r = exec_one(cx, p, st.pc, st.pc_seen);
  st.cycle += r.cycles;
  if (st.pc >= p.instructions.size()) st.halted = true;
  return r;
}

RunReport run(MachineState& st, const Program& p, const RunOptions& opt) {
  if (p.instructions.empty()) {
    st.halted = true;
    return make_report(st, StopReason::halted);
  }
  if (st.cfg.vfu_count > st.cfg.port_ratio())
    throw Error(Errc::simulation_fault, "lockstep mode needs vfu_count <= port ratio");
  while (!st.halted) {
    if (st.cycle >= opt.max_cycles) return make_report(st, StopReason::cycle_limit);
    step(st, p, opt);
  }
  return make_report(st, StopReason::halted);
}

RunReport run_per_vfu_streams(MachineState& st, const std::vector<Program>& programs,
                              const RunOptions& opt) {
  if (programs.size() != st.cfg.vfu_count)
    throw Error(Errc::simulation_fault, "need one program per VFU (" +
                                            std::to_string(st.cfg.vfu_count) + "), got " +
                                            std::to_string(programs.size()));

  struct Stream {
    std::uint64_t pc = 0;
    std::uint64_t cycle = 0;
    bool halted = false;
    std::array<std::int64_t, 8> counters{};
    std::vector<bool> pc_seen;
  };
  std::vector<Stream> streams(programs.size());
  for (std::size_t v = 0; v < streams.size(); ++v)
    if (programs[v].instructions.empty()) streams[v].halted = true;

  auto structural = [](const Instruction& inst) {
    return std::holds_alternative<InstRlb>(inst) || std::holds_alternative<InstWlb>(inst) ||
           std::holds_alternative<InstGlmv>(inst);
  };

  while (true) {
    // Advance the stream that is furthest behind in time.
    std::size_t pick = streams.size();
    for (std::size_t v = 0; v < streams.size(); ++v)
      if (!streams[v].halted && (pick == streams.size() || streams[v].cycle < streams[pick].cycle))
        pick = v;
    if (pick == streams.size()) break;

    Stream& s = streams[pick];
    if (s.cycle >= opt.max_cycles) {
      st.cycle = std::max(st.cycle, s.cycle);
      return make_report(st, StopReason::cycle_limit);
    }
    if (pick != 0 && structural(programs[pick].instructions.at(s.pc)))
      throw Error(Errc::simulation_fault,
                  "stream " + std::to_string(pick) + ": only stream 0 may move SRAM/VWR words");

    ExecCtx cx{st, opt, static_cast<std::uint32_t>(pick), static_cast<std::uint32_t>(pick) + 1,
               &s.counters};
    StepResult r = exec_one(cx, programs[pick], s.pc, s.pc_seen);
    s.cycle += r.cycles;
    if (s.pc >= programs[pick].instructions.size()) s.halted = true;
  }

  for (const Stream& s : streams) st.cycle = std::max(st.cycle, s.cycle);
  st.halted = true;
  return make_report(st, StopReason::halted);
}

RunReport make_report(const MachineState& st, StopReason stop) {
  RunReport r;
  r.cycles = st.cycle;
  r.instructions_executed = st.instructions_executed;
  r.stop = stop;
  r.sram_reads = st.sram.reads();
  r.sram_writes = st.sram.writes();
  r.sram_energy = st.sram.energy_accum();
  for (const auto& v : st.vwrs) {
    r.vwrs.push_back({v.wide_loads(), v.wide_stores(), v.narrow_reads(), v.narrow_writes()});
    r.vwr_narrow_reads += v.narrow_reads();
    r.vwr_narrow_writes += v.narrow_writes();
    r.vwr_wide_loads += v.wide_loads();
    r.vwr_wide_stores += v.wide_stores();
    r.vwr_energy += v.energy_accum();
  }
  r.vfux_by_mode = st.vfux_by_mode;
  for (auto c : st.vfux_by_mode) r.vfux_total += c;
  r.vfux_mult_ops = st.vfux_by_mode[static_cast<std::size_t>(VfuMode::mult)] +
                    st.vfux_by_mode[static_cast<std::size_t>(VfuMode::mult_acc)];
  r.shuffle_ops = st.shuffle_ops;
  r.shuffle_energy = st.shuffle_energy;
  r.trace = st.trace;
  return r;
}

std::string report_to_json_text(const RunReport& r) {
  json j;
  j["cycles"] = r.cycles;
  j["instructions_executed"] = r.instructions_executed;
  j["stop"] = r.stop == StopReason::halted ? "halted" : "cycle_limit";
  j["sram"] = {{"reads", r.sram_reads}, {"writes", r.sram_writes}, {"energy", r.sram_energy}};
  j["vwrs"] = json::array();
  for (const auto& v : r.vwrs)
    j["vwrs"].push_back({{"wide_loads", v.wide_loads},
                         {"wide_stores", v.wide_stores},
                         {"narrow_reads", v.narrow_reads},
                         {"narrow_writes", v.narrow_writes}});
  j["vwr_energy"] = r.vwr_energy;
  json modes;
  for (int m = 0; m < kVfuModeCount; ++m)
    modes[vfu_mode_name(static_cast<VfuMode>(m))] = r.vfux_by_mode[static_cast<std::size_t>(m)];
  j["vfux_by_mode"] = modes;
  j["vfux_total"] = r.vfux_total;
  j["vfux_mult_ops"] = r.vfux_mult_ops;
  j["shuffle"] = {{"ops", r.shuffle_ops}, {"energy", r.shuffle_energy}};
  j["control_actions"] = {{"vfu_config", r.trace.vfu_config_actions},
                          {"vwr_enable", r.trace.vwr_enable_actions},
                          {"reg_enable", r.trace.reg_enable_actions},
                          {"mux_select", r.trace.mux_select_actions},
                          {"lb_updates", r.trace.lb_update_events}};
  j["total_energy"] = r.total_energy();
  return j.dump(2) + "\n";
}

RunReport report_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, std::string("report is not valid JSON: ") + e.what());
  }
  RunReport r;
  try {
    r.cycles = j.at("cycles").get<std::uint64_t>();
    r.instructions_executed = j.at("instructions_executed").get<std::uint64_t>();
    r.stop = j.at("stop").get<std::string>() == "halted" ? StopReason::halted
                                                         : StopReason::cycle_limit;
    r.sram_reads = j.at("sram").at("reads").get<std::uint64_t>();
    r.sram_writes = j.at("sram").at("writes").get<std::uint64_t>();
    r.sram_energy = j.at("sram").at("energy").get<double>();
    for (const auto& vj : j.at("vwrs")) {
      VwrCounters v{vj.at("wide_loads").get<std::uint64_t>(),
                    vj.at("wide_stores").get<std::uint64_t>(),
                    vj.at("narrow_reads").get<std::uint64_t>(),
                    vj.at("narrow_writes").get<std::uint64_t>()};
      r.vwrs.push_back(v);
      r.vwr_wide_loads += v.wide_loads;
      r.vwr_wide_stores += v.wide_stores;
      r.vwr_narrow_reads += v.narrow_reads;
      r.vwr_narrow_writes += v.narrow_writes;
    }
    r.vwr_energy = j.at("vwr_energy").get<double>();
    for (int m = 0; m < kVfuModeCount; ++m)
      r.vfux_by_mode[static_cast<std::size_t>(m)] =
          j.at("vfux_by_mode").at(vfu_mode_name(static_cast<VfuMode>(m))).get<std::uint64_t>();
    r.vfux_total = j.at("vfux_total").get<std::uint64_t>();
    r.vfux_mult_ops = j.at("vfux_mult_ops").get<std::uint64_t>();
    r.shuffle_ops = j.at("shuffle").at("ops").get<std::uint64_t>();
    r.shuffle_energy = j.at("shuffle").at("energy").get<double>();
    r.trace.vfu_config_actions = j.at("control_actions").at("vfu_config").get<std::uint64_t>();
    r.trace.vwr_enable_actions = j.at("control_actions").at("vwr_enable").get<std::uint64_t>();
    r.trace.reg_enable_actions = j.at("control_actions").at("reg_enable").get<std::uint64_t>();
    r.trace.mux_select_actions = j.at("control_actions").at("mux_select").get<std::uint64_t>();
    r.trace.lb_update_events = j.at("control_actions").at("lb_updates").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, std::string("bad run report: ") + e.what());
  }
  return r;
}

LoopBufferSummary loop_buffer_summary(const ControlActionTrace& trace) {
  LoopBufferSummary s;
  s.total_actions = trace.total_actions();
  s.lb_update_events = trace.lb_update_events;
  s.actions_per_update =
      trace.lb_update_events == 0
          ? 0.0
          : static_cast<double>(s.total_actions) / static_cast<double>(trace.lb_update_events);
  return s;
}

namespace {

std::uint64_t shuffle_op_count(std::int32_t distance, std::uint32_t max_single) {
  if (distance == 0) return 1;
  if (max_single == 0) return 1;  // would fault at execution
  const std::uint64_t d = static_cast<std::uint64_t>(std::abs(static_cast<std::int64_t>(distance)));
  return (d + max_single - 1) / max_single;
}

struct CostVisitor {
  const ArchConfig& cfg;
  std::uint64_t operator()(const InstRlb& i) const {
    return i.shuffle_steps ? shuffle_op_count(*i.shuffle_steps, cfg.tile_shuffle_max_steps) : 1;
  }
  std::uint64_t operator()(const InstWlb& i) const {
    return i.shuffle_steps ? shuffle_op_count(*i.shuffle_steps, cfg.tile_shuffle_max_steps) : 1;
  }
  std::uint64_t operator()(const InstGlmv& i) const {
    return shuffle_op_count(i.steps, cfg.tile_shuffle_max_steps);
  }
  std::uint64_t operator()(const InstRmv& i) const {
    return shuffle_op_count(i.step, cfg.vfu_shuffle_max_range);
  }
  std::uint64_t operator()(const InstVfux& i) const {
    return i.post_step ? shuffle_op_count(*i.post_step, cfg.vfu_shuffle_max_range) : 1;
  }
  template <typename T>
  std::uint64_t operator()(const T&) const {
    return 1;
  }
};

}  // namespace

std::uint64_t instruction_cost(const ArchConfig& cfg, const Instruction& inst) {
  return std::visit(CostVisitor{cfg}, inst);
}

}  // namespace provet
