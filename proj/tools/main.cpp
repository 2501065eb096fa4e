// provet: functional simulator and analysis toolkit for an ultra-wide vector
// tile (shallow SRAM + asymmetric VWRs + shufflers + SIMD VFUs).
//
// Subcommands: asm, disasm, run, map, verify, scaling, report.
// Exit codes: 0 success, 1 verification mismatch or runtime failure, 2 usage.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "provet/arch_config.hpp"
#include "provet/executor.hpp"
#include "provet/isa.hpp"
#include "provet/mapping.hpp"
#include "provet/metrics.hpp"
#include "provet/oracle.hpp"

namespace {

using namespace provet;

ArchConfig config_from_flag(const std::string& path) {
  if (path.empty()) return validate(ArchConfig{});
  return load_config(path);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spew(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << text;
}

bool parse_dims(const std::string& s, std::uint32_t& a, std::uint32_t& b) {
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  try {
    a = static_cast<std::uint32_t>(std::stoul(s.substr(0, x)));
    b = static_cast<std::uint32_t>(std::stoul(s.substr(x + 1)));
  } catch (...) {
    return false;
  }
  return a > 0 && b > 0;
}

Tensor2D random_tensor(std::uint32_t rows, std::uint32_t cols, std::mt19937& rng,
                       std::int64_t lo = -4, std::int64_t hi = 4) {
  std::uniform_int_distribution<std::int64_t> dist(lo, hi);
  Tensor2D t(rows, cols);
  for (auto& v : t.data) v = dist(rng);
  return t;
}

// Seeded inputs for every non-output tensor of a plan.
std::map<std::string, Tensor2D> synthesize_inputs(const MappingPlan& plan, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::map<std::string, Tensor2D> inputs;
  for (const auto& t : plan.layout.tensors) {
    if (t.name.rfind("output", 0) == 0 || t.name.rfind("__", 0) == 0) continue;
    inputs[t.name] = random_tensor(t.rows, t.cols, rng);
  }
  return inputs;
}

int verify_plan(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs) {
  PlanRun pr = run_plan(plan, inputs);
  const std::uint32_t w = plan.cfg.operand_width_bits;
  std::uint64_t mismatches = 0;

  auto compare = [&](const std::string& out_name, const Tensor2D& want) {
    const Tensor2D got = extract_output(plan, pr.state.sram, out_name);
    const Tensor2D expect = wrap_tensor(want, w);
    if (got == expect) return;
    ++mismatches;
    std::cerr << "mismatch in " << out_name << ":\n";
    for (std::uint32_t r = 0; r < got.rows; ++r)
      for (std::uint32_t c = 0; c < got.cols; ++c)
        if (got.at(r, c) != expect.at(r, c))
          std::cerr << "  [" << r << "," << c << "] got " << got.at(r, c) << " want "
                    << expect.at(r, c) << "\n";
  };

  if (plan.kind == "conv2d" && plan.channels == 1 && plan.filters == 1) {
    compare("output", oracle_conv2d(inputs.at("image"), inputs.at("kernel"), plan.stride, w));
  } else if (plan.kind == "conv2d") {
    for (std::uint32_t f = 0; f < plan.filters; ++f) {
      Tensor2D sum;
      for (std::uint32_t ch = 0; ch < plan.channels; ++ch) {
        const std::string kname = "kernel_f" + std::to_string(f) + "_c" + std::to_string(ch);
        Tensor2D part = oracle_conv2d(inputs.at("image" + std::to_string(ch)), inputs.at(kname),
                                      plan.stride, 64);
        if (ch == 0) {
          sum = part;
        } else {
          for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += part.data[i];
        }
      }
      compare(plan.filters == 1 ? "output" : "output" + std::to_string(f), sum);
    }
  } else if (plan.kind == "depthwise" || plan.kind == "conv2d_packed") {
    for (std::uint32_t ch = 0; ch < plan.channels; ++ch) {
      const std::string suffix = std::to_string(ch);
      const Tensor2D& kernel =
          plan.kind == "depthwise" ? inputs.at("kernel" + suffix) : inputs.at("kernel");
      compare("output" + suffix,
              oracle_conv2d(inputs.at("image" + suffix), kernel, plan.stride, w));
    }
  } else if (plan.kind == "fc") {
    const Tensor2D& x2 = inputs.at("x");
    std::vector<std::int64_t> x(x2.data.begin(), x2.data.end());
    const auto y = oracle_matvec(inputs.at("weights"), x, w);
    Tensor2D want(1, static_cast<std::uint32_t>(y.size()), y);
    compare("output", want);
  } else if (plan.kind == "maxpool") {
    compare("output", oracle_maxpool(inputs.at("image"), plan.k_h, plan.stride, w));
  } else if (plan.kind == "avgpool") {
    compare("output", oracle_avgpool(inputs.at("image"), plan.k_h, plan.stride, w));
  } else {
    throw Error(Errc::param_validation, "cannot verify plan kind \"" + plan.kind + "\"");
  }

  if (mismatches == 0) {
    std::cout << "verify: OK (" << plan.kind << ", " << pr.report.cycles << " cycles, "
              << pr.report.sram_reads << " sram reads)\n";
    return 0;
  }
  std::cout << "verify: FAILED (" << mismatches << " tensor(s) differ)\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"provet - ultra-wide vector tile simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "architecture config JSON (defaults built in)");

  auto* cmd_asm = app.add_subcommand("asm", "assemble a .pvt file");
  std::string asm_in, asm_out;
  cmd_asm->add_option("input", asm_in)->required();
  cmd_asm->add_option("-o,--output", asm_out, "write canonical form here (default: stdout)");

  auto* cmd_disasm = app.add_subcommand("disasm", "emit the canonical form of a .pvt file");
  std::string dis_in, dis_out;
  cmd_disasm->add_option("input", dis_in)->required();
  cmd_disasm->add_option("-o,--output", dis_out);

  auto* cmd_run = app.add_subcommand("run", "execute a program over a memory image");
  std::string run_prog, run_mem, run_report, run_trace;
  std::vector<std::string> run_streams;
  std::uint64_t run_max_cycles = 50'000'000;
  bool run_bypass = false;
  cmd_run->add_option("program", run_prog)->required();
  cmd_run->add_option("--mem", run_mem, "memory image (.bin)");
  cmd_run->add_option("--report", run_report, "write the run report JSON here");
  cmd_run->add_option("--trace", run_trace, "write a per-cycle CSV trace here");
  cmd_run->add_option("--max-cycles", run_max_cycles);
  cmd_run->add_flag("--vwr-bypass", run_bypass, "meter VFU operand fetches as SRAM accesses");
  cmd_run->add_option("--stream", run_streams,
                      "extra per-VFU programs; the main program drives VFU 0");

  auto* cmd_map = app.add_subcommand("map", "generate a layer mapping (plan directory)");
  std::string map_kind, map_in = "16x16", map_k = "5x5", map_out_dir = "plan";
  std::uint32_t map_stride = 1, map_channels = 1, map_infeat = 16, map_outfeat = 16;
  std::uint64_t map_seed = 1;
  cmd_map->add_option("kind", map_kind, "conv|depthwise|fc|maxpool|avgpool")->required();
  cmd_map->add_option("--in", map_in, "input map HxW");
  cmd_map->add_option("--k", map_k, "kernel HxW (conv) or window (pool)");
  cmd_map->add_option("--stride", map_stride);
  cmd_map->add_option("--channels", map_channels, "depthwise channels");
  cmd_map->add_option("--in-features", map_infeat);
  cmd_map->add_option("--out-features", map_outfeat);
  cmd_map->add_option("--seed", map_seed, "seed for the emitted example data");
  cmd_map->add_option("-o,--output", map_out_dir, "plan directory");

  auto* cmd_verify = app.add_subcommand("verify", "run a plan and diff against the oracle");
  std::string verify_dir;
  std::uint64_t verify_seed = 0;
  bool verify_fresh = false;
  cmd_verify->add_option("plan", verify_dir)->required();
  cmd_verify->add_flag("--fresh-inputs", verify_fresh, "ignore mem.bin, synthesize new inputs");
  cmd_verify->add_option("--seed", verify_seed, "seed for --fresh-inputs");

  auto* cmd_scaling = app.add_subcommand("scaling", "bandwidth/interconnect scaling baselines");
  std::string scal_pes = "1,4,16,64,256", scal_fmt = "table", scal_out;
  double scal_alpha = 1.0, scal_beta = 0.8, scal_sa = 1.0;
  std::uint32_t scal_fold_k = 11;
  cmd_scaling->add_option("--pes", scal_pes, "comma-separated PE counts");
  cmd_scaling->add_option("--alpha", scal_alpha);
  cmd_scaling->add_option("--beta", scal_beta);
  cmd_scaling->add_option("--sa-coeff", scal_sa);
  cmd_scaling->add_option("--fold-kernel", scal_fold_k,
                          "kernel dimension for the array fold-utilization column");
  cmd_scaling->add_option("--format", scal_fmt, "table|csv|json");
  cmd_scaling->add_option("-o,--output", scal_out);

  auto* cmd_report = app.add_subcommand("report", "metrics from run reports");
  std::vector<std::string> rep_runs;
  std::vector<std::uint64_t> rep_macs;
  std::string rep_fmt = "table", rep_out;
  cmd_report->add_option("--run", rep_runs, "run report JSON (repeatable)")->required();
  cmd_report->add_option("--macs", rep_macs, "total MACs per run (repeatable)")->required();
  cmd_report->add_option("--format", rep_fmt, "table|csv|json");
  cmd_report->add_option("-o,--output", rep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*cmd_asm || *cmd_disasm) {
      const std::string in = *cmd_asm ? asm_in : dis_in;
      const std::string out = *cmd_asm ? asm_out : dis_out;
      const std::string text = disassemble(assemble(slurp(in)));
      if (out.empty())
        std::cout << text;
      else
        spew(out, text);
      return 0;
    }

    if (*cmd_run) {
      const ArchConfig cfg = config_from_flag(config_path);
      MachineState st(cfg);
      if (!run_mem.empty()) load_memory_image(cfg, st.sram, run_mem);
      const Program p = load_program(run_prog);
      if (!p.arch_fingerprint.empty() && p.arch_fingerprint != config_fingerprint(cfg))
        std::cerr << "warning: program was generated for a different config ("
                  << p.arch_fingerprint << ")\n";
      RunOptions opt;
      opt.max_cycles = run_max_cycles;
      opt.vwr_bypass = run_bypass;
      std::ofstream trace;
      if (!run_trace.empty()) {
        trace.open(run_trace);
        trace << "cycle,pc,mnemonic\n";
        opt.trace_out = &trace;
      }
      RunReport r;
      if (run_streams.empty()) {
        r = run(st, p, opt);
      } else {
        std::vector<Program> programs{p};
        for (const auto& path : run_streams) programs.push_back(load_program(path));
        r = run_per_vfu_streams(st, programs, opt);
      }
      const std::string text = report_to_json_text(r);
      if (run_report.empty())
        std::cout << text;
      else
        spew(run_report, text);
      if (r.stop == StopReason::cycle_limit) {
        std::cerr << "error: cycle limit reached\n";
        return 1;
      }
      return 0;
    }

    if (*cmd_map) {
      const ArchConfig cfg = config_from_flag(config_path);
      std::uint32_t in_h, in_w, k_h, k_w;
      if (!parse_dims(map_in, in_h, in_w)) throw Error(Errc::param_validation, "--in wants HxW");
      if (!parse_dims(map_k, k_h, k_w)) throw Error(Errc::param_validation, "--k wants HxW");

      MappingPlan plan;
      if (map_kind == "conv") {
        plan = map_conv({in_h, in_w, k_h, k_w, 1, 1, map_stride, false}, cfg);
      } else if (map_kind == "depthwise") {
        plan = map_conv({in_h, in_w, k_h, k_w, map_channels, map_channels, map_stride, true}, cfg);
      } else if (map_kind == "fc") {
        plan = map_fc(map_infeat, map_outfeat, cfg);
      } else if (map_kind == "maxpool") {
        plan = map_maxpool(in_h, in_w, k_h, map_stride, cfg);
      } else if (map_kind == "avgpool") {
        plan = map_avgpool(in_h, in_w, k_h, map_stride, cfg);
      } else {
        throw Error(Errc::unknown_template, map_kind);
      }
      save_plan(plan, synthesize_inputs(plan, map_seed), map_out_dir);
      std::cout << "plan written to " << map_out_dir << "/ (" << plan.program.instructions.size()
                << " instructions, " << plan.layout.tensors.size() << " tensors)\n";
      return 0;
    }

    if (*cmd_verify) {
      MappingPlan plan = load_plan(verify_dir);
      std::map<std::string, Tensor2D> inputs;
      if (verify_fresh) {
        inputs = synthesize_inputs(plan, verify_seed);
      } else {
        SramState sram(plan.cfg);
        load_memory_image(plan.cfg, sram, verify_dir + "/mem.bin");
        for (const auto& t : plan.layout.tensors) {
          if (t.name.rfind("output", 0) == 0 || t.name.rfind("__", 0) == 0) continue;
          inputs[t.name] = read_tensor(plan.cfg, sram, t);
        }
      }
      return verify_plan(plan, inputs);
    }

    if (*cmd_scaling) {
      std::vector<std::uint64_t> pes;
      std::istringstream ss(scal_pes);
      std::string tok;
      while (std::getline(ss, tok, ',')) pes.push_back(std::stoull(tok));
      ScalingModel model{scal_alpha, scal_beta, scal_sa};
      const auto rows = scaling_sweep(pes, model, scal_fold_k);
      const ReportFormat fmt = scal_fmt == "csv"    ? ReportFormat::csv
                               : scal_fmt == "json" ? ReportFormat::json
                                                    : ReportFormat::table;
      const std::string text = emit_scaling(rows, fmt);
      if (scal_out.empty())
        std::cout << text;
      else
        spew(scal_out, text);
      return 0;
    }

    if (*cmd_report) {
      if (rep_macs.size() != rep_runs.size())
        throw Error(Errc::param_validation, "--macs must repeat once per --run");
      const ArchConfig cfg = config_from_flag(config_path);
      std::vector<MetricsReport> metrics;
      for (std::size_t i = 0; i < rep_runs.size(); ++i) {
        const RunReport r = report_from_json_text(slurp(rep_runs[i]));
        metrics.push_back(compute_metrics(r, {rep_macs[i]}, cfg, rep_runs[i]));
      }
      const ReportFormat fmt = rep_fmt == "csv"    ? ReportFormat::csv
                               : rep_fmt == "json" ? ReportFormat::json
                                                   : ReportFormat::table;
      const std::string text = emit_report(metrics, fmt);
      if (rep_out.empty())
        std::cout << text;
      else
        spew(rep_out, text);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
