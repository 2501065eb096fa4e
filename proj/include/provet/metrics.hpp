#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "provet/arch_config.hpp"
#include "provet/executor.hpp"

namespace provet {

// Evaluation metrics of one run: utilization U = Lmin/Lreal against the
// theoretical minimum latency, and the compute-to-memory ratio
// CMR = Ncompute/Nmemory over global (SRAM) accesses.
struct MetricsReport {
  std::string name;
  std::uint64_t l_min = 0;
  std::uint64_t l_real = 0;
  double utilization = 0.0;
  std::uint64_t n_compute = 0;
  std::uint64_t n_memory = 0;
  double cmr = 0.0;
  bool cmr_undefined = false;  // no memory accesses; cmr holds +inf
  std::uint64_t sram_reads = 0;
  double sram_energy = 0.0;
  double total_energy = 0.0;
};

struct Workload {
  std::uint64_t total_macs = 0;
};

MetricsReport compute_metrics(const RunReport& run, const Workload& workload,
                              const ArchConfig& cfg, const std::string& name = "run");

// Analytical bandwidth scaling baselines: provet grows linearly in the PE
// count, a GPU-like 1D array linearly with a smaller coefficient, and a
// square systolic array with the square root of the PE count.
struct ScalingModel {
  double alpha = 1.0;     // provet per-PE bandwidth coefficient
  double beta = 0.8;      // GPU coefficient; must stay below alpha
  double sa_coeff = 1.0;  // systolic array coefficient
};

struct BandwidthPoint {
  std::uint64_t n_pes = 0;
  double provet = 0.0;
  double sa = 0.0;
  double gpu = 0.0;
};

// Throws unless alpha > beta > 0 and sa_coeff > 0.
void validate_scaling_model(const ScalingModel& model);
BandwidthPoint bandwidth_scaling(std::uint64_t n_pes, const ScalingModel& model);

// Fraction of a square PE array covered by whole kernel folds, per axis and
// squared for 2D. A transparent stand-in for fold-limited utilization.
double sa_fold_utilization(std::uint32_t array_dim, std::uint32_t kernel_dim);

// Average interconnect hops to deliver one datum: a systolic array walks
// half the array dimension on average, the VWR path is a constant single hop.
double sa_avg_hops(std::uint32_t array_dim);
constexpr double kProvetAvgHops = 1.0;

enum class ReportFormat { csv, json, table };

// Deterministic column order: name, cycles, utilization, cmr, sram_reads,
// energy. CSV follows RFC 4180 (CRLF, quoted fields where needed); the table
// is sorted by name.
std::string emit_report(const std::vector<MetricsReport>& metrics, ReportFormat format);
void emit_report_file(const std::vector<MetricsReport>& metrics, ReportFormat format,
                      const std::string& path);

struct ScalingRow {
  std::uint64_t n_pes;
  BandwidthPoint bw;
  double sa_hops;
  double provet_hops;
  double sa_fold_util;  // fold-limited utilization of a sqrt(n) x sqrt(n) array
};

// fold_kernel_dim sizes the kernel used for the array fold-utilization column.
std::vector<ScalingRow> scaling_sweep(const std::vector<std::uint64_t>& pes,
                                      const ScalingModel& model,
                                      std::uint32_t fold_kernel_dim = 11);
std::string emit_scaling(const std::vector<ScalingRow>& rows, ReportFormat format);

}  // namespace provet
