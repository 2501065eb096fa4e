#include "provet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace provet {

using nlohmann::json;

MetricsReport compute_metrics(const RunReport& run, const Workload& workload,
                              const ArchConfig& cfg, const std::string& name) {
  if (workload.total_macs == 0)
    throw Error(Errc::param_validation, "workload must declare total_macs > 0");
  MetricsReport m;
  m.name = name;
  const std::uint64_t pe_lanes =
      static_cast<std::uint64_t>(cfg.vfu_count) * cfg.lane_count();
  m.l_min = (workload.total_macs + pe_lanes - 1) / pe_lanes;
  m.l_real = run.cycles;
  m.utilization = m.l_real == 0 ? 0.0
                                : static_cast<double>(m.l_min) / static_cast<double>(m.l_real);
  m.n_compute = run.vfux_total;
  m.n_memory = run.sram_reads + run.sram_writes;
  if (m.n_memory == 0) {
    m.cmr = std::numeric_limits<double>::infinity();
    m.cmr_undefined = true;
  } else {
    m.cmr = static_cast<double>(m.n_compute) / static_cast<double>(m.n_memory);
  }
  m.sram_reads = run.sram_reads;
  m.sram_energy = run.sram_energy;
  m.total_energy = run.total_energy();
  return m;
}

void validate_scaling_model(const ScalingModel& model) {
  if (!(model.alpha > model.beta && model.beta > 0.0) || model.sa_coeff <= 0.0)
    throw Error(Errc::param_validation, "scaling model needs alpha > beta > 0 and sa_coeff > 0");
}

BandwidthPoint bandwidth_scaling(std::uint64_t n_pes, const ScalingModel& model) {
  if (n_pes == 0) throw Error(Errc::param_validation, "n_pes must be >= 1");
  BandwidthPoint p;
  p.n_pes = n_pes;
  p.provet = model.alpha * static_cast<double>(n_pes);
  p.gpu = model.beta * static_cast<double>(n_pes);
  p.sa = model.sa_coeff * std::sqrt(static_cast<double>(n_pes));
  return p;
}

double sa_fold_utilization(std::uint32_t array_dim, std::uint32_t kernel_dim) {
  if (array_dim == 0 || kernel_dim == 0)
    throw Error(Errc::param_validation, "dimensions must be >= 1");
  const double per_axis =
      static_cast<double>((array_dim / kernel_dim) * kernel_dim) / array_dim;
  return per_axis * per_axis;
}

double sa_avg_hops(std::uint32_t array_dim) { return array_dim / 2.0; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::string emit_report(const std::vector<MetricsReport>& metrics, ReportFormat format) {
  if (metrics.empty()) throw Error(Errc::param_validation, "no metrics to report");

  if (format == ReportFormat::json) {
    json rows = json::array();
    for (const auto& m : metrics) {
      json r;
      r["name"] = m.name;
      r["cycles"] = m.l_real;
      r["l_min"] = m.l_min;
      r["utilization"] = m.utilization;
      r["cmr"] = m.cmr_undefined ? json("inf") : json(m.cmr);
      r["n_compute"] = m.n_compute;
      r["n_memory"] = m.n_memory;
      r["sram_reads"] = m.sram_reads;
      r["sram_energy"] = m.sram_energy;
      r["total_energy"] = m.total_energy;
      rows.push_back(r);
    }
    return json{{"reports", rows}}.dump(2) + "\n";
  }

  if (format == ReportFormat::csv) {
    std::string out = "name,cycles,utilization,cmr,sram_reads,energy\r\n";
    for (const auto& m : metrics) {
      out += csv_field(m.name) + "," + std::to_string(m.l_real) + "," + fmt_double(m.utilization) +
             "," + (m.cmr_undefined ? "inf" : fmt_double(m.cmr)) + "," +
             std::to_string(m.sram_reads) + "," + fmt_double(m.total_energy) + "\r\n";
    }
    return out;
  }

  std::vector<MetricsReport> sorted = metrics;
  std::sort(sorted.begin(), sorted.end(),
            [](const MetricsReport& a, const MetricsReport& b) { return a.name < b.name; });
  std::ostringstream os;
  os << std::left << std::setw(24) << "name" << std::right << std::setw(12) << "cycles"
     << std::setw(14) << "utilization" << std::setw(12) << "cmr" << std::setw(12) << "sram_reads"
     << std::setw(14) << "energy" << "\n";
  for (const auto& m : sorted) {
    os << std::left << std::setw(24) << m.name << std::right << std::setw(12) << m.l_real
       << std::setw(14) << std::fixed << std::setprecision(4) << m.utilization << std::setw(12)
       << std::setprecision(3) << (m.cmr_undefined ? std::numeric_limits<double>::infinity() : m.cmr)
       << std::setw(12) << m.sram_reads << std::setw(14) << std::setprecision(1) << m.total_energy
       << "\n";
    os.unsetf(std::ios::fixed);
  }
  return os.str();
}

void emit_report_file(const std::vector<MetricsReport>& metrics, ReportFormat format,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << emit_report(metrics, format);
}

std::vector<ScalingRow> scaling_sweep(const std::vector<std::uint64_t>& pes,
                                      const ScalingModel& model,
                                      std::uint32_t fold_kernel_dim) {
  validate_scaling_model(model);
  std::vector<ScalingRow> rows;
  for (auto n : pes) {
    const auto dim = static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(n))));
    ScalingRow r{n, bandwidth_scaling(n, model), sa_avg_hops(dim), kProvetAvgHops,
                 dim == 0 ? 0.0 : sa_fold_utilization(dim, fold_kernel_dim)};
    rows.push_back(r);
  }
  return rows;
}

std::string emit_scaling(const std::vector<ScalingRow>& rows, ReportFormat format) {
  if (rows.empty()) throw Error(Errc::param_validation, "no scaling rows");
  if (format == ReportFormat::json) {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"n_pes", r.n_pes},
                     {"provet_bw", r.bw.provet},
                     {"sa_bw", r.bw.sa},
                     {"gpu_bw", r.bw.gpu},
                     {"sa_hops", r.sa_hops},
                     {"provet_hops", r.provet_hops},
                     {"sa_fold_util", r.sa_fold_util}});
    return json{{"scaling", arr}}.dump(2) + "\n";
  }
  if (format == ReportFormat::csv) {
    std::string out = "n_pes,provet_bw,sa_bw,gpu_bw,sa_hops,provet_hops,sa_fold_util\r\n";
    for (const auto& r : rows)
      out += std::to_string(r.n_pes) + "," + fmt_double(r.bw.provet) + "," + fmt_double(r.bw.sa) +
             "," + fmt_double(r.bw.gpu) + "," + fmt_double(r.sa_hops) + "," +
             fmt_double(r.provet_hops) + "," + fmt_double(r.sa_fold_util) + "\r\n";
    return out;
  }
  std::ostringstream os;
  os << std::right << std::setw(8) << "n_pes" << std::setw(12) << "provet_bw" << std::setw(12)
     << "sa_bw" << std::setw(12) << "gpu_bw" << std::setw(10) << "sa_hops" << std::setw(14)
     << "provet_hops" << std::setw(14) << "sa_fold_util" << "\n";
  for (const auto& r : rows)
    os << std::setw(8) << r.n_pes << std::setw(12) << std::fixed << std::setprecision(2)
       << r.bw.provet << std::setw(12) << r.bw.sa << std::setw(12) << r.bw.gpu << std::setw(10)
       << r.sa_hops << std::setw(14) << r.provet_hops << std::setw(14) << std::setprecision(3)
       << r.sa_fold_util << "\n";
  return os.str();
}

}  // namespace provet
