#pragma once

#include <stdexcept>
#include <string>

namespace provet {

// Every failure the toolkit can raise, one code per condition so tests and
// callers can match on the reason instead of parsing messages.
enum class Errc {
  // arch_config
  non_integer_port_ratio,
  non_integer_lane_count,
  zero_dimension,
  shuffle_range_exceeds_vfu,
  bad_config_file,
  // datapath
  address_out_of_range,
  width_mismatch,
  slice_out_of_range,
  // shufflers
  step_exceeds_range,
  block_size_mismatch,
  duplicate_destination,
  index_out_of_range,
  // vfu
  lane_count_mismatch,
  // isa / assembler
  parse_error,
  unknown_mnemonic,
  unresolved_label,
  operand_range_error,
  // executor
  cycle_limit_exceeded,
  simulation_fault,
  // mapping
  does_not_fit_without_folding,
  kernel_too_wide,
  unfoldable,
  unknown_template,
  param_validation,
  // oracle
  kernel_larger_than_image,
  dim_mismatch,
  // analysis / io
  zero_memory_accesses,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace provet
