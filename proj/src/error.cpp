#include "provet/error.hpp"

namespace provet {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::non_integer_port_ratio: return "NonIntegerPortRatio";
    case Errc::non_integer_lane_count: return "NonIntegerLaneCount";
    case Errc::zero_dimension: return "ZeroDimension";
    case Errc::shuffle_range_exceeds_vfu: return "ShuffleRangeExceedsVfu";
    case Errc::bad_config_file: return "BadConfigFile";
    case Errc::address_out_of_range: return "AddressOutOfRange";
    case Errc::width_mismatch: return "WidthMismatch";
    case Errc::slice_out_of_range: return "SliceOutOfRange";
    case Errc::step_exceeds_range: return "StepExceedsRange";
    case Errc::block_size_mismatch: return "BlockSizeMismatch";
    case Errc::duplicate_destination: return "DuplicateDestination";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::lane_count_mismatch: return "LaneCountMismatch";
    case Errc::parse_error: return "ParseError";
    case Errc::unknown_mnemonic: return "UnknownMnemonic";
    case Errc::unresolved_label: return "UnresolvedLabel";
    case Errc::operand_range_error: return "OperandRangeError";
    case Errc::cycle_limit_exceeded: return "CycleLimitExceeded";
    case Errc::simulation_fault: return "SimulationFault";
    case Errc::does_not_fit_without_folding: return "DoesNotFitWithoutFolding";
    case Errc::kernel_too_wide: return "KernelTooWide";
    case Errc::unfoldable: return "Unfoldable";
    case Errc::unknown_template: return "UnknownTemplate";
    case Errc::param_validation: return "ParamValidation";
    case Errc::kernel_larger_than_image: return "KernelLargerThanImage";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::zero_memory_accesses: return "ZeroMemoryAccesses";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace provet
