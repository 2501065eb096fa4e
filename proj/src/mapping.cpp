#include "provet/mapping.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace provet {

using nlohmann::json;

namespace {

// Scalar counter roles shared by every generated kernel.
constexpr std::uint32_t kRowCursor = 0;   // image row / fc column cursor
constexpr std::uint32_t kResident = 1;    // image word resident in VWR A (relative)
constexpr std::uint32_t kStageSlice = 2;  // next staging slice in VWR B
constexpr std::uint32_t kOutWord = 3;     // next output word
constexpr std::uint32_t kPassTrips = 4;   // pass / column loop counter
constexpr std::uint32_t kKernelIdx = 5;   // flat kernel operand cursor
constexpr std::uint32_t kRowTrips = 6;    // kernel row loop counter
constexpr std::uint32_t kScratch = 7;     // inner loop counter and compares

constexpr std::uint32_t kVwrImage = 0;   // VWR A: streamed image/weight words
constexpr std::uint32_t kVwrStatic = 1;  // VWR B: kernel/x + output staging

class ProgramBuilder {
 public:
  void emit(Instruction inst) { prog_.instructions.push_back(std::move(inst)); }

  std::string fresh(const std::string& stem) { return stem + "_" + std::to_string(seq_++); }

  void place(const std::string& label) {
    prog_.labels[label] = static_cast<std::uint32_t>(prog_.instructions.size());
  }

  void calc_set(std::uint32_t dst, std::int64_t imm) {
    emit(InstCalc{CalcOp::set, dst, 0, 0, imm});
  }
  void calc_addi(std::uint32_t dst, std::uint32_t a, std::int64_t imm) {
    emit(InstCalc{CalcOp::addi, dst, a, 0, imm});
  }
  void calc_subi(std::uint32_t dst, std::uint32_t a, std::int64_t imm) {
    emit(InstCalc{CalcOp::subi, dst, a, 0, imm});
  }
  void calc_divi(std::uint32_t dst, std::uint32_t a, std::int64_t imm) {
    emit(InstCalc{CalcOp::divi, dst, a, 0, imm});
  }
  void calc_sub(std::uint32_t dst, std::uint32_t a, std::uint32_t b) {
    emit(InstCalc{CalcOp::sub, dst, a, b, 0});
  }
  void bran_nz(std::uint32_t counter, const std::string& target) {
    emit(InstBran{InstBran::Cond::counter_nonzero, counter, target});
  }
  void bran_always(const std::string& target) {
    emit(InstBran{InstBran::Cond::always, 0, target});
  }

  Program take() { return std::move(prog_); }

 private:
  Program prog_;
  int seq_ = 0;
};

enum class AccKind { conv, max_pool, avg_pool };

struct SectionParams {
  std::uint32_t img_base = 0;     // absolute word of image row 0
  std::uint32_t static_word = 0;  // kernel / constant word loaded into VWR B
  std::uint32_t out_base = 0;     // absolute first output word
  std::uint32_t in_h = 0, in_w = 0, k_h = 0, k_w = 0, stride = 1;
  std::uint32_t static_slices = 1;  // slices of VWR B the kernel/constant occupies
  AccKind acc = AccKind::conv;
  std::uint32_t avg_shift = 0;
};

std::uint32_t section_passes(const SectionParams& s) {
  // Stride-1 kernels sweep every image row (trailing passes are marked
  // invalid); strided kernels only visit window starts.
  return s.stride == 1 ? s.in_h : (s.in_h - s.k_h) / s.stride + 1;
}

// Predicts the section's SRAM traffic by replaying the resident-word logic.
void predict_section_traffic(const ArchConfig& cfg, const SectionParams& s, std::uint64_t& reads,
                             std::uint64_t& writes) {
  const std::uint32_t n = cfg.port_ratio();
  const std::uint32_t passes = section_passes(s);
  const std::uint32_t n_free = n - s.static_slices;
  reads += 1;  // kernel/constant word
  std::int64_t resident = -1;
  for (std::uint32_t p = 0; p < passes; ++p) {
    const std::uint32_t r0 = p * s.stride;
    for (std::uint32_t j = 0; j < s.k_h; ++j) {
      const std::int64_t w = (r0 + j) / n;
      if (w != resident) {
        reads += 1;
        resident = w;
      }
    }
  }
  writes += (passes + n_free - 1) / n_free;
}

// Emits one sliding-window section (CONV row sweep or pooling) into the
// builder. The dataflow: partial results live in R4, realigned by +1
// rotations per kernel column and rotated back at the end of each kernel row.
void emit_section(ProgramBuilder& b, const ArchConfig& cfg, const SectionParams& s) {
  const auto n = static_cast<std::int64_t>(cfg.port_ratio());
  const auto lanes = static_cast<std::int64_t>(cfg.lane_count());
  const std::uint32_t passes = section_passes(s);

  const std::string l_pass = b.fresh("pass");
  const std::string l_row = b.fresh("row");
  const std::string l_load = b.fresh("load");
  const std::string l_body = b.fresh("body");
  const std::string l_inner = b.fresh("inner");
  const std::string l_skip = b.fresh("noflush");

  // One multiply-accumulate (or pooling) step at kernel column i; the +1
  // post-rotation keeps R4 aligned, skipped on the last column of a row.
  auto emit_iter = [&](bool rotate) {
    std::optional<std::int32_t> post;
    if (rotate) post = 1;
    switch (s.acc) {
      case AccKind::conv:
        b.emit(InstVmv{Loc::vwr_flat(kVwrStatic), Loc::r(1), IndexExpr::ctr(kKernelIdx)});
        b.emit(InstVfux{VfuMode::mult, 1, Loc::vwr_at(kVwrImage, IndexExpr::ctr(kRowCursor)),
                        {Loc::r(2)}, std::nullopt, std::nullopt, ShuffleFill::rotate});
        b.emit(InstVfux{VfuMode::add, 2, Loc::r(4), {Loc::r(4)}, std::nullopt, post,
                        ShuffleFill::rotate});
        b.calc_addi(kKernelIdx, kKernelIdx, 1);
        break;
      case AccKind::max_pool:
        b.emit(InstVfux{VfuMode::max, 4, Loc::vwr_at(kVwrImage, IndexExpr::ctr(kRowCursor)),
                        {Loc::r(4)}, std::nullopt, post, ShuffleFill::rotate});
        break;
      case AccKind::avg_pool:
        b.emit(InstVfux{VfuMode::add, 4, Loc::vwr_at(kVwrImage, IndexExpr::ctr(kRowCursor)),
                        {Loc::r(4)}, std::nullopt, post, ShuffleFill::rotate});
        break;
    }
  };

  b.emit(InstRlb{kVwrStatic, IndexExpr::lit(static_cast<std::int32_t>(s.static_word)), {}});
  b.calc_set(kRowCursor, 0);
  b.calc_set(kResident, -1);
  b.calc_set(kStageSlice, s.static_slices);
  b.calc_set(kOutWord, s.out_base);
  b.calc_set(kPassTrips, passes - 1);

  b.place(l_pass);
  // Reset the accumulator: a full-width zero-fill shift clears R4.
  b.emit(InstRmv{4, Loc::r(4), static_cast<std::int32_t>(lanes), ShuffleFill::zero});
  if (s.acc == AccKind::max_pool) {
    // Initialize the running max from the stored lane minimum.
    b.emit(InstVmv{Loc::vwr_flat(kVwrStatic), Loc::r(1), IndexExpr::lit(0)});
    b.emit(InstVmv{Loc::r(1), Loc::r(4), {}});
  }
  if (s.acc == AccKind::conv) b.calc_set(kKernelIdx, 0);
  b.calc_set(kRowTrips, s.k_h - 1);

  b.place(l_row);
  // Load the word holding the current image row unless it is resident.
  b.calc_divi(kScratch, kRowCursor, n);
  b.calc_sub(kScratch, kScratch, kResident);
  b.bran_nz(kScratch, l_load);
  b.bran_always(l_body);
  b.place(l_load);
  b.calc_divi(kResident, kRowCursor, n);
  b.emit(InstRlb{kVwrImage, IndexExpr::ctr(kResident, static_cast<std::int32_t>(s.img_base)), {}});
  b.place(l_body);

  if (s.k_w >= 2) {
    b.calc_set(kScratch, s.k_w - 2);
    b.place(l_inner);
    emit_iter(true);
    b.bran_nz(kScratch, l_inner);
  }
  emit_iter(false);
  if (s.k_w >= 2)
    b.emit(InstRmv{4, Loc::r(4), -static_cast<std::int32_t>(s.k_w - 1), ShuffleFill::rotate});
  b.calc_addi(kRowCursor, kRowCursor, 1);
  b.bran_nz(kRowTrips, l_row);

  if (s.acc == AccKind::avg_pool)
    b.emit(InstVfux{VfuMode::shift, 4, std::nullopt, {Loc::r(4)},
                    -static_cast<std::int64_t>(s.avg_shift), std::nullopt, ShuffleFill::rotate});

  // Stage the finished row and flush a full word of rows.
  b.emit(InstVmv{Loc::r(4), Loc::vwr_at(kVwrStatic, IndexExpr::ctr(kStageSlice)), {}});
  b.calc_addi(kStageSlice, kStageSlice, 1);
  b.calc_subi(kScratch, kStageSlice, n);
  b.bran_nz(kScratch, l_skip);
  b.emit(InstWlb{kVwrStatic, IndexExpr::ctr(kOutWord), {}});
  b.calc_addi(kOutWord, kOutWord, 1);
  b.calc_set(kStageSlice, s.static_slices);
  b.place(l_skip);

  b.calc_subi(kRowCursor, kRowCursor, static_cast<std::int64_t>(s.k_h) - s.stride);
  b.bran_nz(kPassTrips, l_pass);

  const std::uint32_t n_free = cfg.port_ratio() - s.static_slices;
  if (passes % n_free != 0) b.emit(InstWlb{kVwrStatic, IndexExpr::ctr(kOutWord), {}});
}

// Output rows of a section land in the staging slices of consecutive words.
void append_output_rowmap(TensorLayout& t, const SectionParams& s, const ArchConfig& cfg) {
  const std::uint32_t n_free = cfg.port_ratio() - s.static_slices;
  const std::uint32_t passes = section_passes(s);
  for (std::uint32_t p = 0; p < passes; ++p)
    t.rowmap.push_back({p, s.out_base + p / n_free, s.static_slices + p % n_free, 0});
  t.rows = passes;
  t.cols = cfg.lane_count();
}

void append_image_rowmap(TensorLayout& t, std::uint32_t img_base, std::uint32_t rows,
                         std::uint32_t lane0, const ArchConfig& cfg) {
  const std::uint32_t n = cfg.port_ratio();
  for (std::uint32_t m = 0; m < rows; ++m)
    t.rowmap.push_back({m, img_base + m / n, m % n, lane0});
}

std::uint32_t image_words(std::uint32_t in_h, const ArchConfig& cfg) {
  return (in_h + cfg.port_ratio() - 1) / cfg.port_ratio();
}

std::uint32_t output_words(std::uint32_t passes, std::uint32_t n_free) {
  return (passes + n_free - 1) / n_free;
}

struct ConvGeometry {
  std::uint32_t kk = 0;
  std::uint32_t static_slices = 0;
  std::uint32_t n_free = 0;
};

ConvGeometry conv_geometry(const ConvLayerSpec& spec, const ArchConfig& cfg) {
  const std::uint32_t n = cfg.port_ratio();
  const std::uint32_t l = cfg.lane_count();
  if (spec.k_h == 0 || spec.k_w == 0 || spec.in_h == 0 || spec.in_w == 0 || spec.stride == 0)
    throw Error(Errc::param_validation, "layer dimensions must be positive");
  if (spec.k_h > spec.in_h || spec.k_w > spec.in_w)
    throw Error(Errc::param_validation, "kernel larger than image");
  if (spec.in_w > l)
    throw Error(Errc::does_not_fit_without_folding,
                "image row of " + std::to_string(spec.in_w) + " pixels exceeds " +
                    std::to_string(l) + " lanes; partition it with plan_fold");
  ConvGeometry g;
  g.kk = spec.k_h * spec.k_w;
  if (spec.k_w > l)
    throw Error(Errc::kernel_too_wide, "kernel row of " + std::to_string(spec.k_w) +
                                           " pixels exceeds " + std::to_string(l) + " lanes");
  g.static_slices = (g.kk + 1 + l - 1) / l;  // +1 keeps a zero constant after the kernel
  if (g.static_slices >= n)
    throw Error(Errc::kernel_too_wide,
                "kernel of " + std::to_string(g.kk) + " operands leaves no staging slice");
  g.n_free = n - g.static_slices;
  return g;
}

void require_depth(const ArchConfig& cfg, std::uint32_t words_needed) {
  if (words_needed > cfg.sram_depth_words)
    throw Error(Errc::does_not_fit_without_folding,
                "mapping needs " + std::to_string(words_needed) + " SRAM words, config has " +
                    std::to_string(cfg.sram_depth_words));
}

// Stride-1 sweeps run k_h-1 passes past the last image row; the overrun
// reads are garbage (masked by the valid region) but must stay addressable.
std::uint32_t section_max_word(const ArchConfig& cfg, const SectionParams& s) {
  const std::uint32_t last_row = (section_passes(s) - 1) * s.stride + s.k_h - 1;
  return s.img_base + last_row / cfg.port_ratio();
}

ValidRegion conv_valid_region(const ConvLayerSpec& spec, std::uint32_t lane0) {
  ValidRegion v;
  v.row0 = 0;
  v.rows = (spec.in_h - spec.k_h) / spec.stride + 1;
  v.col0 = lane0;
  v.cols = (spec.in_w - spec.k_w) / spec.stride + 1;
  v.row_stride = 1;  // one staged row per pass; stride handled at pass level
  v.col_stride = spec.stride;
  return v;
}

MappingPlan map_conv_single(const ConvLayerSpec& spec, const ArchConfig& cfg) {
  const ConvGeometry g = conv_geometry(spec, cfg);

  SectionParams s;
  s.img_base = 0;
  s.static_word = image_words(spec.in_h, cfg);
  s.out_base = s.static_word + 1;
  s.in_h = spec.in_h;
  s.in_w = spec.in_w;
  s.k_h = spec.k_h;
  s.k_w = spec.k_w;
  s.stride = spec.stride;
  s.static_slices = g.static_slices;
  const std::uint32_t passes = section_passes(s);
  require_depth(cfg, std::max(s.out_base + output_words(passes, g.n_free),
                              section_max_word(cfg, s) + 1));

  ProgramBuilder b;
  emit_section(b, cfg, s);

  MappingPlan plan;
  plan.kind = "conv2d";
  plan.cfg = cfg;
  plan.stride = spec.stride;
  plan.k_h = spec.k_h;
  plan.k_w = spec.k_w;
  plan.program = b.take();
  plan.program.name = "conv" + std::to_string(spec.k_h) + "x" + std::to_string(spec.k_w) + "_" +
                      std::to_string(spec.in_h) + "x" + std::to_string(spec.in_w);
  plan.program.arch_fingerprint = config_fingerprint(cfg);

  plan.layout.words = cfg.sram_depth_words;
  plan.layout.operand_width_bits = cfg.operand_width_bits;
  TensorLayout img{.name = "image", .rows = spec.in_h, .cols = spec.in_w};
  append_image_rowmap(img, 0, spec.in_h, 0, cfg);
  TensorLayout ker{.name = "kernel", .rows = spec.k_h, .cols = spec.k_w, .flat = true,
                   .flat_word = s.static_word, .flat_op0 = 0};
  TensorLayout out{.name = "output"};
  append_output_rowmap(out, s, cfg);
  out.has_valid = true;
  out.valid = conv_valid_region(spec, 0);
  plan.layout.tensors = {img, ker, out};

  plan.expected.inner_iterations = g.kk;
  plan.expected.row_passes = passes;
  plan.expected.vfux_mult = static_cast<std::uint64_t>(g.kk) * passes;
  predict_section_traffic(cfg, s, plan.expected.sram_reads_lower_bound, plan.expected.sram_writes);
  plan.expected.total_macs =
      static_cast<std::uint64_t>(g.kk) * out.valid.rows * out.valid.cols;
  return plan;
}

MappingPlan map_depthwise(const ConvLayerSpec& spec, const ArchConfig& cfg) {
  const ConvGeometry g = conv_geometry(spec, cfg);
  const std::uint32_t c = spec.channels_in;
  if (c == 0) throw Error(Errc::param_validation, "depthwise needs channels_in >= 1");

  MappingPlan plan;
  plan.kind = "depthwise";
  plan.cfg = cfg;
  plan.stride = spec.stride;
  plan.channels = c;
  plan.k_h = spec.k_h;
  plan.k_w = spec.k_w;
  plan.layout.words = cfg.sram_depth_words;
  plan.layout.operand_width_bits = cfg.operand_width_bits;

  ProgramBuilder b;
  std::uint32_t next_word = 0;
  std::uint32_t passes = 0;
  for (std::uint32_t ch = 0; ch < c; ++ch) {
    SectionParams s;
    s.img_base = next_word;
    s.static_word = s.img_base + image_words(spec.in_h, cfg);
    s.out_base = s.static_word + 1;
    s.in_h = spec.in_h;
    s.in_w = spec.in_w;
    s.k_h = spec.k_h;
    s.k_w = spec.k_w;
    s.stride = spec.stride;
    s.static_slices = g.static_slices;
    passes = section_passes(s);
    next_word = s.out_base + output_words(passes, g.n_free);
    require_depth(cfg, std::max(next_word, section_max_word(cfg, s) + 1));
    emit_section(b, cfg, s);

    const std::string suffix = std::to_string(ch);
    TensorLayout img{.name = "image" + suffix, .rows = spec.in_h, .cols = spec.in_w};
    append_image_rowmap(img, s.img_base, spec.in_h, 0, cfg);
    TensorLayout ker{.name = "kernel" + suffix, .rows = spec.k_h, .cols = spec.k_w, .flat = true,
                     .flat_word = s.static_word, .flat_op0 = 0};
    TensorLayout out{.name = "output" + suffix};
    append_output_rowmap(out, s, cfg);
    out.has_valid = true;
    out.valid = conv_valid_region(spec, 0);
    plan.layout.tensors.push_back(img);
    plan.layout.tensors.push_back(ker);
    plan.layout.tensors.push_back(out);
    predict_section_traffic(cfg, s, plan.expected.sram_reads_lower_bound,
                            plan.expected.sram_writes);
  }
  plan.program = b.take();
  plan.program.name = "depthwise" + std::to_string(spec.k_h) + "x" + std::to_string(spec.k_w) +
                      "_c" + std::to_string(c);
  plan.program.arch_fingerprint = config_fingerprint(cfg);

  const ValidRegion v = conv_valid_region(spec, 0);
  plan.expected.inner_iterations = g.kk;
  plan.expected.row_passes = passes;
  plan.expected.vfux_mult = static_cast<std::uint64_t>(g.kk) * passes * c;
  plan.expected.total_macs = static_cast<std::uint64_t>(g.kk) * v.rows * v.cols * c;
  return plan;
}

// Standard multi-channel convolution: per-channel partial outputs, then an
// elementwise summation sweep into the final output area. Filters repeat the
// whole structure with their own kernels and outputs.
MappingPlan map_conv_multichannel(const ConvLayerSpec& spec, const ArchConfig& cfg) {
  const ConvGeometry g = conv_geometry(spec, cfg);
  const std::uint32_t cin = spec.channels_in;
  const std::uint32_t cout = spec.channels_out;

  SectionParams proto;
  proto.in_h = spec.in_h;
  proto.in_w = spec.in_w;
  proto.k_h = spec.k_h;
  proto.k_w = spec.k_w;
  proto.stride = spec.stride;
  proto.static_slices = g.static_slices;
  const std::uint32_t passes = section_passes(proto);
  const std::uint32_t out_words = output_words(passes, g.n_free);
  const std::uint32_t img_words = image_words(spec.in_h, cfg);

  // Memory map: per-channel images, then per (filter, channel) kernels,
  // a shared partial area (reused across filters), and per-filter outputs.
  const std::uint32_t kernels_base = img_words * cin;
  const std::uint32_t partial_base = kernels_base + cin * cout;
  const std::uint32_t final_base = partial_base + cin * out_words;
  require_depth(cfg, std::max(final_base + cout * out_words,
                              (cin - 1) * img_words + section_max_word(cfg, proto) + 1));

  MappingPlan plan;
  plan.kind = "conv2d";
  plan.cfg = cfg;
  plan.stride = spec.stride;
  plan.channels = cin;
  plan.filters = cout;
  plan.k_h = spec.k_h;
  plan.k_w = spec.k_w;
  plan.layout.words = cfg.sram_depth_words;
  plan.layout.operand_width_bits = cfg.operand_width_bits;

  for (std::uint32_t ch = 0; ch < cin; ++ch) {
    TensorLayout img{.name = "image" + std::to_string(ch), .rows = spec.in_h, .cols = spec.in_w};
    append_image_rowmap(img, img_words * ch, spec.in_h, 0, cfg);
    plan.layout.tensors.push_back(img);
  }

  ProgramBuilder b;
  for (std::uint32_t f = 0; f < cout; ++f) {
    for (std::uint32_t ch = 0; ch < cin; ++ch) {
      SectionParams s = proto;
      s.img_base = img_words * ch;
      s.static_word = kernels_base + f * cin + ch;
      s.out_base = partial_base + ch * out_words;
      emit_section(b, cfg, s);
      TensorLayout ker{.name = "kernel_f" + std::to_string(f) + "_c" + std::to_string(ch),
                       .rows = spec.k_h, .cols = spec.k_w, .flat = true,
                       .flat_word = s.static_word, .flat_op0 = 0};
      plan.layout.tensors.push_back(ker);
      predict_section_traffic(cfg, s, plan.expected.sram_reads_lower_bound,
                              plan.expected.sram_writes);
    }

    // Sum the channel partials into the filter's output area.
    // TODO: with more than two VWRs, keep one partial word resident per
    // channel and drop the per-word reload chain below.
    for (std::uint32_t w = 0; w < out_words; ++w) {
      const std::uint32_t rows_here =
          std::min(g.n_free, passes - w * g.n_free);  // staged rows in this word
      for (std::uint32_t ch = 0; ch < cin; ++ch) {
        b.emit(InstRlb{kVwrImage,
                       IndexExpr::lit(static_cast<std::int32_t>(partial_base + ch * out_words + w)),
                       {}});
        plan.expected.sram_reads_lower_bound += 1;
        for (std::uint32_t sl = 0; sl < rows_here; ++sl) {
          const auto slice = IndexExpr::lit(static_cast<std::int32_t>(g.static_slices + sl));
          if (ch == 0) {
            b.emit(InstVmv{Loc::vwr_at(kVwrImage, slice), Loc::vwr_at(kVwrStatic, slice), {}});
          } else {
            b.emit(InstVmv{Loc::vwr_at(kVwrStatic, slice), Loc::r(4), {}});
            b.emit(InstVmv{Loc::vwr_at(kVwrImage, slice), Loc::r(2), {}});
            b.emit(InstVfux{VfuMode::add, 2, Loc::r(4), {Loc::r(4)}, std::nullopt, std::nullopt,
                            ShuffleFill::rotate});
            b.emit(InstVmv{Loc::r(4), Loc::vwr_at(kVwrStatic, slice), {}});
          }
        }
      }
      b.emit(InstWlb{kVwrStatic,
                     IndexExpr::lit(static_cast<std::int32_t>(final_base + f * out_words + w)),
                     {}});
      plan.expected.sram_writes += 1;
    }

    SectionParams s_out = proto;
    s_out.out_base = final_base + f * out_words;
    TensorLayout out{.name = cout == 1 ? "output" : "output" + std::to_string(f)};
    append_output_rowmap(out, s_out, cfg);
    out.has_valid = true;
    out.valid = conv_valid_region(spec, 0);
    plan.layout.tensors.push_back(out);
  }

  plan.program = b.take();
  plan.program.name = "conv" + std::to_string(spec.k_h) + "x" + std::to_string(spec.k_w) + "_cin" +
                      std::to_string(cin) + "_cout" + std::to_string(cout);
  plan.program.arch_fingerprint = config_fingerprint(cfg);

  const ValidRegion v = conv_valid_region(spec, 0);
  plan.expected.inner_iterations = g.kk;
  plan.expected.row_passes = passes;
  plan.expected.vfux_mult = static_cast<std::uint64_t>(g.kk) * passes * cin * cout;
  plan.expected.total_macs =
      static_cast<std::uint64_t>(g.kk) * v.rows * v.cols * cin * cout;
  return plan;
}

}  // namespace

MappingPlan map_conv(const ConvLayerSpec& spec, const ArchConfig& cfg) {
  validate(cfg);
  if (spec.depthwise) return map_depthwise(spec, cfg);
  if (spec.channels_in == 1 && spec.channels_out == 1) return map_conv_single(spec, cfg);
  return map_conv_multichannel(spec, cfg);
}

MappingPlan map_conv_packed(const ConvLayerSpec& spec, std::uint32_t images,
                            const ArchConfig& cfg) {
  validate(cfg);
  const std::uint32_t l = cfg.lane_count();
  if (images < 1) throw Error(Errc::param_validation, "need at least one image");
  if (spec.channels_in != 1 || spec.channels_out != 1 || spec.depthwise)
    throw Error(Errc::param_validation, "packing applies to single-channel layers");
  if (static_cast<std::uint64_t>(spec.in_w) * images > l)
    throw Error(Errc::does_not_fit_without_folding,
                std::to_string(images) + " images of width " + std::to_string(spec.in_w) +
                    " exceed " + std::to_string(l) + " lanes");

  // One fused sweep over rows that hold all images side by side; the shared
  // kernel makes the broadcast path identical to the single-image plan.
  ConvLayerSpec fused = spec;
  fused.in_w = spec.in_w * images;
  MappingPlan plan = map_conv_single(fused, cfg);
  plan.kind = "conv2d_packed";
  plan.channels = images;
  plan.program.name = "conv" + std::to_string(spec.k_h) + "x" + std::to_string(spec.k_w) +
                      "_packed" + std::to_string(images);

  // Re-describe the fused image/output as per-image tensors.
  MemoryLayout fused_layout = plan.layout;
  plan.layout.tensors.clear();
  for (std::uint32_t p = 0; p < images; ++p) {
    TensorLayout img{.name = "image" + std::to_string(p), .rows = spec.in_h, .cols = spec.in_w};
    append_image_rowmap(img, 0, spec.in_h, p * spec.in_w, cfg);
    plan.layout.tensors.push_back(img);

    TensorLayout out = *fused_layout.find("output");
    out.name = "output" + std::to_string(p);
    out.has_valid = true;
    out.valid = conv_valid_region(spec, p * spec.in_w);
    plan.layout.tensors.push_back(out);
  }
  TensorLayout ker = *fused_layout.find("kernel");
  plan.layout.tensors.push_back(ker);

  const ValidRegion v = conv_valid_region(spec, 0);
  plan.expected.total_macs =
      static_cast<std::uint64_t>(spec.k_h) * spec.k_w * v.rows * v.cols * images;
  return plan;
}

MappingPlan map_fc(std::uint32_t in_features, std::uint32_t out_features, const ArchConfig& cfg) {
  validate(cfg);
  const std::uint32_t n = cfg.port_ratio();
  const std::uint32_t l = cfg.lane_count();
  if (in_features == 0 || out_features == 0)
    throw Error(Errc::param_validation, "feature counts must be positive");
  if (out_features > l)
    throw Error(Errc::does_not_fit_without_folding,
                "out_features " + std::to_string(out_features) + " exceeds " + std::to_string(l) +
                    " lanes; split the output");
  const std::uint32_t x_slices = (in_features + l - 1) / l;
  if (x_slices >= n)
    throw Error(Errc::does_not_fit_without_folding,
                "x of " + std::to_string(in_features) + " values leaves no staging slice");

  const std::uint32_t w_words = (in_features + n - 1) / n;  // one column per slice
  const std::uint32_t x_word = w_words;
  const std::uint32_t out_word = x_word + 1;
  require_depth(cfg, out_word + 1);
  const std::uint32_t stage_slice = x_slices;

  ProgramBuilder b;
  const std::string l_col = b.fresh("col");
  const std::string l_load = b.fresh("load");
  const std::string l_body = b.fresh("body");

  b.emit(InstRlb{kVwrStatic, IndexExpr::lit(static_cast<std::int32_t>(x_word)), {}});
  b.calc_set(kRowCursor, 0);
  b.calc_set(kResident, -1);
  b.calc_set(kPassTrips, in_features - 1);
  b.emit(InstRmv{4, Loc::r(4), static_cast<std::int32_t>(l), ShuffleFill::zero});
  b.place(l_col);
  b.calc_divi(kScratch, kRowCursor, n);
  b.calc_sub(kScratch, kScratch, kResident);
  b.bran_nz(kScratch, l_load);
  b.bran_always(l_body);
  b.place(l_load);
  b.calc_divi(kResident, kRowCursor, n);
  b.emit(InstRlb{kVwrImage, IndexExpr::ctr(kResident, 0), {}});
  b.place(l_body);
  b.emit(InstVmv{Loc::vwr_flat(kVwrStatic), Loc::r(1), IndexExpr::ctr(kRowCursor)});
  b.emit(InstVfux{VfuMode::mult, 1, Loc::vwr_at(kVwrImage, IndexExpr::ctr(kRowCursor)),
                  {Loc::r(2)}, std::nullopt, std::nullopt, ShuffleFill::rotate});
  b.emit(InstVfux{VfuMode::add, 2, Loc::r(4), {Loc::r(4)}, std::nullopt, std::nullopt,
                  ShuffleFill::rotate});
  b.calc_addi(kRowCursor, kRowCursor, 1);
  b.bran_nz(kPassTrips, l_col);
  b.emit(InstVmv{Loc::r(4), Loc::vwr_at(kVwrStatic, IndexExpr::lit(static_cast<std::int32_t>(stage_slice))), {}});
  b.emit(InstWlb{kVwrStatic, IndexExpr::lit(static_cast<std::int32_t>(out_word)), {}});

  MappingPlan plan;
  plan.kind = "fc";
  plan.cfg = cfg;
  plan.program = b.take();
  plan.program.name = "fc" + std::to_string(out_features) + "x" + std::to_string(in_features);
  plan.program.arch_fingerprint = config_fingerprint(cfg);

  plan.layout.words = cfg.sram_depth_words;
  plan.layout.operand_width_bits = cfg.operand_width_bits;
  TensorLayout w{.name = "weights", .rows = out_features, .cols = in_features, .col_major = true};
  for (std::uint32_t i = 0; i < in_features; ++i)
    w.rowmap.push_back({i, i / n, i % n, 0});
  TensorLayout x{.name = "x", .rows = 1, .cols = in_features, .flat = true,
                 .flat_word = x_word, .flat_op0 = 0};
  TensorLayout out{.name = "output", .rows = 1, .cols = l};
  out.rowmap.push_back({0, out_word, stage_slice, 0});
  out.has_valid = true;
  out.valid = {0, 1, 0, out_features, 1, 1};
  plan.layout.tensors = {w, x, out};

  plan.expected.inner_iterations = in_features;
  plan.expected.row_passes = 1;
  plan.expected.vfux_mult = in_features;
  plan.expected.sram_reads_lower_bound = 1 + w_words;
  plan.expected.sram_writes = 1;
  plan.expected.total_macs = static_cast<std::uint64_t>(in_features) * out_features;
  return plan;
}

namespace {

MappingPlan map_pool(std::uint32_t in_h, std::uint32_t in_w, std::uint32_t k, std::uint32_t stride,
                     bool take_max, const ArchConfig& cfg) {
  validate(cfg);
  ConvLayerSpec as_conv{in_h, in_w, k, k, 1, 1, stride, false};
  const std::uint32_t l = cfg.lane_count();
  const std::uint32_t n = cfg.port_ratio();
  if (k == 0 || stride == 0) throw Error(Errc::param_validation, "window and stride must be positive");
  if (k > in_h || k > in_w) throw Error(Errc::param_validation, "window larger than image");
  if (in_w > l)
    throw Error(Errc::does_not_fit_without_folding, "image row exceeds the lane count");

  std::uint32_t avg_shift = 0;
  if (!take_max) {
    while ((1u << avg_shift) < k * k) ++avg_shift;
    if ((1u << avg_shift) != k * k)
      throw Error(Errc::param_validation, "average pooling needs a power-of-two window area");
  }

  SectionParams s;
  s.img_base = 0;
  s.static_word = image_words(in_h, cfg);
  s.out_base = s.static_word + 1;
  s.in_h = in_h;
  s.in_w = in_w;
  s.k_h = k;
  s.k_w = k;
  s.stride = stride;
  s.static_slices = 1;  // constant word: lane initializer at operand 0
  s.acc = take_max ? AccKind::max_pool : AccKind::avg_pool;
  s.avg_shift = avg_shift;
  if (n < 2) throw Error(Errc::does_not_fit_without_folding, "pooling needs a port ratio >= 2");
  const std::uint32_t passes = section_passes(s);
  require_depth(cfg, std::max(s.out_base + output_words(passes, n - 1),
                              section_max_word(cfg, s) + 1));

  ProgramBuilder b;
  emit_section(b, cfg, s);

  MappingPlan plan;
  plan.kind = take_max ? "maxpool" : "avgpool";
  plan.cfg = cfg;
  plan.stride = stride;
  plan.k_h = plan.k_w = k;
  plan.program = b.take();
  plan.program.name = plan.kind + std::to_string(k) + "x" + std::to_string(k);
  plan.program.arch_fingerprint = config_fingerprint(cfg);

  plan.layout.words = cfg.sram_depth_words;
  plan.layout.operand_width_bits = cfg.operand_width_bits;
  TensorLayout img{.name = "image", .rows = in_h, .cols = in_w};
  append_image_rowmap(img, 0, in_h, 0, cfg);
  TensorLayout out{.name = "output"};
  append_output_rowmap(out, s, cfg);
  out.has_valid = true;
  out.valid = conv_valid_region(as_conv, 0);
  plan.layout.tensors = {img, out};

  if (take_max) {
    TensorLayout cst{.name = "__minval", .rows = 1, .cols = 1, .flat = true,
                     .flat_word = s.static_word, .flat_op0 = 0};
    plan.layout.tensors.push_back(cst);
    const std::int64_t minv = -(std::int64_t{1} << (cfg.operand_width_bits - 1));
    plan.constants["__minval"] = Tensor2D(1, 1, {minv});
  }

  plan.expected.inner_iterations = static_cast<std::uint64_t>(k) * k;
  plan.expected.row_passes = passes;
  plan.expected.vfux_mult = 0;
  predict_section_traffic(cfg, s, plan.expected.sram_reads_lower_bound, plan.expected.sram_writes);
  plan.expected.total_macs =
      static_cast<std::uint64_t>(k) * k * out.valid.rows * out.valid.cols;
  return plan;
}

}  // namespace

MappingPlan map_maxpool(std::uint32_t in_h, std::uint32_t in_w, std::uint32_t k,
                        std::uint32_t stride, const ArchConfig& cfg) {
  return map_pool(in_h, in_w, k, stride, true, cfg);
}

MappingPlan map_avgpool(std::uint32_t in_h, std::uint32_t in_w, std::uint32_t k,
                        std::uint32_t stride, const ArchConfig& cfg) {
  return map_pool(in_h, in_w, k, stride, false, cfg);
}

FoldPlan plan_fold(const ConvLayerSpec& spec, const ArchConfig& cfg) {
  validate(cfg);
  const std::uint32_t l = cfg.lane_count();
  if (spec.k_w > l || spec.k_h * spec.k_w + 1 > (cfg.port_ratio() - 1) * l)
    throw Error(Errc::unfoldable, "kernel exceeds the tile capacity");

  FoldPlan plan;
  if (spec.in_w > l) {
    // Partition into column bands overlapping by k_w-1 pixels.
    plan.mode = FoldPlan::Mode::partition_with_overlap;
    const std::uint32_t piece_stride = l - (spec.k_w - 1);
    std::uint32_t col = 0;
    while (col < spec.in_w) {
      FoldPiece p;
      p.col0 = col;
      p.width = std::min(l, spec.in_w - col);
      plan.pieces.push_back(p);
      col += piece_stride;
    }
    // Duplicated pixels: columns covered by more than one piece.
    std::vector<std::uint32_t> coverage(spec.in_w, 0);
    for (const auto& p : plan.pieces)
      for (std::uint32_t cc = p.col0; cc < p.col0 + p.width; ++cc) coverage[cc] += 1;
    std::uint64_t dup = 0;
    for (auto cvg : coverage)
      if (cvg > 1) dup += cvg - 1;
    plan.duplicated_fraction = static_cast<double>(dup) / spec.in_w;
    plan.lane_utilization = 1.0;
  } else {
    // Pack as many copies of the problem as fit side by side.
    plan.mode = FoldPlan::Mode::pack_multiple;
    const std::uint32_t capacity = std::max<std::uint32_t>(1, l / spec.in_w);
    for (std::uint32_t p = 0; p < capacity; ++p)
      plan.pieces.push_back({0, spec.in_w, p * spec.in_w});
    plan.duplicated_fraction = 0.0;
    plan.lane_utilization = static_cast<double>(capacity) * spec.in_w / l;
  }
  return plan;
}

MappingPlan expand_template(const std::string& name,
                            const std::map<std::string, std::int64_t>& params,
                            const ArchConfig& cfg) {
  auto get = [&](const std::string& key, std::int64_t fallback, bool required) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (required) throw Error(Errc::param_validation, "template needs parameter \"" + key + "\"");
      return fallback;
    }
    if (it->second <= 0 && key != "depthwise")
      throw Error(Errc::param_validation, "parameter \"" + key + "\" must be positive");
    return it->second;
  };
  auto known = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* kk : keys)
        if (k == kk) ok = true;
      if (!ok) throw Error(Errc::param_validation, "unknown parameter \"" + k + "\"");
    }
  };

  if (name == "conv2d") {
    known({"in_h", "in_w", "k_h", "k_w", "stride", "channels_in", "channels_out", "depthwise"});
    ConvLayerSpec spec;
    spec.in_h = static_cast<std::uint32_t>(get("in_h", 0, true));
    spec.in_w = static_cast<std::uint32_t>(get("in_w", 0, true));
    spec.k_h = static_cast<std::uint32_t>(get("k_h", 0, true));
    spec.k_w = static_cast<std::uint32_t>(get("k_w", 0, true));
    spec.stride = static_cast<std::uint32_t>(get("stride", 1, false));
    spec.channels_in = static_cast<std::uint32_t>(get("channels_in", 1, false));
    spec.channels_out = static_cast<std::uint32_t>(get("channels_out", 1, false));
    spec.depthwise = get("depthwise", 0, false) != 0;
    return map_conv(spec, cfg);
  }
  if (name == "fc") {
    known({"in_features", "out_features"});
    return map_fc(static_cast<std::uint32_t>(get("in_features", 0, true)),
                  static_cast<std::uint32_t>(get("out_features", 0, true)), cfg);
  }
  if (name == "maxpool" || name == "avgpool") {
    known({"in_h", "in_w", "k", "stride"});
    const auto in_h = static_cast<std::uint32_t>(get("in_h", 0, true));
    const auto in_w = static_cast<std::uint32_t>(get("in_w", 0, true));
    const auto k = static_cast<std::uint32_t>(get("k", 0, true));
    const auto stride = static_cast<std::uint32_t>(get("stride", k, false));
    return name == "maxpool" ? map_maxpool(in_h, in_w, k, stride, cfg)
                             : map_avgpool(in_h, in_w, k, stride, cfg);
  }
  throw Error(Errc::unknown_template, "\"" + name + "\"");
}

// --- tensor movement ----------------------------------------------------------

Tensor2D read_tensor(const ArchConfig& cfg, const SramState& sram, const TensorLayout& t) {
  Tensor2D out(t.rows, t.cols);
  const std::uint32_t l = cfg.lane_count();
  if (t.flat) {
    for (std::uint32_t r = 0; r < t.rows; ++r)
      for (std::uint32_t c = 0; c < t.cols; ++c)
        out.set(r, c,
                sram.peek(t.flat_word)
                    .get_operand(t.flat_op0 + r * t.cols + c, cfg.operand_width_bits));
    return out;
  }
  for (const auto& p : t.rowmap) {
    const WideWord& w = sram.peek(p.word);
    const std::uint32_t count = t.col_major ? t.rows : t.cols;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::int64_t v =
          w.get_operand(p.slice * l + p.lane0 + i, cfg.operand_width_bits);
      if (t.col_major)
        out.set(i, p.row, v);
      else
        out.set(p.row, i, v);
    }
  }
  return out;
}

void write_tensor(const ArchConfig& cfg, SramState& sram, const TensorLayout& t,
                  const Tensor2D& v) {
  if (v.rows != t.rows || v.cols != t.cols)
    throw Error(Errc::dim_mismatch, "tensor \"" + t.name + "\" wants " + std::to_string(t.rows) +
                                        "x" + std::to_string(t.cols) + ", got " +
                                        std::to_string(v.rows) + "x" + std::to_string(v.cols));
  const std::uint32_t l = cfg.lane_count();
  if (t.flat) {
    WideWord w = sram.peek(t.flat_word);
    for (std::uint32_t r = 0; r < t.rows; ++r)
      for (std::uint32_t c = 0; c < t.cols; ++c)
        w.set_operand(t.flat_op0 + r * t.cols + c, cfg.operand_width_bits, v.at(r, c));
    sram.poke(t.flat_word, w);
    return;
  }
  for (const auto& p : t.rowmap) {
    WideWord w = sram.peek(p.word);
    const std::uint32_t count = t.col_major ? t.rows : t.cols;
    for (std::uint32_t i = 0; i < count; ++i)
      w.set_operand(p.slice * l + p.lane0 + i, cfg.operand_width_bits,
                    t.col_major ? v.at(i, p.row) : v.at(p.row, i));
    sram.poke(p.word, w);
  }
}

void fill_memory(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs,
                 SramState& sram) {
  for (const auto& [name, value] : plan.constants) {
    const TensorLayout* t = plan.layout.find(name);
    if (t) write_tensor(plan.cfg, sram, *t, value);
  }
  for (const auto& t : plan.layout.tensors) {
    if (t.name.rfind("output", 0) == 0 || t.name.rfind("__", 0) == 0) continue;
    auto it = inputs.find(t.name);
    if (it == inputs.end())
      throw Error(Errc::param_validation, "missing input tensor \"" + t.name + "\"");
    write_tensor(plan.cfg, sram, t, it->second);
  }
}

Tensor2D extract_valid(const ArchConfig& cfg, const SramState& sram, const MemoryLayout& layout,
                       const std::string& name) {
  const TensorLayout* t = layout.find(name);
  if (!t) throw Error(Errc::param_validation, "no tensor \"" + name + "\" in the layout");
  if (!t->has_valid) throw Error(Errc::param_validation, "tensor \"" + name + "\" has no valid region");
  const Tensor2D raw = read_tensor(cfg, sram, *t);
  Tensor2D out(t->valid.rows, t->valid.cols);
  for (std::uint32_t r = 0; r < t->valid.rows; ++r)
    for (std::uint32_t c = 0; c < t->valid.cols; ++c)
      out.set(r, c, raw.at(t->valid.row0 + r * t->valid.row_stride,
                           t->valid.col0 + c * t->valid.col_stride));
  return out;
}

Tensor2D extract_output(const MappingPlan& plan, const SramState& sram, const std::string& name) {
  return extract_valid(plan.cfg, sram, plan.layout, name);
}

PlanRun run_plan(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs,
                 const RunOptions& opt) {
  PlanRun out;
  out.state = MachineState(plan.cfg);
  fill_memory(plan, inputs, out.state.sram);
  out.report = run(out.state, plan.program, opt);
  return out;
}

// --- persistence ----------------------------------------------------------------

std::string expected_to_json_text(const MappingPlan& plan) {
  json j;
  j["kind"] = plan.kind;
  j["stride"] = plan.stride;
  j["channels"] = plan.channels;
  j["filters"] = plan.filters;
  j["k_h"] = plan.k_h;
  j["k_w"] = plan.k_w;
  j["expected"] = {{"inner_iterations", plan.expected.inner_iterations},
                   {"row_passes", plan.expected.row_passes},
                   {"vfux_mult", plan.expected.vfux_mult},
                   {"sram_reads_lower_bound", plan.expected.sram_reads_lower_bound},
                   {"sram_writes", plan.expected.sram_writes},
                   {"total_macs", plan.expected.total_macs}};
  json consts = json::object();
  for (const auto& [name, t] : plan.constants)
    consts[name] = {{"rows", t.rows}, {"cols", t.cols}, {"data", t.data}};
  j["constants"] = consts;
  return j.dump(2) + "\n";
}

void save_plan(const MappingPlan& plan, const std::map<std::string, Tensor2D>& inputs,
               const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir + ": " + ec.message());

  save_program(plan.program, dir + "/program.pvt");
  save_layout(plan.layout, dir + "/layout.json");
  save_config(plan.cfg, dir + "/config.json");
  {
    std::ofstream out(dir + "/expected.json");
    if (!out) throw Error(Errc::io_error, "cannot write expected.json");
    out << expected_to_json_text(plan);
  }
  SramState sram(plan.cfg);
  fill_memory(plan, inputs, sram);
  save_memory_image(plan.cfg, sram, dir + "/mem.bin");
}

MappingPlan load_plan(const std::string& dir) {
  MappingPlan plan;
  plan.cfg = load_config(dir + "/config.json");
  plan.layout = load_layout(dir + "/layout.json");
  plan.program = load_program(dir + "/program.pvt");

  std::ifstream in(dir + "/expected.json");
  if (!in) throw Error(Errc::io_error, "cannot open " + dir + "/expected.json");
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
    plan.kind = j.at("kind").get<std::string>();
    plan.stride = j.at("stride").get<std::uint32_t>();
    plan.channels = j.at("channels").get<std::uint32_t>();
    plan.filters = j.value("filters", 1u);
    plan.k_h = j.at("k_h").get<std::uint32_t>();
    plan.k_w = j.at("k_w").get<std::uint32_t>();
    const json& e = j.at("expected");
    plan.expected.inner_iterations = e.at("inner_iterations").get<std::uint64_t>();
    plan.expected.row_passes = e.at("row_passes").get<std::uint64_t>();
    plan.expected.vfux_mult = e.at("vfux_mult").get<std::uint64_t>();
    plan.expected.sram_reads_lower_bound = e.at("sram_reads_lower_bound").get<std::uint64_t>();
    plan.expected.sram_writes = e.at("sram_writes").get<std::uint64_t>();
    plan.expected.total_macs = e.at("total_macs").get<std::uint64_t>();
    for (auto it = j.at("constants").begin(); it != j.at("constants").end(); ++it) {
      plan.constants[it.key()] =
          Tensor2D(it.value().at("rows").get<std::uint32_t>(),
                   it.value().at("cols").get<std::uint32_t>(),
                   it.value().at("data").get<std::vector<std::int64_t>>());
    }
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, std::string("bad expected.json: ") + e.what());
  }
  return plan;
}

}  // namespace provet
