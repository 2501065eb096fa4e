#include "provet/datapath.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace provet {

using nlohmann::json;

SramState::SramState(const ArchConfig& cfg)
    : cfg_(cfg), words_(cfg.sram_depth_words, WideWord(cfg.sram_width_bits)) {}

void SramState::check_addr(std::uint32_t addr) const {
  if (addr >= words_.size())
    throw Error(Errc::address_out_of_range, "sram address " + std::to_string(addr) +
                                                " >= depth " + std::to_string(words_.size()));
}

WideWord SramState::read(std::uint32_t addr) {
  check_addr(addr);
  ++reads_;
  energy_ += energy_per_word_access(cfg_);
  return words_[addr];
}

void SramState::write(std::uint32_t addr, const WideWord& word) {
  check_addr(addr);
  if (word.width_bits() != cfg_.sram_width_bits)
    throw Error(Errc::width_mismatch, "word width " + std::to_string(word.width_bits()) +
                                          " != sram width " + std::to_string(cfg_.sram_width_bits));
  ++writes_;
  energy_ += energy_per_word_access(cfg_);
  words_[addr] = word;
}

const WideWord& SramState::peek(std::uint32_t addr) const {
  check_addr(addr);
  return words_[addr];
}

void SramState::poke(std::uint32_t addr, const WideWord& word) {
  check_addr(addr);
  if (word.width_bits() != cfg_.sram_width_bits)
    throw Error(Errc::width_mismatch, "word width " + std::to_string(word.width_bits()) +
                                          " != sram width " + std::to_string(cfg_.sram_width_bits));
  words_[addr] = word;
}

void SramState::charge_bypass_access() {
  ++reads_;
  energy_ += energy_per_word_access(cfg_);
}

VwrState::VwrState(const ArchConfig& cfg) : cfg_(cfg), word_(cfg.sram_width_bits) {}

void VwrState::load_wide(const WideWord& word) {
  if (word.width_bits() != cfg_.sram_width_bits)
    throw Error(Errc::width_mismatch, "word width " + std::to_string(word.width_bits()) +
                                          " != vwr width " + std::to_string(cfg_.sram_width_bits));
  word_ = word;
  ++wide_loads_;
  energy_ += cfg_.energy.vwr_access_cost_per_bit * cfg_.sram_width_bits;
}

const WideWord& VwrState::store_wide() {
  ++wide_stores_;
  energy_ += cfg_.energy.vwr_access_cost_per_bit * cfg_.sram_width_bits;
  return word_;
}

LaneVector VwrState::read_slice(std::uint32_t slice_idx) {
  LaneVector v = word_.get_slice(cfg_, slice_idx);  // throws SliceOutOfRange
  ++narrow_reads_;
  energy_ += cfg_.energy.vwr_access_cost_per_bit * cfg_.vfu_width_bits;
  return v;
}

void VwrState::write_slice(std::uint32_t slice_idx, const LaneVector& v) {
  word_.set_slice(cfg_, slice_idx, v);
  ++narrow_writes_;
  energy_ += cfg_.energy.vwr_access_cost_per_bit * cfg_.vfu_width_bits;
}

std::int64_t VwrState::read_operand(std::uint32_t flat_index) {
  if (flat_index >= cfg_.operands_per_word())
    throw Error(Errc::slice_out_of_range, "operand " + std::to_string(flat_index) + " >= " +
                                              std::to_string(cfg_.operands_per_word()));
  ++narrow_reads_;
  energy_ += cfg_.energy.vwr_access_cost_per_bit * cfg_.vfu_width_bits;
  return word_.get_operand(flat_index, cfg_.operand_width_bits);
}

LocalRegs::LocalRegs(const ArchConfig& cfg) {
  for (auto& r : regs) r = LaneVector(cfg.lane_count(), cfg.operand_width_bits);
}

LaneVector& LocalRegs::r(std::uint32_t idx1based) {
  if (idx1based < 1 || idx1based > 4)
    throw Error(Errc::index_out_of_range, "register R" + std::to_string(idx1based));
  return regs[idx1based - 1];
}

const LaneVector& LocalRegs::r(std::uint32_t idx1based) const {
  return const_cast<LocalRegs*>(this)->r(idx1based);
}

// --- memory image -----------------------------------------------------------

std::vector<std::uint8_t> sram_to_bytes(const ArchConfig& cfg, const SramState& sram) {
  if (cfg.sram_width_bits % 8 != 0)
    throw Error(Errc::io_error, "memory images need a byte-multiple sram width");
  const std::uint32_t word_bytes = cfg.sram_width_bits / 8;
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(word_bytes) * sram.depth());
  for (std::uint32_t w = 0; w < sram.depth(); ++w) {
    const WideWord& word = sram.peek(w);
    for (std::uint32_t b = 0; b < word_bytes; ++b)
      out.push_back(static_cast<std::uint8_t>(word.get_bits(b * 8, 8)));
  }
  return out;
}

void bytes_to_sram(const ArchConfig& cfg, const std::vector<std::uint8_t>& bytes, SramState& sram) {
  if (cfg.sram_width_bits % 8 != 0)
    throw Error(Errc::io_error, "memory images need a byte-multiple sram width");
  const std::uint32_t word_bytes = cfg.sram_width_bits / 8;
  if (bytes.size() % word_bytes != 0)
    throw Error(Errc::io_error, "image size " + std::to_string(bytes.size()) +
                                    " is not a multiple of the word size " +
                                    std::to_string(word_bytes));
  const std::uint32_t words = static_cast<std::uint32_t>(bytes.size() / word_bytes);
  if (words > sram.depth())
    throw Error(Errc::io_error, "image has " + std::to_string(words) + " words, sram depth is " +
                                    std::to_string(sram.depth()));
  for (std::uint32_t w = 0; w < words; ++w) {
    WideWord word(cfg.sram_width_bits);
    for (std::uint32_t b = 0; b < word_bytes; ++b)
      word.set_bits(b * 8, 8, bytes[static_cast<std::size_t>(w) * word_bytes + b]);
    sram.poke(w, word);
  }
}

void save_memory_image(const ArchConfig& cfg, const SramState& sram, const std::string& bin_path) {
  const auto bytes = sram_to_bytes(cfg, sram);
  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write memory image: " + bin_path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void load_memory_image(const ArchConfig& cfg, SramState& sram, const std::string& bin_path) {
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open memory image: " + bin_path);
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  bytes_to_sram(cfg, bytes, sram);
}

const TensorLayout* MemoryLayout::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

std::string layout_to_json_text(const MemoryLayout& layout) {
  json j;
  j["words"] = layout.words;
  j["operand_width_bits"] = layout.operand_width_bits;
  j["tensors"] = json::array();
  for (const auto& t : layout.tensors) {
    json tj;
    tj["name"] = t.name;
    tj["rows"] = t.rows;
    tj["cols"] = t.cols;
    if (t.col_major) tj["col_major"] = true;
    if (t.flat) {
      tj["flat"] = {{"word", t.flat_word}, {"op0", t.flat_op0}};
    } else {
      tj["rowmap"] = json::array();
      for (const auto& r : t.rowmap)
        tj["rowmap"].push_back(
            {{"row", r.row}, {"word", r.word}, {"slice", r.slice}, {"lane0", r.lane0}});
    }
    if (t.has_valid)
      tj["valid"] = {{"row0", t.valid.row0},
                     {"rows", t.valid.rows},
                     {"col0", t.valid.col0},
                     {"cols", t.valid.cols},
                     {"row_stride", t.valid.row_stride},
                     {"col_stride", t.valid.col_stride}};
    j["tensors"].push_back(tj);
  }
  return j.dump(2) + "\n";
}

MemoryLayout layout_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, std::string("layout is not valid JSON: ") + e.what());
  }
  MemoryLayout layout;
  try {
    layout.words = j.at("words").get<std::uint32_t>();
    layout.operand_width_bits = j.at("operand_width_bits").get<std::uint32_t>();
    for (const auto& tj : j.at("tensors")) {
      TensorLayout t;
      t.name = tj.at("name").get<std::string>();
      t.rows = tj.at("rows").get<std::uint32_t>();
      t.cols = tj.at("cols").get<std::uint32_t>();
      t.col_major = tj.value("col_major", false);
      if (tj.contains("flat")) {
        t.flat = true;
        t.flat_word = tj.at("flat").at("word").get<std::uint32_t>();
        t.flat_op0 = tj.at("flat").at("op0").get<std::uint32_t>();
      } else {
        for (const auto& rj : tj.at("rowmap")) {
          TensorRowPlacement r;
          r.row = rj.at("row").get<std::uint32_t>();
          r.word = rj.at("word").get<std::uint32_t>();
          r.slice = rj.at("slice").get<std::uint32_t>();
          r.lane0 = rj.at("lane0").get<std::uint32_t>();
          t.rowmap.push_back(r);
        }
      }
      if (tj.contains("valid")) {
        const json& v = tj.at("valid");
        t.has_valid = true;
        t.valid.row0 = v.at("row0").get<std::uint32_t>();
        t.valid.rows = v.at("rows").get<std::uint32_t>();
        t.valid.col0 = v.at("col0").get<std::uint32_t>();
        t.valid.cols = v.at("cols").get<std::uint32_t>();
        t.valid.row_stride = v.value("row_stride", 1u);
        t.valid.col_stride = v.value("col_stride", 1u);
      }
      layout.tensors.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, std::string("bad layout descriptor: ") + e.what());
  }
  return layout;
}

void save_layout(const MemoryLayout& layout, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write layout: " + path);
  out << layout_to_json_text(layout);
}

MemoryLayout load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open layout: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return layout_from_json_text(buf.str());
}

}  // namespace provet
