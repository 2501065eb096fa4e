#include "provet/arch_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace provet {

using nlohmann::json;

std::vector<ConfigIssue> check(const ArchConfig& cfg) {
  std::vector<ConfigIssue> issues;
  auto add = [&](Errc c, std::string d) { issues.push_back({c, std::move(d)}); };

  if (cfg.sram_width_bits == 0) add(Errc::zero_dimension, "sram_width_bits must be positive");
  if (cfg.sram_depth_words == 0) add(Errc::zero_dimension, "sram_depth_words must be positive");
  if (cfg.vfu_width_bits == 0) add(Errc::zero_dimension, "vfu_width_bits must be positive");
  if (cfg.operand_width_bits == 0) add(Errc::zero_dimension, "operand_width_bits must be positive");
  if (cfg.vfu_count == 0) add(Errc::zero_dimension, "vfu_count must be positive");
  if (cfg.vwr_count == 0) add(Errc::zero_dimension, "vwr_count must be positive");

  if (cfg.vfu_width_bits != 0 && cfg.sram_width_bits % cfg.vfu_width_bits != 0) {
    add(Errc::non_integer_port_ratio,
        "sram_width_bits (" + std::to_string(cfg.sram_width_bits) +
            ") not a multiple of vfu_width_bits (" + std::to_string(cfg.vfu_width_bits) + ")");
  }
  if (cfg.operand_width_bits != 0 && cfg.vfu_width_bits % cfg.operand_width_bits != 0) {
    add(Errc::non_integer_lane_count,
        "vfu_width_bits (" + std::to_string(cfg.vfu_width_bits) +
            ") not a multiple of operand_width_bits (" + std::to_string(cfg.operand_width_bits) + ")");
  }
  if (cfg.operand_width_bits > 64) {
    add(Errc::non_integer_lane_count, "operand_width_bits above 64 is not supported");
  }
  if (cfg.operand_width_bits != 0 && cfg.vfu_width_bits % cfg.operand_width_bits == 0 &&
      cfg.vfu_shuffle_max_range > cfg.lane_count()) {
    add(Errc::shuffle_range_exceeds_vfu,
        "vfu_shuffle_max_range (" + std::to_string(cfg.vfu_shuffle_max_range) +
            ") exceeds lane count (" + std::to_string(cfg.lane_count()) + ")");
  }
  if (cfg.energy.bl_cost_per_cell < 0 || cfg.energy.wl_cost_per_cell < 0 ||
      cfg.energy.vwr_access_cost_per_bit < 0 || cfg.energy.shuffle_cost_per_block_step < 0) {
    add(Errc::zero_dimension, "energy coefficients must be non-negative");
  }
  return issues;
}

ArchConfig validate(const ArchConfig& cfg) {
  auto issues = check(cfg);
  if (issues.empty()) return cfg;
  std::ostringstream msg;
  msg << issues.size() << " invalid config field(s):";
  for (const auto& i : issues) msg << "\n  - " << errc_name(i.code) << ": " << i.detail;
  throw Error(issues.front().code, msg.str());
}

double energy_per_word_access(const ArchConfig& cfg) {
  const double w = cfg.sram_width_bits;
  const double d = cfg.sram_depth_words;
  return w * d * cfg.energy.bl_cost_per_cell + w * cfg.energy.wl_cost_per_cell;
}

double energy_per_bit(const ArchConfig& cfg) {
  return cfg.sram_depth_words * cfg.energy.bl_cost_per_cell + cfg.energy.wl_cost_per_cell;
}

namespace {

void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known)
      throw Error(Errc::bad_config_file, "unknown key \"" + it.key() + "\" in " + where);
  }
}

std::uint32_t get_u32(const json& j, const char* key, std::uint32_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw Error(Errc::bad_config_file, std::string("key \"") + key + "\" must be a non-negative integer");
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number())
    throw Error(Errc::bad_config_file, std::string("key \"") + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

ArchConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config_file, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::bad_config_file, "config root must be a JSON object");

  require_keys(j, {"sram_width_bits", "sram_depth_words", "vfu_width_bits", "operand_width_bits",
                   "vfu_count", "vwr_count", "tile_shuffle_max_steps", "vfu_shuffle_max_range",
                   "energy"},
               "config");

  ArchConfig def;
  ArchConfig cfg;
  cfg.sram_width_bits = get_u32(j, "sram_width_bits", def.sram_width_bits);
  cfg.sram_depth_words = get_u32(j, "sram_depth_words", def.sram_depth_words);
  cfg.vfu_width_bits = get_u32(j, "vfu_width_bits", def.vfu_width_bits);
  cfg.operand_width_bits = get_u32(j, "operand_width_bits", def.operand_width_bits);
  cfg.vfu_count = get_u32(j, "vfu_count", def.vfu_count);
  cfg.vwr_count = get_u32(j, "vwr_count", def.vwr_count);
  cfg.tile_shuffle_max_steps = get_u32(j, "tile_shuffle_max_steps", def.tile_shuffle_max_steps);
  cfg.vfu_shuffle_max_range = get_u32(j, "vfu_shuffle_max_range", def.vfu_shuffle_max_range);

  if (j.contains("energy")) {
    const json& e = j.at("energy");
    if (!e.is_object()) throw Error(Errc::bad_config_file, "\"energy\" must be an object");
    require_keys(e, {"bl_cost_per_cell", "wl_cost_per_cell", "vwr_access_cost_per_bit",
                     "shuffle_cost_per_block_step"},
                 "energy");
    cfg.energy.bl_cost_per_cell = get_num(e, "bl_cost_per_cell", def.energy.bl_cost_per_cell);
    cfg.energy.wl_cost_per_cell = get_num(e, "wl_cost_per_cell", def.energy.wl_cost_per_cell);
    cfg.energy.vwr_access_cost_per_bit =
        get_num(e, "vwr_access_cost_per_bit", def.energy.vwr_access_cost_per_bit);
    cfg.energy.shuffle_cost_per_block_step =
        get_num(e, "shuffle_cost_per_block_step", def.energy.shuffle_cost_per_block_step);
  }
  return validate(cfg);
}

std::string config_to_json_text(const ArchConfig& cfg) {
  json j;
  j["sram_width_bits"] = cfg.sram_width_bits;
  j["sram_depth_words"] = cfg.sram_depth_words;
  j["vfu_width_bits"] = cfg.vfu_width_bits;
  j["operand_width_bits"] = cfg.operand_width_bits;
  j["vfu_count"] = cfg.vfu_count;
  j["vwr_count"] = cfg.vwr_count;
  j["tile_shuffle_max_steps"] = cfg.tile_shuffle_max_steps;
  j["vfu_shuffle_max_range"] = cfg.vfu_shuffle_max_range;
  j["energy"] = {{"bl_cost_per_cell", cfg.energy.bl_cost_per_cell},
                 {"wl_cost_per_cell", cfg.energy.wl_cost_per_cell},
                 {"vwr_access_cost_per_bit", cfg.energy.vwr_access_cost_per_bit},
                 {"shuffle_cost_per_block_step", cfg.energy.shuffle_cost_per_block_step}};
  return j.dump(2) + "\n";
}

ArchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

void save_config(const ArchConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write config file: " + path);
  out << config_to_json_text(cfg);
}

std::string config_fingerprint(const ArchConfig& cfg) {
  // FNV-1a over the canonical JSON text.
  const std::string text = config_to_json_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace provet
