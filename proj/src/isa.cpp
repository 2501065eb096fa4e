#include "provet/isa.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace provet {

std::uint32_t Program::label_index(const std::string& label) const {
  auto it = labels.find(label);
  if (it == labels.end()) throw Error(Errc::unresolved_label, "label \"" + label + "\"");
  return it->second;
}

namespace {

std::string vwr_name(std::uint32_t v) {
  if (v < 26) return std::string(1, static_cast<char>('A' + v));
  return "V" + std::to_string(v);
}

std::string format_iexpr(const IndexExpr& e) {
  if (!e.is_counter()) return std::to_string(e.base);
  std::string s = "@c" + std::to_string(e.counter);
  if (e.base > 0) s += "+" + std::to_string(e.base);
  if (e.base < 0) s += std::to_string(e.base);
  return s;
}

std::string format_loc(const Loc& l) {
  switch (l.kind) {
    case Loc::Kind::reg: return "R" + std::to_string(l.reg);
    case Loc::Kind::vwr_slice: return vwr_name(l.vwr) + "[" + format_iexpr(l.slice) + "]";
    case Loc::Kind::vwr: return vwr_name(l.vwr);
  }
  return "?";
}

struct Formatter {
  std::string operator()(const InstNop&) const { return "NOP"; }
  std::string operator()(const InstRlb& i) const {
    std::string s = "RLB vwr=" + vwr_name(i.vwr) + ", addr=" + format_iexpr(i.addr);
    if (i.shuffle_steps) s += ", shuffle=" + std::to_string(*i.shuffle_steps);
    return s;
  }
  std::string operator()(const InstWlb& i) const {
    std::string s = "WLB vwr=" + vwr_name(i.vwr) + ", addr=" + format_iexpr(i.addr);
    if (i.shuffle_steps) s += ", shuffle=" + std::to_string(*i.shuffle_steps);
    return s;
  }
  std::string operator()(const InstGlmv& i) const {
    return "GLMV vwr=" + vwr_name(i.vwr) + ", steps=" + std::to_string(i.steps);
  }
  std::string operator()(const InstVmv& i) const {
    std::string s = "VMV src=" + format_loc(i.src) + ", dst=" + format_loc(i.dst);
    if (i.broadcast) s += ", broadcast=" + format_iexpr(*i.broadcast);
    return s;
  }
  std::string operator()(const InstRmv& i) const {
    std::string s = "RMV src=R" + std::to_string(i.src_reg) + ", dst=" + format_loc(i.dst) +
                    ", step=" + std::to_string(i.step);
    if (i.fill == ShuffleFill::zero) s += ", fill=zero";
    return s;
  }
  std::string operator()(const InstPerm& i) const {
    std::string s = "PERM target=" + format_loc(i.target) + ", pairs=";
    if (i.spec.pairs.empty()) {
      s += "none";
    } else {
      bool first = true;
      for (const auto& [src, dst] : i.spec.pairs) {
        if (!first) s += ";";
        s += std::to_string(src) + ">" + std::to_string(dst);
        first = false;
      }
    }
    return s;
  }
  std::string operator()(const InstVfux& i) const {
    std::string s = std::string("VFUX mode=") + vfu_mode_name(i.mode) +
                    ", in1=R" + std::to_string(i.in1_reg);
    if (i.in2) s += ", in2=" + format_loc(*i.in2);
    s += ", out=";
    if (i.outs.empty()) s += "none";
    for (std::size_t k = 0; k < i.outs.size(); ++k) {
      if (k) s += "|";
      s += format_loc(i.outs[k]);
    }
    if (i.imm) s += ", imm=" + std::to_string(*i.imm);
    if (i.post_step) {
      s += ", post=" + std::to_string(*i.post_step);
      if (i.post_fill == ShuffleFill::zero) s += ", postfill=zero";
    }
    return s;
  }
  std::string operator()(const InstCalc& i) const {
    std::string s = std::string("CALC op=") + calc_op_name(i.op) + ", dst=c" + std::to_string(i.dst);
    switch (i.op) {
      case CalcOp::set:
        s += ", imm=" + std::to_string(i.imm);
        break;
      case CalcOp::addi:
      case CalcOp::subi:
      case CalcOp::divi:
      case CalcOp::modi:
        s += ", a=c" + std::to_string(i.a) + ", imm=" + std::to_string(i.imm);
        break;
      case CalcOp::add:
      case CalcOp::sub:
      case CalcOp::cmplt:
      case CalcOp::cmpeq:
        s += ", a=c" + std::to_string(i.a) + ", b=c" + std::to_string(i.b);
        break;
    }
    return s;
  }
  std::string operator()(const InstBran& i) const {
    if (i.cond == InstBran::Cond::always) return "BRAN cond=always, target=" + i.target;
    return "BRAN cond=nz, counter=c" + std::to_string(i.counter) + ", target=" + i.target;
  }
};

struct MnemonicVisitor {
  const char* operator()(const InstNop&) const { return "NOP"; }
  const char* operator()(const InstRlb&) const { return "RLB"; }
  const char* operator()(const InstWlb&) const { return "WLB"; }
  const char* operator()(const InstGlmv&) const { return "GLMV"; }
  const char* operator()(const InstVmv&) const { return "VMV"; }
  const char* operator()(const InstRmv&) const { return "RMV"; }
  const char* operator()(const InstPerm&) const { return "PERM"; }
  const char* operator()(const InstVfux&) const { return "VFUX"; }
  const char* operator()(const InstCalc&) const { return "CALC"; }
  const char* operator()(const InstBran&) const { return "BRAN"; }
};

// --- parsing ----------------------------------------------------------------

struct ParseCtx {
  int line_no = 0;

  [[noreturn]] void fail(Errc code, const std::string& msg) const {
    throw Error(code, "line " + std::to_string(line_no) + ": " + msg);
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::int64_t parse_int(const ParseCtx& ctx, const std::string& s) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) ctx.fail(Errc::parse_error, "bad integer \"" + s + "\"");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    ctx.fail(Errc::parse_error, "bad integer \"" + s + "\"");
  }
}

IndexExpr parse_iexpr(const ParseCtx& ctx, const std::string& s) {
  if (s.empty()) ctx.fail(Errc::parse_error, "empty index expression");
  if (s[0] != '@') return IndexExpr::lit(static_cast<std::int32_t>(parse_int(ctx, s)));
  if (s.size() < 3 || s[1] != 'c') ctx.fail(Errc::parse_error, "bad counter reference \"" + s + "\"");
  std::size_t k = 2;
  while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
  if (k == 2) ctx.fail(Errc::parse_error, "bad counter reference \"" + s + "\"");
  const auto ctr = static_cast<std::int32_t>(parse_int(ctx, s.substr(2, k - 2)));
  std::int32_t off = 0;
  if (k < s.size()) {
    if (s[k] != '+' && s[k] != '-') ctx.fail(Errc::parse_error, "bad offset in \"" + s + "\"");
    off = static_cast<std::int32_t>(parse_int(ctx, s.substr(k)));
  }
  return IndexExpr::ctr(ctr, off);
}

std::uint32_t parse_vwr(const ParseCtx& ctx, const std::string& s) {
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'Z') return static_cast<std::uint32_t>(s[0] - 'A');
  if (s.size() > 1 && s[0] == 'V') return static_cast<std::uint32_t>(parse_int(ctx, s.substr(1)));
  ctx.fail(Errc::parse_error, "bad VWR name \"" + s + "\"");
}

std::uint32_t parse_reg(const ParseCtx& ctx, const std::string& s) {
  if (s.size() == 2 && s[0] == 'R' && s[1] >= '1' && s[1] <= '4')
    return static_cast<std::uint32_t>(s[1] - '0');
  ctx.fail(Errc::operand_range_error, "bad register \"" + s + "\" (expected R1..R4)");
}

std::uint32_t parse_counter(const ParseCtx& ctx, const std::string& s) {
  if (s.size() >= 2 && s[0] == 'c') {
    const auto v = parse_int(ctx, s.substr(1));
    if (v >= 0 && v < 8) return static_cast<std::uint32_t>(v);
  }
  ctx.fail(Errc::operand_range_error, "bad counter \"" + s + "\" (expected c0..c7)");
}

Loc parse_loc(const ParseCtx& ctx, const std::string& s) {
  if (s.empty()) ctx.fail(Errc::parse_error, "empty location");
  if (s[0] == 'R') return Loc::r(parse_reg(ctx, s));
  const std::size_t br = s.find('[');
  if (br == std::string::npos) return Loc::vwr_flat(parse_vwr(ctx, s));
  if (s.back() != ']') ctx.fail(Errc::parse_error, "missing ']' in \"" + s + "\"");
  const std::uint32_t v = parse_vwr(ctx, s.substr(0, br));
  return Loc::vwr_at(v, parse_iexpr(ctx, s.substr(br + 1, s.size() - br - 2)));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// key=value operand list.
class Operands {
 public:
  Operands(const ParseCtx& ctx, const std::string& rest) : ctx_(ctx) {
    for (const auto& tok : split(rest, ',')) {
      const std::string t = trim(tok);
      if (t.empty()) continue;
      const std::size_t eq = t.find('=');
      if (eq == std::string::npos) ctx.fail(Errc::parse_error, "expected key=value, got \"" + t + "\"");
      kv_.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
  }

  std::optional<std::string> get(const std::string& key) {
    for (auto& [k, v] : kv_)
      if (k == key) {
        used_.push_back(k);
        return v;
      }
    return std::nullopt;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) ctx_.fail(Errc::parse_error, "missing operand \"" + key + "\"");
    return *v;
  }

  void finish() const {
    for (const auto& [k, v] : kv_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        ctx_.fail(Errc::parse_error, "unexpected operand \"" + k + "\"");
    }
  }

 private:
  const ParseCtx& ctx_;
  std::vector<std::pair<std::string, std::string>> kv_;
  std::vector<std::string> used_;
};

Instruction parse_instruction(const ParseCtx& ctx, const std::string& mnem, const std::string& rest) {
  Operands ops(ctx, rest);
  Instruction result;

  if (mnem == "NOP") {
    result = InstNop{};
  } else if (mnem == "RLB" || mnem == "WLB") {
    const std::uint32_t vwr = parse_vwr(ctx, ops.require("vwr"));
    const IndexExpr addr = parse_iexpr(ctx, ops.require("addr"));
    std::optional<std::int32_t> sh;
    if (auto s = ops.get("shuffle")) sh = static_cast<std::int32_t>(parse_int(ctx, *s));
    if (mnem == "RLB")
      result = InstRlb{vwr, addr, sh};
    else
      result = InstWlb{vwr, addr, sh};
  } else if (mnem == "GLMV" || mnem == "GLV") {  // GLV: legacy alias
    result = InstGlmv{parse_vwr(ctx, ops.require("vwr")),
                      static_cast<std::int32_t>(parse_int(ctx, ops.require("steps")))};
  } else if (mnem == "VMV") {
    InstVmv i;
    i.src = parse_loc(ctx, ops.require("src"));
    i.dst = parse_loc(ctx, ops.require("dst"));
    if (auto b = ops.get("broadcast")) i.broadcast = parse_iexpr(ctx, *b);
    result = i;
  } else if (mnem == "RMV") {
    InstRmv i;
    i.src_reg = parse_reg(ctx, ops.require("src"));
    i.dst = parse_loc(ctx, ops.require("dst"));
    i.step = static_cast<std::int32_t>(parse_int(ctx, ops.require("step")));
    if (auto f = ops.get("fill")) {
      if (*f == "zero")
        i.fill = ShuffleFill::zero;
      else if (*f == "rotate")
        i.fill = ShuffleFill::rotate;
      else
        ctx.fail(Errc::parse_error, "bad fill \"" + *f + "\"");
    }
    result = i;
  } else if (mnem == "PERM") {
    InstPerm i;
    i.target = parse_loc(ctx, ops.require("target"));
    const std::string pairs = ops.require("pairs");
    if (pairs != "none") {
      for (const auto& p : split(pairs, ';')) {
        const std::size_t gt = p.find('>');
        if (gt == std::string::npos) ctx.fail(Errc::parse_error, "bad pair \"" + p + "\"");
        i.spec.pairs.emplace_back(static_cast<std::uint32_t>(parse_int(ctx, trim(p.substr(0, gt)))),
                                  static_cast<std::uint32_t>(parse_int(ctx, trim(p.substr(gt + 1)))));
      }
    }
    result = i;
  } else if (mnem == "VFUX") {
    InstVfux i;
    const std::string mode = ops.require("mode");
    auto m = vfu_mode_from_name(mode);
    if (!m) ctx.fail(Errc::parse_error, "unknown VFUX mode \"" + mode + "\"");
    i.mode = *m;
    i.in1_reg = parse_reg(ctx, ops.require("in1"));
    if (auto in2 = ops.get("in2")) i.in2 = parse_loc(ctx, *in2);
    const std::string outs = ops.require("out");
    if (outs != "none")
      for (const auto& o : split(outs, '|')) i.outs.push_back(parse_loc(ctx, trim(o)));
    if (auto im = ops.get("imm")) i.imm = parse_int(ctx, *im);
    if (auto ps = ops.get("post")) i.post_step = static_cast<std::int32_t>(parse_int(ctx, *ps));
    if (auto pf = ops.get("postfill")) {
      if (*pf == "zero")
        i.post_fill = ShuffleFill::zero;
      else if (*pf == "rotate")
        i.post_fill = ShuffleFill::rotate;
      else
        ctx.fail(Errc::parse_error, "bad postfill \"" + *pf + "\"");
    }
    result = i;
  } else if (mnem == "CALC") {
    InstCalc i;
    const std::string op = ops.require("op");
    auto o = calc_op_from_name(op);
    if (!o) ctx.fail(Errc::parse_error, "unknown CALC op \"" + op + "\"");
    i.op = *o;
    i.dst = parse_counter(ctx, ops.require("dst"));
    switch (i.op) {
      case CalcOp::set:
        i.imm = parse_int(ctx, ops.require("imm"));
        break;
      case CalcOp::addi:
      case CalcOp::subi:
      case CalcOp::divi:
      case CalcOp::modi:
        i.a = parse_counter(ctx, ops.require("a"));
        i.imm = parse_int(ctx, ops.require("imm"));
        break;
      default:
        i.a = parse_counter(ctx, ops.require("a"));
        i.b = parse_counter(ctx, ops.require("b"));
        break;
    }
    result = i;
  } else if (mnem == "BRAN") {
    InstBran i;
    const std::string cond = ops.require("cond");
    if (cond == "always") {
      i.cond = InstBran::Cond::always;
    } else if (cond == "nz") {
      i.cond = InstBran::Cond::counter_nonzero;
      i.counter = parse_counter(ctx, ops.require("counter"));
    } else {
      ctx.fail(Errc::parse_error, "bad branch condition \"" + cond + "\"");
    }
    i.target = ops.require("target");
    if (i.target.empty()) ctx.fail(Errc::parse_error, "empty branch target");
    result = i;
  } else {
    ctx.fail(Errc::unknown_mnemonic, "\"" + mnem + "\"");
  }

  ops.finish();
  return result;
}

}  // namespace

std::string format_instruction(const Instruction& inst) {
  return std::visit(Formatter{}, inst);
}

const char* mnemonic(const Instruction& inst) {
  return std::visit(MnemonicVisitor{}, inst);
}

Program assemble(const std::string& text) {
  Program p;
  ParseCtx ctx;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++ctx.line_no;
    const std::size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line[0] == '.') {
      const std::size_t sp = line.find(' ');
      const std::string directive = sp == std::string::npos ? line : line.substr(0, sp);
      const std::string value = sp == std::string::npos ? "" : trim(line.substr(sp));
      if (directive == ".name")
        p.name = value;
      else if (directive == ".arch")
        p.arch_fingerprint = value;
      else
        ctx.fail(Errc::parse_error, "unknown directive \"" + directive + "\"");
      continue;
    }

    if (line.back() == ':') {
      const std::string label = trim(line.substr(0, line.size() - 1));
      if (label.empty() || label.find(' ') != std::string::npos)
        ctx.fail(Errc::parse_error, "bad label \"" + line + "\"");
      if (p.labels.count(label)) ctx.fail(Errc::parse_error, "duplicate label \"" + label + "\"");
      p.labels[label] = static_cast<std::uint32_t>(p.instructions.size());
      continue;
    }

    const std::size_t sp = line.find_first_of(" \t");
    const std::string mnem = sp == std::string::npos ? line : line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    p.instructions.push_back(parse_instruction(ctx, mnem, rest));
  }

  // All branch targets must resolve.
  for (std::size_t i = 0; i < p.instructions.size(); ++i) {
    if (const auto* b = std::get_if<InstBran>(&p.instructions[i])) {
      if (!p.labels.count(b->target))
        throw Error(Errc::unresolved_label,
                    "instruction " + std::to_string(i) + " targets unknown label \"" + b->target + "\"");
    }
  }
  return p;
}

std::string disassemble(const Program& p) {
  std::ostringstream out;
  if (!p.name.empty()) out << ".name " << p.name << "\n";
  if (!p.arch_fingerprint.empty()) out << ".arch " << p.arch_fingerprint << "\n";

  // Labels grouped by index, emitted in name order for determinism.
  std::map<std::uint32_t, std::vector<std::string>> by_index;
  for (const auto& [name, idx] : p.labels) by_index[idx].push_back(name);

  for (std::size_t i = 0; i <= p.instructions.size(); ++i) {
    auto it = by_index.find(static_cast<std::uint32_t>(i));
    if (it != by_index.end())
      for (const auto& name : it->second) out << name << ":\n";
    if (i < p.instructions.size()) out << "    " << format_instruction(p.instructions[i]) << "\n";
  }
  return out.str();
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open program: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return assemble(buf.str());
}

void save_program(const Program& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write program: " + path);
  out << disassemble(p);
}

}  // namespace provet
