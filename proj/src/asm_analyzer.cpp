#include "npdw/asm_analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <numeric>
#include <span>
#include <unordered_map>

namespace npdw::analysis {

namespace {

// How an opcode family contributes to the power estimate.
enum class PowerKind : std::uint8_t {
  None,
  Add,
  Mul,
  Div,
  Move,   // read or write depending on the destination operand
  Load,
  Store,
  Copy,
  Compare,
  Malloc,
  Call,   // memcpy-style callees count as copies, anything else is excluded
};

struct OpInfo {
  OpcodeCategory category;
  PowerKind power;
};

using C = OpcodeCategory;
using P = PowerKind;

struct TableRow {
  std::string_view name;
  OpInfo info;
};

// Base mnemonics (AT&T size suffix stripped) and exact SSE/x87 spellings.
constexpr TableRow kTable[] = {
    // C1: addition, subtraction, integer multiplication and the other
    // single-cycle ALU operations.
    {"add", {C::C1, P::Add}},       {"sub", {C::C1, P::Add}},       {"adc", {C::C1, P::Add}},
    {"sbb", {C::C1, P::Add}},       {"inc", {C::C1, P::Add}},       {"dec", {C::C1, P::Add}},
    {"neg", {C::C1, P::Add}},       {"imul", {C::C1, P::Mul}},      {"mul", {C::C1, P::Mul}},
    {"and", {C::C1, P::None}},      {"or", {C::C1, P::None}},       {"xor", {C::C1, P::None}},
    {"not", {C::C1, P::None}},      {"shl", {C::C1, P::None}},      {"shr", {C::C1, P::None}},
    {"sal", {C::C1, P::None}},      {"sar", {C::C1, P::None}},      {"rol", {C::C1, P::None}},
    {"ror", {C::C1, P::None}},      {"addsd", {C::C1, P::Add}},     {"addss", {C::C1, P::Add}},
    {"addpd", {C::C1, P::Add}},     {"addps", {C::C1, P::Add}},     {"subsd", {C::C1, P::Add}},
    {"subss", {C::C1, P::Add}},     {"subpd", {C::C1, P::Add}},     {"subps", {C::C1, P::Add}},
    {"vaddsd", {C::C1, P::Add}},    {"vaddss", {C::C1, P::Add}},    {"vaddpd", {C::C1, P::Add}},
    {"vaddps", {C::C1, P::Add}},    {"vsubsd", {C::C1, P::Add}},    {"vsubss", {C::C1, P::Add}},
    {"vsubpd", {C::C1, P::Add}},    {"vsubps", {C::C1, P::Add}},    {"paddb", {C::C1, P::Add}},
    {"paddw", {C::C1, P::Add}},     {"paddd", {C::C1, P::Add}},     {"paddq", {C::C1, P::Add}},
    {"psubb", {C::C1, P::Add}},     {"psubw", {C::C1, P::Add}},     {"psubd", {C::C1, P::Add}},
    {"psubq", {C::C1, P::Add}},     {"pmulld", {C::C1, P::Mul}},    {"pmuludq", {C::C1, P::Mul}},
    {"pxor", {C::C1, P::None}},     {"por", {C::C1, P::None}},      {"pand", {C::C1, P::None}},
    {"pandn", {C::C1, P::None}},    {"xorps", {C::C1, P::None}},    {"xorpd", {C::C1, P::None}},
    {"andps", {C::C1, P::None}},    {"andpd", {C::C1, P::None}},    {"andnps", {C::C1, P::None}},
    {"andnpd", {C::C1, P::None}},   {"orps", {C::C1, P::None}},     {"orpd", {C::C1, P::None}},
    {"vxorps", {C::C1, P::None}},   {"vxorpd", {C::C1, P::None}},   {"vpxor", {C::C1, P::None}},
    {"fadd", {C::C1, P::Add}},      {"faddp", {C::C1, P::Add}},     {"fiadd", {C::C1, P::Add}},
    {"fsub", {C::C1, P::Add}},      {"fsubp", {C::C1, P::Add}},     {"fsubr", {C::C1, P::Add}},
    {"fsubrp", {C::C1, P::Add}},    {"fisub", {C::C1, P::Add}},     {"fchs", {C::C1, P::None}},
    {"fabs", {C::C1, P::None}},
    // C2: integer division.
    {"div", {C::C2, P::Div}},       {"idiv", {C::C2, P::Div}},
    // C3: floating point multiplication.
    {"mulsd", {C::C3, P::Mul}},     {"mulss", {C::C3, P::Mul}},     {"mulpd", {C::C3, P::Mul}},
    {"mulps", {C::C3, P::Mul}},     {"vmulsd", {C::C3, P::Mul}},    {"vmulss", {C::C3, P::Mul}},
    {"vmulpd", {C::C3, P::Mul}},    {"vmulps", {C::C3, P::Mul}},    {"fmul", {C::C3, P::Mul}},
    {"fmulp", {C::C3, P::Mul}},     {"fimul", {C::C3, P::Mul}},
    // C4: floating point division (square roots share the divider).
    {"divsd", {C::C4, P::Div}},     {"divss", {C::C4, P::Div}},     {"divpd", {C::C4, P::Div}},
    {"divps", {C::C4, P::Div}},     {"vdivsd", {C::C4, P::Div}},    {"vdivss", {C::C4, P::Div}},
    {"vdivpd", {C::C4, P::Div}},    {"vdivps", {C::C4, P::Div}},    {"sqrtsd", {C::C4, P::Div}},
    {"sqrtss", {C::C4, P::Div}},    {"vsqrtsd", {C::C4, P::Div}},   {"fdiv", {C::C4, P::Div}},
    {"fdivp", {C::C4, P::Div}},     {"fdivr", {C::C4, P::Div}},     {"fdivrp", {C::C4, P::Div}},
    {"fidiv", {C::C4, P::Div}},     {"fsqrt", {C::C4, P::Div}},
    // C5: heap memory operations.
    {"__malloc", {C::C5, P::Malloc}},
    // C6: stack and register/memory data movement.
    {"mov", {C::C6, P::Move}},      {"movabs", {C::C6, P::Move}},   {"lea", {C::C6, P::Add}},
    {"push", {C::C6, P::Store}},    {"pop", {C::C6, P::Load}},      {"leave", {C::C6, P::Load}},
    {"xchg", {C::C6, P::Move}},     {"movsd", {C::C6, P::Move}},    {"movss", {C::C6, P::Move}},
    {"movapd", {C::C6, P::Move}},   {"movaps", {C::C6, P::Move}},   {"movupd", {C::C6, P::Move}},
    {"movups", {C::C6, P::Move}},   {"movdqa", {C::C6, P::Move}},   {"movdqu", {C::C6, P::Move}},
    {"movd", {C::C6, P::Move}},     {"movq", {C::C6, P::Move}},     {"movhpd", {C::C6, P::Move}},
    {"movlpd", {C::C6, P::Move}},   {"vmovsd", {C::C6, P::Move}},   {"vmovss", {C::C6, P::Move}},
    {"vmovapd", {C::C6, P::Move}},  {"vmovaps", {C::C6, P::Move}},  {"vmovupd", {C::C6, P::Move}},
    {"vmovups", {C::C6, P::Move}},  {"vmovdqa", {C::C6, P::Move}},  {"vmovdqu", {C::C6, P::Move}},
    {"cltq", {C::C6, P::None}},     {"cqto", {C::C6, P::None}},     {"cltd", {C::C6, P::None}},
    {"cwtl", {C::C6, P::None}},     {"cbtw", {C::C6, P::None}},     {"cwtd", {C::C6, P::None}},
    {"cvtsi2sd", {C::C6, P::None}}, {"cvtsi2ss", {C::C6, P::None}}, {"cvtsi2sdl", {C::C6, P::None}},
    {"cvtsi2sdq", {C::C6, P::None}},{"cvtsi2ssl", {C::C6, P::None}},{"cvtsi2ssq", {C::C6, P::None}},
    {"cvttsd2si", {C::C6, P::None}},{"cvttss2si", {C::C6, P::None}},{"cvtsd2ss", {C::C6, P::None}},
    {"cvtss2sd", {C::C6, P::None}}, {"cvttsd2siq", {C::C6, P::None}},
    {"unpcklpd", {C::C6, P::None}}, {"unpcklps", {C::C6, P::None}}, {"unpckhpd", {C::C6, P::None}},
    {"shufpd", {C::C6, P::None}},   {"shufps", {C::C6, P::None}},   {"pshufd", {C::C6, P::None}},
    {"movsb", {C::C6, P::Copy}},    {"movsw", {C::C6, P::Copy}},    {"movsl", {C::C6, P::Copy}},
    {"stos", {C::C6, P::Copy}},     {"stosb", {C::C6, P::Copy}},    {"stosw", {C::C6, P::Copy}},
    {"stosl", {C::C6, P::Copy}},    {"stosq", {C::C6, P::Copy}},    {"lods", {C::C6, P::Copy}},
    {"lodsb", {C::C6, P::Copy}},    {"lodsq", {C::C6, P::Copy}},    {"fld", {C::C6, P::Load}},
    {"fild", {C::C6, P::Load}},     {"fst", {C::C6, P::Store}},     {"fstp", {C::C6, P::Store}},
    {"fist", {C::C6, P::Store}},    {"fistp", {C::C6, P::Store}},   {"fisttp", {C::C6, P::Store}},
    {"fxch", {C::C6, P::None}},     {"fld1", {C::C6, P::None}},     {"fldz", {C::C6, P::None}},
    {"fldcw", {C::C6, P::Load}},    {"fnstcw", {C::C6, P::Store}},
    // C7: control flow and flag-setting comparisons.
    {"jmp", {C::C7, P::None}},      {"call", {C::C7, P::Call}},     {"cmp", {C::C7, P::Compare}},
    {"test", {C::C7, P::Compare}},  {"ucomisd", {C::C7, P::Compare}}, {"ucomiss", {C::C7, P::Compare}},
    {"comisd", {C::C7, P::Compare}},{"comiss", {C::C7, P::Compare}},{"vucomisd", {C::C7, P::Compare}},
    {"vcomisd", {C::C7, P::Compare}},{"fcomi", {C::C7, P::Compare}},{"fcomip", {C::C7, P::Compare}},
    {"fucomi", {C::C7, P::Compare}},{"fucomip", {C::C7, P::Compare}},{"bt", {C::C7, P::Compare}},
    {"cmps", {C::C7, P::Compare}},  {"cmpsb", {C::C7, P::Compare}}, {"scas", {C::C7, P::Compare}},
    {"scasb", {C::C7, P::Compare}}, {"loop", {C::C7, P::None}},     {"jrcxz", {C::C7, P::None}},
    {"jecxz", {C::C7, P::None}},
    // C0: explicitly uncategorized.
    {"ret", {C::C0, P::None}},      {"nop", {C::C0, P::None}},      {"endbr64", {C::C0, P::None}},
    {"endbr32", {C::C0, P::None}},  {"hlt", {C::C0, P::None}},      {"ud2", {C::C0, P::None}},
    {"pause", {C::C0, P::None}},    {"cpuid", {C::C0, P::None}},    {"rdtsc", {C::C0, P::None}},
    {"nopw", {C::C0, P::None}},     {"nopl", {C::C0, P::None}},
};

constexpr std::string_view kConditionCodes[] = {
    "a", "ae", "b", "be", "c", "e", "g", "ge", "l", "le", "na", "nae", "nb", "nbe", "nc", "ne",
    "ng", "nge", "nl", "nle", "no", "np", "ns", "nz", "o", "p", "pe", "po", "s", "z",
};

constexpr std::string_view kPrefixes[] = {
    "rep", "repe", "repz", "repne", "repnz", "lock", "notrack", "bnd", "data16", "addr32", "rex64",
};

constexpr std::string_view kHeapCallees[] = {"malloc", "calloc", "realloc", "_Znwm", "_Znam", "__malloc"};
constexpr std::string_view kCopyCallees[] = {"memcpy", "memmove", "memset", "strcpy", "strncpy"};

const std::unordered_map<std::string_view, OpInfo>& table() {
  static const auto map = [] {
    std::unordered_map<std::string_view, OpInfo> m;
    for (const auto& row : kTable) m.emplace(row.name, row.info);
    return m;
  }();
  return map;
}

bool is_condition_code(std::string_view s) {
  return std::find(std::begin(kConditionCodes), std::end(kConditionCodes), s) != std::end(kConditionCodes);
}

bool is_size_suffix(char c) { return c == 'b' || c == 'w' || c == 'l' || c == 'q'; }

std::optional<OpInfo> lookup(std::string_view m) {
  const auto& t = table();
  if (auto it = t.find(m); it != t.end()) return it->second;

  if (m.size() > 1 && m.front() == 'j' && is_condition_code(m.substr(1))) return OpInfo{C::C7, P::None};
  if (m.starts_with("set") && is_condition_code(m.substr(3))) return OpInfo{C::C7, P::None};
  if (m.starts_with("cmov")) {
    auto cc = m.substr(4);
    if (is_condition_code(cc)) return OpInfo{C::C6, P::Move};
    if (!cc.empty() && is_size_suffix(cc.back()) && is_condition_code(cc.substr(0, cc.size() - 1)))
      return OpInfo{C::C6, P::Move};
  }
  // movzbl, movswq, movslq ...: sign/zero extending moves.
  if (m.size() == 6 && (m.starts_with("movz") || m.starts_with("movs")) && is_size_suffix(m[4]) &&
      is_size_suffix(m[5]))
    return OpInfo{C::C6, P::Move};

  if (m.size() > 1 && is_size_suffix(m.back())) {
    if (auto it = t.find(m.substr(0, m.size() - 1)); it != t.end()) return it->second;
  }
  // x87 memory-operand suffixes: s (single), l (double), t (extended), ll (int64).
  if (m.size() > 2 && m.front() == 'f') {
    if (m.ends_with("ll")) {
      if (auto it = t.find(m.substr(0, m.size() - 2)); it != t.end()) return it->second;
    }
    const char last = m.back();
    if (last == 's' || last == 'l' || last == 't') {
      if (auto it = t.find(m.substr(0, m.size() - 1)); it != t.end()) return it->second;
    }
  }
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.' || c == '$' || c == '@';
}

bool is_valid_mnemonic(std::string_view m) {
  if (m.empty()) return false;
  const auto first = static_cast<unsigned char>(m.front());
  if (!(std::isalpha(first) || m.front() == '_')) return false;
  return std::all_of(m.begin(), m.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  });
}

// Strips any leading "label:" tokens. Quoted labels are not produced by GCC.
std::string_view strip_labels(std::string_view s) {
  for (;;) {
    s = trim(s);
    std::size_t i = 0;
    while (i < s.size() && is_symbol_char(s[i])) ++i;
    if (i > 0 && i < s.size() && s[i] == ':') {
      s.remove_prefix(i + 1);
      continue;
    }
    return s;
  }
}

std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (in_string) continue;
    if (s[i] == '#') return s.substr(0, i);
    if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '/') return s.substr(0, i);
  }
  return s;
}

std::vector<std::string> split_operands(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      auto op = trim(s.substr(begin, i - begin));
      if (!op.empty()) out.emplace_back(op);
      begin = i + 1;
    } else if (s[i] == '(') {
      ++depth;
    } else if (s[i] == ')') {
      --depth;
    }
  }
  return out;
}

// "malloc@PLT", "*malloc@GOTPCREL(%rip)" -> "malloc"
std::string_view callee_name(std::string_view operand) {
  if (!operand.empty() && operand.front() == '*') operand.remove_prefix(1);
  const auto end = operand.find_first_of("@(+");
  return trim(operand.substr(0, end));
}

bool contains(std::span<const std::string_view> list, std::string_view s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

bool looks_like_intel(std::string_view operands) {
  if (operands.find('[') != std::string_view::npos) return true;
  const auto lower = to_lower(operands);
  return lower.find(" ptr ") != std::string::npos || lower.find(" ptr[") != std::string::npos;
}

bool is_memory_operand(std::string_view op) {
  return !op.empty() && op.front() != '%' && op.front() != '$';
}

}  // namespace

double time_weight(OpcodeCategory category) noexcept {
  switch (category) {
    case C::C0: return 0.0;
    case C::C1: return 1.00;
    case C::C2: return 1.42;
    case C::C3: return 1.03;
    case C::C4: return 1.66;
    case C::C5: return 12.30;
    case C::C6: return 1.0;
    case C::C7: return 1.0;
  }
  return 0.0;
}

std::string_view describe(OpcodeCategory category) noexcept {
  switch (category) {
    case C::C0: return "no category";
    case C::C1: return "addition, subtraction, integer multiplication";
    case C::C2: return "integer division";
    case C::C3: return "floating point multiplication";
    case C::C4: return "floating point division";
    case C::C5: return "heap memory operations";
    case C::C6: return "stack memory operations";
    case C::C7: return "control instructions";
  }
  return "";
}

std::string_view name(OpcodeCategory category) noexcept {
  constexpr std::string_view names[] = {"C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7"};
  return names[static_cast<std::size_t>(category)];
}

double power_weight(PowerCategory category) noexcept {
  switch (category) {
    case PowerCategory::Addition: return 1.43;
    case PowerCategory::Multiplication: return 1.74;
    case PowerCategory::Division: return 1.95;
    case PowerCategory::MemoryRead: return 1.00;
    case PowerCategory::MemoryWrite: return 1.12;
    case PowerCategory::MemoryCopy: return 2.84;
    case PowerCategory::Comparison: return 1.17;
    case PowerCategory::Malloc: return 21.06;
  }
  return 0.0;
}

std::string_view name(PowerCategory category) noexcept {
  constexpr std::string_view names[] = {"addition",     "multiplication", "division",   "memory_read",
                                        "memory_write", "memory_copy",    "comparison", "malloc"};
  return names[static_cast<std::size_t>(category)];
}

std::vector<std::string> ParseResult::mnemonics() const {
  std::vector<std::string> out;
  out.reserve(instructions.size());
  for (const auto& ins : instructions) out.push_back(ins.mnemonic);
  return out;
}

ParseResult parse_assembly(std::string_view source) {
  ParseResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const auto raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? source.size() + 1 : nl + 1;
    ++line_no;

    auto line = strip_labels(raw);
    if (line.empty()) continue;
    if (line.front() == '.') {
      if (to_lower(line).starts_with(".intel_syntax"))
        throw AsmError("line " + std::to_string(line_no) + ": Intel syntax is not supported (AT&T only)");
      continue;
    }
    line = trim(strip_comment(line));
    if (line.empty()) continue;

    // GAS accepts ';' as a statement separator.
    std::size_t stmt_begin = 0;
    while (stmt_begin <= line.size()) {
      const auto semi = line.find(';', stmt_begin);
      auto stmt = trim(line.substr(stmt_begin, semi == std::string_view::npos ? std::string_view::npos
                                                                               : semi - stmt_begin));
      stmt_begin = (semi == std::string_view::npos) ? line.size() + 1 : semi + 1;
      stmt = strip_labels(stmt);
      if (stmt.empty() || stmt.front() == '.') continue;

      std::string mnemonic;
      std::string_view rest = stmt;
      for (;;) {
        const auto ws = rest.find_first_of(" \t");
        mnemonic = to_lower(rest.substr(0, ws));
        rest = ws == std::string_view::npos ? std::string_view{} : trim(rest.substr(ws));
        if (!contains(kPrefixes, mnemonic) || rest.empty()) break;
      }
      if (!is_valid_mnemonic(mnemonic) || contains(kPrefixes, mnemonic)) {
        ++result.diagnostics.malformed_lines;
        result.diagnostics.malformed_line_numbers.push_back(line_no);
        continue;
      }
      if (looks_like_intel(rest))
        throw AsmError("line " + std::to_string(line_no) + ": Intel syntax is not supported (AT&T only)");

      Instruction ins{std::move(mnemonic), split_operands(rest), line_no};
      if ((ins.mnemonic == "call" || ins.mnemonic == "callq") && ins.operands.size() == 1 &&
          contains(kHeapCallees, callee_name(ins.operands.front()))) {
        ins.mnemonic = "__malloc";
      }
      result.instructions.push_back(std::move(ins));
    }
  }
  return result;
}

OpcodeCategory classify_opcode(std::string_view mnemonic) {
  const auto info = lookup(to_lower(mnemonic));
  return info ? info->category : OpcodeCategory::C0;
}

bool is_known_opcode(std::string_view mnemonic) { return lookup(to_lower(mnemonic)).has_value(); }

std::optional<PowerCategory> classify_power(const Instruction& instruction) {
  const auto info = lookup(instruction.mnemonic);
  if (!info) return std::nullopt;
  const auto& ops = instruction.operands;
  switch (info->power) {
    case P::None: return std::nullopt;
    case P::Add: return PowerCategory::Addition;
    case P::Mul: return PowerCategory::Multiplication;
    case P::Div: return PowerCategory::Division;
    case P::Load: return PowerCategory::MemoryRead;
    case P::Store: return PowerCategory::MemoryWrite;
    case P::Compare: return PowerCategory::Comparison;
    case P::Malloc: return PowerCategory::Malloc;
    case P::Copy: return PowerCategory::MemoryCopy;
    case P::Move:
      // movsd/movsl without operands are the string instructions.
      if (ops.empty()) return PowerCategory::MemoryCopy;
      return is_memory_operand(ops.back()) ? PowerCategory::MemoryWrite : PowerCategory::MemoryRead;
    case P::Call:
      if (ops.size() == 1 && contains(kCopyCallees, callee_name(ops.front()))) return PowerCategory::MemoryCopy;
      return std::nullopt;
  }
  return std::nullopt;
}

void CategoryThresholds::validate() const {
  if (!(time_moderate < time_high) || !(power_moderate < power_high))
    throw std::invalid_argument("category thresholds must satisfy moderate < high");
}

int categorize(double value, double moderate, double high) noexcept {
  if (value < moderate) return 1;
  if (value < high) return 2;
  return 3;
}

std::size_t AnalysisReport::categorized_total() const {
  return std::accumulate(counts_by_category.begin() + 1, counts_by_category.end(), std::size_t{0});
}

AnalysisReport analyze(std::string_view source, const CategoryThresholds& thresholds) {
  return analyze(parse_assembly(source), thresholds);
}

AnalysisReport analyze(const ParseResult& parsed, const CategoryThresholds& thresholds) {
  thresholds.validate();
  if (parsed.instructions.empty()) throw AsmError("no instructions");

  AnalysisReport report;
  report.diagnostics = parsed.diagnostics;
  for (const auto& ins : parsed.instructions) {
    if (!is_known_opcode(ins.mnemonic)) {
      ++report.diagnostics.unknown_mnemonics;
      auto& ex = report.diagnostics.unknown_examples;
      if (ex.size() < 8 && std::find(ex.begin(), ex.end(), ins.mnemonic) == ex.end()) ex.push_back(ins.mnemonic);
    }
    ++report.counts_by_category[static_cast<std::size_t>(classify_opcode(ins.mnemonic))];
    if (auto pc = classify_power(ins)) ++report.counts_by_power[static_cast<std::size_t>(*pc)];
  }

  const auto denominator = report.categorized_total();
  if (denominator == 0) throw AsmError("no instructions (only uncategorized opcodes)");
  double time_sum = 0.0;
  for (std::size_t i = 1; i < kOpcodeCategoryCount; ++i)
    time_sum += static_cast<double>(report.counts_by_category[i]) * time_weight(static_cast<OpcodeCategory>(i));
  report.avg_time_cost = time_sum / static_cast<double>(denominator);

  std::size_t power_n = 0;
  double power_sum = 0.0;
  for (std::size_t i = 0; i < kPowerCategoryCount; ++i) {
    power_n += report.counts_by_power[i];
    power_sum += static_cast<double>(report.counts_by_power[i]) * power_weight(static_cast<PowerCategory>(i));
  }
  // A stream with no power-classified opcode (pure control flow) gets the
  // cheapest class rather than an undefined mean.
  report.avg_power_cost = power_n == 0 ? power_weight(PowerCategory::MemoryRead)
                                       : power_sum / static_cast<double>(power_n);

  report.p1 = categorize(report.avg_time_cost, thresholds.time_moderate, thresholds.time_high);
  report.p2 = categorize(report.avg_power_cost, thresholds.power_moderate, thresholds.power_high);
  return report;
}

}  // namespace npdw::analysis
