#pragma once

// Static cost analysis of GCC-emitted AT&T x86-64 assembly.
//
// Every instruction is assigned a time category (C0..C7) and, where one
// applies, a power category. The count-weighted mean of the category weights
// gives a relative per-instruction cost, which is bucketed into
// {1 = low, 2 = moderate, 3 = high}. Only static occurrences are counted.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace npdw::analysis {

enum class OpcodeCategory : std::uint8_t { C0, C1, C2, C3, C4, C5, C6, C7 };
inline constexpr std::size_t kOpcodeCategoryCount = 8;

/// Relative time weight. C6 and C7 are pinned to exactly 1.0; C0 is 0.
double time_weight(OpcodeCategory category) noexcept;
std::string_view describe(OpcodeCategory category) noexcept;
std::string_view name(OpcodeCategory category) noexcept;

enum class PowerCategory : std::uint8_t {
  Addition,
  Multiplication,
  Division,
  MemoryRead,
  MemoryWrite,
  MemoryCopy,
  Comparison,
  Malloc,
};
inline constexpr std::size_t kPowerCategoryCount = 8;

/// Relative energy per instruction (2.4 GHz reference).
double power_weight(PowerCategory category) noexcept;
std::string_view name(PowerCategory category) noexcept;

class AsmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instruction {
  std::string mnemonic;               // lowercase, suffix kept ("addl")
  std::vector<std::string> operands;  // AT&T order: sources first, destination last
  std::size_t line = 0;               // 1-based source line
};

struct Diagnostics {
  std::size_t malformed_lines = 0;
  std::vector<std::size_t> malformed_line_numbers;
  std::size_t unknown_mnemonics = 0;
  std::vector<std::string> unknown_examples;  // first few distinct unknown mnemonics
};

struct ParseResult {
  std::vector<Instruction> instructions;
  Diagnostics diagnostics;

  std::vector<std::string> mnemonics() const;
};

/// Splits assembly text into instructions. Labels, directives and comments are
/// dropped; `call malloc` (and calloc/realloc/operator new) is normalized to
/// the pseudo-mnemonic `__malloc`. Lines without a recognizable mnemonic are
/// skipped and tallied. Throws AsmError on Intel-syntax input.
ParseResult parse_assembly(std::string_view source);

/// Total: mnemonics outside the table map to C0.
OpcodeCategory classify_opcode(std::string_view mnemonic);

/// True when the mnemonic is in the classification table (including the
/// explicit no-category entries such as `ret`).
bool is_known_opcode(std::string_view mnemonic);

/// Power class of one instruction; operands decide read vs. write for moves.
std::optional<PowerCategory> classify_power(const Instruction& instruction);

struct CategoryThresholds {
  double time_moderate = 1.5;
  double time_high = 4.0;
  double power_moderate = 1.6;
  double power_high = 5.0;

  void validate() const;
};

/// Maps a cost to 1, 2 or 3 given the two bucket boundaries.
int categorize(double value, double moderate, double high) noexcept;

struct AnalysisReport {
  std::array<std::size_t, kOpcodeCategoryCount> counts_by_category{};
  std::array<std::size_t, kPowerCategoryCount> counts_by_power{};
  double avg_time_cost = 0.0;
  double avg_power_cost = 0.0;
  int p1 = 1;
  int p2 = 1;
  Diagnostics diagnostics;

  std::size_t count(OpcodeCategory c) const { return counts_by_category[static_cast<std::size_t>(c)]; }
  std::size_t count(PowerCategory c) const { return counts_by_power[static_cast<std::size_t>(c)]; }
  std::size_t categorized_total() const;
};

AnalysisReport analyze(std::string_view source, const CategoryThresholds& thresholds = {});
AnalysisReport analyze(const ParseResult& parsed, const CategoryThresholds& thresholds = {});

}  // namespace npdw::analysis
