#pragma once

// CSV/JSON serialization of simulator traces.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "npdw/sim.hpp"

namespace npdw::io {

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Writes cores.csv, tasks.csv, windows.csv and summary.json into `dir`.
/// `config_echo` is embedded verbatim in the summary.
void write_trace(const std::filesystem::path& dir, const sim::SimTrace& trace, const nlohmann::json& config_echo);

/// Reads back what write_trace produced.
sim::SimTrace read_trace(const std::filesystem::path& dir);

}  // namespace npdw::io
