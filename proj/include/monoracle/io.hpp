#pragma once

#include "monoracle/criteria.hpp"
#include "monoracle/grid.hpp"
#include "monoracle/selector.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace monoracle {

//! Kernel wire format: {"W": number, "t": integer, "v": [numbers]}.
//! Extra keys (e.g. an echoed "config") are preserved on write and ignored on
//! read; W, t and v round-trip bit-exactly.
nlohmann::json kernel_to_json(const SpectralKernel& kernel);

//! `enforce_invariants = false` loads raw kernels for diagnostics.
SpectralKernel kernel_from_json(const nlohmann::json& object, bool enforce_invariants = true);

nlohmann::json risk_report_to_json(const RiskReport& report);

std::string trace_to_csv(const std::vector<RefinementStep>& trace,
                         const std::vector<std::string>& config_lines = {});

//! Newline-delimited reals; blank lines and '#' comments are skipped.
std::vector<double> read_value_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

std::string format_double(double value);

} // namespace monoracle
