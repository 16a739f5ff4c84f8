#ifndef SHIFTLAB_IO_HPP
#define SHIFTLAB_IO_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "shiftlab/dissipative_ssf.hpp"
#include "shiftlab/step_function.hpp"
#include "shiftlab/types.hpp"

namespace shiftlab {

using json = nlohmann::json;

/// Operator file schema: {"n": int, "re": [[...]], "im": [[...]], "label": str}
/// with optional extra metadata fields (ignored on read). Rejects ragged or
/// non-square data, naming the offending row.
Operator read_operator(const std::filesystem::path& path);
Operator operator_from_json(const json& j, const std::string& origin);
json operator_to_json(const Operator& op);
void write_operator(const Operator& op, const std::filesystem::path& path);

/// Dilation export: the dense matrix as an Operator plus "period" and
/// "base_label" metadata.
json dilation_to_json(const PeriodicDilation& d, const std::string& base_label);

/// Step-function CSV: header "theta,value", one row per breakpoint with the
/// value on the arc to its right. The sidecar carries normalization and the
/// jump list.
std::string step_circle_csv(const StepFunctionCircle& f);
json step_circle_sidecar(const StepFunctionCircle& f);
StepFunctionCircle read_step_circle_csv(const std::filesystem::path& csv,
                                        const std::optional<std::filesystem::path>& sidecar);

/// Line export: "t,value" rows (value to the right of each breakpoint);
/// tails live in the sidecar.
std::string step_line_csv(const StepFunctionLine& f);
json step_line_sidecar(const StepFunctionLine& f);

std::string residual_table_csv(const std::vector<TraceFormulaReport>& rows);

/// Simple self-contained SVG plot of a circle/line step function.
std::string step_circle_svg(const StepFunctionCircle& f);
std::string step_line_svg(const StepFunctionLine& f, double radius);

/// 17-significant-digit decimal formatting used for all CSV/SVG numbers.
std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Write-to-temp + rename so failures leave no partial files.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

json hypothesis_to_json(const HypothesisReport& r);
json residuals_to_json(const std::vector<TraceFormulaReport>& rows);
json weighted_report_to_json(const WeightedNormReport& r);
json condition31_to_json(const Condition31Report& r);
json tail_probe_to_json(const TailProbeReport& r);

}  // namespace shiftlab

#endif
