#pragma once

#include <string>

#include <json.hpp>

#include "cqed/experiments.hpp"

namespace cqed {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Writes `text` to `path` through a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, std::string_view text);

/// CSV text: axis columns, observable columns, then `error`. Values use %.17g,
/// failed values are NaN, fields are quoted per RFC 4180 when needed.
std::string format_sweep_csv(const SweepResult& r);
void write_sweep_csv(const SweepResult& r, const std::string& path);

/// `<path without .csv>.meta.json`
std::string sidecar_path(const std::string& csv_path);

/// Sidecar document: result metadata plus axis/column names and the manifest fields.
nlohmann::json sweep_sidecar(const SweepResult& r, const nlohmann::json& manifest);

/// Reads a CSV written by write_sweep_csv. Axis columns are taken from the
/// sidecar when present, else `axis_count` leading columns.
SweepResult read_sweep_csv(const std::string& path, int axis_count = -1);
SweepResult parse_sweep_csv(std::string_view text, int axis_count);

/// Splits CSV text into rows of fields (RFC 4180).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

} // namespace cqed
