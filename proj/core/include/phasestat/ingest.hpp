#pragma once

// CSV ingestion of complex components and raw time series, single-bin DFT
// extraction, and assembly of a GroupedDataset.
//
// Component files carry the header `unit,condition,re,im`. Time-series files
// carry `unit,condition,t_index,value` with an optional `repetition` column,
// and may declare `# sample_rate=<Hz>` and `# target_frequency=<Hz>` in
// comment lines before the header. Column order is free; names are
// case-insensitive.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phasestat/sample.hpp"

namespace phasestat {

struct ComponentRow {
  std::string unit;
  std::string condition;
  ComplexObservation value;
  /// 1-based line in the source file; 0 for derived rows.
  std::size_t line{0};

  bool operator==(const ComponentRow&) const = default;
};

struct ComponentTable {
  std::vector<ComponentRow> rows;
  bool operator==(const ComponentTable&) const = default;
};

struct TimeSeriesRow {
  std::string unit;
  std::string condition;
  std::string repetition;
  std::size_t t_index{0};
  double value{0.0};
  std::size_t line{0};
};

struct TimeSeriesTable {
  std::vector<TimeSeriesRow> rows;
  std::optional<double> sample_rate;
  std::optional<double> target_frequency;
};

enum class InputKind { components, time_series };

/// Reads the header to tell the two schemas apart. Throws ParseError.
InputKind detect_input_kind(std::string_view text);

/// Throws ParseError with the offending line number.
ComponentTable parse_components_csv(std::string_view text);
TimeSeriesTable parse_timeseries_csv(std::string_view text);

void write_components_csv(std::ostream& out, const ComponentTable& table);

/// Fourier coefficient (2/M) sum_t x_t exp(-2 pi i f t / fs) at the target
/// bin, so A cos(2 pi f t) maps to (A, 0) and A sin(2 pi f t) to (0, -A).
/// Throws FrequencyNotResolvable unless 0 < f < fs/2, and NonIntegerCycles
/// unless the series spans a whole number of cycles.
ComplexObservation extract_component(std::span<const double> series, double sample_rate,
                                     double target_frequency);

/// One component per (unit, condition, repetition) series, in order of first
/// appearance. Explicit rates override the file's header comments.
ComponentTable extract_components(const TimeSeriesTable& table,
                                  std::optional<double> sample_rate = std::nullopt,
                                  std::optional<double> target_frequency = std::nullopt);

struct BuiltDataset {
  GroupedDataset dataset;
  std::vector<std::string> warnings;
};

/// Groups rows into one sample per condition (conditions and units in order
/// of first appearance). Repeated (unit, condition) rows are averaged
/// coherently and reported in `warnings`.
BuiltDataset build_dataset(const ComponentTable& table, Design design,
                           ComplexObservation mu = {0.0, 0.0});

/// Whole-file read. Throws IoError.
std::string read_text_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

}  // namespace phasestat
