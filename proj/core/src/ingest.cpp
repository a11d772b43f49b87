#include "phasestat/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>

#include <openssl/evp.h>

#include "phasestat/errors.hpp"

namespace phasestat {

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + message);
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back({number++, text.substr(pos, end - pos)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const Line& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  const std::string_view s = line.text;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += ch;
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current += ch;
    }
  }
  if (quoted) parse_fail(line.number, "unterminated quoted field");
  fields.push_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

double parse_double(const std::string& field, std::size_t line, std::string_view column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
    parse_fail(line, "column '" + std::string(column) + "': '" + field + "' is not a number");
  }
  if (!std::isfinite(value)) {
    parse_fail(line, "column '" + std::string(column) + "': value must be finite");
  }
  return value;
}

std::size_t parse_index(const std::string& field, std::size_t line, std::string_view column) {
  std::size_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    parse_fail(line, "column '" + std::string(column) + "': '" + field +
                         "' is not a non-negative integer");
  }
  return value;
}

// Comment lines before the header may carry `key=value` metadata.
struct Preamble {
  std::map<std::string, std::pair<double, std::size_t>> metadata;
  std::size_t header_index{0};
  std::vector<std::string> header;
};

Preamble read_preamble(const std::vector<Line>& lines) {
  Preamble p;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view t = trim(lines[i].text);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string_view body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        const std::string key = lower(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        p.metadata[key] = {parse_double(value, lines[i].number, key), lines[i].number};
      }
      continue;
    }
    p.header_index = i;
    for (auto& name : split_fields(lines[i])) p.header.push_back(lower(name));
    return p;
  }
  throw Error(ErrorCode::parse_error, "empty input: no header row");
}

std::map<std::string, std::size_t> column_map(const Preamble& p, std::size_t line,
                                              std::initializer_list<std::string_view> required) {
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < p.header.size(); ++i) {
    if (!cols.emplace(p.header[i], i).second) parse_fail(line, "duplicate column '" + p.header[i] + "'");
  }
  for (auto name : required) {
    if (!cols.count(std::string(name))) parse_fail(line, "missing column '" + std::string(name) + "'");
  }
  return cols;
}

template <typename RowFn>
void for_each_data_row(const std::vector<Line>& lines, const Preamble& p, RowFn&& fn) {
  std::size_t count = 0;
  for (std::size_t i = p.header_index + 1; i < lines.size(); ++i) {
    const std::string_view t = trim(lines[i].text);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(lines[i]);
    if (fields.size() != p.header.size()) {
      parse_fail(lines[i].number, "expected " + std::to_string(p.header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    fn(fields, lines[i].number);
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::parse_error, "no data rows after the header");
}

void require_label(const std::string& value, std::size_t line, std::string_view column) {
  if (value.empty()) parse_fail(line, "column '" + std::string(column) + "' is empty");
}

}  // namespace

InputKind detect_input_kind(std::string_view text) {
  const Preamble p = read_preamble(split_lines(text));
  const auto has = [&](std::string_view name) {
    return std::find(p.header.begin(), p.header.end(), name) != p.header.end();
  };
  if (has("re") && has("im")) return InputKind::components;
  if (has("t_index") && has("value")) return InputKind::time_series;
  throw Error(ErrorCode::parse_error,
              "unrecognised header: expected columns unit,condition,re,im or "
              "unit,condition,t_index,value");
}

ComponentTable parse_components_csv(std::string_view text) {
  const auto lines = split_lines(text);
  const Preamble p = read_preamble(lines);
  const auto cols = column_map(p, lines[p.header_index].number, {"unit", "condition", "re", "im"});
  ComponentTable table;
  for_each_data_row(lines, p, [&](const std::vector<std::string>& f, std::size_t line) {
    ComponentRow row;
    row.unit = f[cols.at("unit")];
    row.condition = f[cols.at("condition")];
    require_label(row.unit, line, "unit");
    require_label(row.condition, line, "condition");
    row.value = {parse_double(f[cols.at("re")], line, "re"), parse_double(f[cols.at("im")], line, "im")};
    row.line = line;
    table.rows.push_back(std::move(row));
  });
  return table;
}

TimeSeriesTable parse_timeseries_csv(std::string_view text) {
  const auto lines = split_lines(text);
  const Preamble p = read_preamble(lines);
  const auto cols =
      column_map(p, lines[p.header_index].number, {"unit", "condition", "t_index", "value"});
  const auto rep_col = cols.find("repetition");
  TimeSeriesTable table;
  if (auto it = p.metadata.find("sample_rate"); it != p.metadata.end()) {
    table.sample_rate = it->second.first;
  }
  if (auto it = p.metadata.find("target_frequency"); it != p.metadata.end()) {
    table.target_frequency = it->second.first;
  }
  for_each_data_row(lines, p, [&](const std::vector<std::string>& f, std::size_t line) {
    TimeSeriesRow row;
    row.unit = f[cols.at("unit")];
    row.condition = f[cols.at("condition")];
    require_label(row.unit, line, "unit");
    require_label(row.condition, line, "condition");
    if (rep_col != cols.end()) row.repetition = f[rep_col->second];
    row.t_index = parse_index(f[cols.at("t_index")], line, "t_index");
    row.value = parse_double(f[cols.at("value")], line, "value");
    row.line = line;
    table.rows.push_back(std::move(row));
  });
  return table;
}

void write_components_csv(std::ostream& out, const ComponentTable& table) {
  const auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  const auto number = [](double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  out << "unit,condition,re,im\n";
  for (const auto& row : table.rows) {
    out << field(row.unit) << ',' << field(row.condition) << ',' << number(row.value.real()) << ','
        << number(row.value.imag()) << '\n';
  }
}

ComplexObservation extract_component(std::span<const double> series, double sample_rate,
                                     double target_frequency) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorCode::frequency_not_resolvable, "sample rate must be positive and finite");
  }
  if (!(target_frequency > 0.0 && target_frequency < 0.5 * sample_rate)) {
    throw Error(ErrorCode::frequency_not_resolvable,
                "target frequency must lie strictly between 0 and half the sample rate");
  }
  const std::size_t m = series.size();
  const double cycles = static_cast<double>(m) * target_frequency / sample_rate;
  const double bin = std::round(cycles);
  if (bin < 1.0 || std::fabs(cycles - bin) > 1e-9 * std::max(1.0, cycles)) {
    throw Error(ErrorCode::non_integer_cycles,
                "series of " + std::to_string(m) + " samples spans " + std::to_string(cycles) +
                    " stimulation cycles; a whole number is required");
  }
  const auto k = static_cast<std::size_t>(bin);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>((k * t) % m) / static_cast<double>(m);
    re += series[t] * std::cos(angle);
    im -= series[t] * std::sin(angle);
  }
  const double scale = 2.0 / static_cast<double>(m);
  return {scale * re, scale * im};
}

ComponentTable extract_components(const TimeSeriesTable& table, std::optional<double> sample_rate,
                                  std::optional<double> target_frequency) {
  const auto fs = sample_rate ? sample_rate : table.sample_rate;
  const auto f = target_frequency ? target_frequency : table.target_frequency;
  if (!fs) throw Error(ErrorCode::parse_error, "sample rate not given (use '# sample_rate=<Hz>')");
  if (!f) {
    throw Error(ErrorCode::parse_error, "target frequency not given (use '# target_frequency=<Hz>')");
  }

  struct Series {
    std::string unit;
    std::string condition;
    std::size_t first_line;
    std::vector<std::pair<std::size_t, double>> points;
  };
  std::vector<Series> series;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  for (const auto& row : table.rows) {
    const auto key = std::make_tuple(row.unit, row.condition, row.repetition);
    auto [it, inserted] = index.emplace(key, series.size());
    if (inserted) series.push_back({row.unit, row.condition, row.line, {}});
    series[it->second].points.emplace_back(row.t_index, row.value);
  }

  ComponentTable out;
  for (auto& s : series) {
    std::sort(s.points.begin(), s.points.end());
    std::vector<double> values;
    values.reserve(s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (s.points[i].first != i) {
        parse_fail(s.first_line, "series for unit '" + s.unit + "', condition '" + s.condition +
                                     "' must have t_index 0.." +
                                     std::to_string(s.points.size() - 1) + " without gaps or repeats");
      }
      values.push_back(s.points[i].second);
    }
    out.rows.push_back({s.unit, s.condition, extract_component(values, *fs, *f), 0});
  }
  return out;
}

BuiltDataset build_dataset(const ComponentTable& table, Design design, ComplexObservation mu) {
  struct Unit {
    std::string label;
    ComplexObservation sum;
    std::size_t count{0};
  };
  struct Condition {
    std::string label;
    std::vector<Unit> units;
    std::map<std::string, std::size_t> unit_index;
  };
  std::vector<Condition> conditions;
  std::map<std::string, std::size_t> condition_index;
  for (const auto& row : table.rows) {
    auto [cit, new_condition] = condition_index.emplace(row.condition, conditions.size());
    if (new_condition) conditions.push_back({row.condition, {}, {}});
    Condition& c = conditions[cit->second];
    auto [uit, new_unit] = c.unit_index.emplace(row.unit, c.units.size());
    if (new_unit) c.units.push_back({row.unit, {0.0, 0.0}, 0});
    Unit& u = c.units[uit->second];
    u.sum += row.value;
    ++u.count;
  }

  std::vector<std::string> warnings;
  std::vector<ComplexSample> samples;
  samples.reserve(conditions.size());
  for (const auto& c : conditions) {
    std::vector<ComplexObservation> obs;
    std::vector<std::string> labels;
    for (const auto& u : c.units) {
      if (u.count > 1) {
        warnings.push_back("unit '" + u.label + "', condition '" + c.label + "': " +
                           std::to_string(u.count) + " rows averaged coherently");
      }
      obs.push_back(u.sum / static_cast<double>(u.count));
      labels.push_back(u.label);
    }
    samples.emplace_back(std::move(obs), c.label, std::move(labels));
  }
  return BuiltDataset{GroupedDataset(std::move(samples), design, mu), std::move(warnings)};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_error, "failed reading '" + path.string() + "'");
  return buf.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::io_error, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace phasestat
