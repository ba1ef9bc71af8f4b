#include "propp/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace propp {

namespace {

std::string loc(const std::string& origin, std::size_t line) {
  return origin + ": line " + std::to_string(line);
}

// Splits one CSV record; `line` is advanced past continuation lines when a
// quoted field spans a newline.
std::vector<std::string> split_record(std::istream& in, std::string first_line,
                                      const std::string& origin,
                                      std::size_t& line) {
  std::vector<std::string> fields;
  std::string cell;
  bool quoted = false;
  std::string text = std::move(first_line);
  std::size_t i = 0;
  for (;;) {
    if (i == text.size()) {
      if (!quoted) break;
      std::string next;
      if (!std::getline(in, next))
        throw InputError(loc(origin, line) + ": unterminated quoted field");
      ++line;
      if (!next.empty() && next.back() == '\r') next.pop_back();
      cell.push_back('\n');
      text = std::move(next);
      i = 0;
      continue;
    }
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
    ++i;
  }
  fields.push_back(std::move(cell));
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  if (begin == end) return false;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Table parse_csv(std::istream& in, const std::string& origin) {
  Table table;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (!have_header && (raw.empty() || raw[0] == '#')) continue;  // preamble
    auto fields = split_record(in, std::move(raw), origin, line);
    if (!have_header) {
      table.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.columns.size())
      throw InputError(loc(origin, line) + ": expected " +
                       std::to_string(table.columns.size()) +
                       " fields, got " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw InputError(origin + ": empty file, no header");
  return table;
}

Table parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  return parse_csv(in, path);
}

void write_csv(const Table& table, std::ostream& out) {
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << (needs_quoting(row[i]) ? quote(row[i]) : row[i]);
    }
    out << '\n';
  };
  emit_row(table.columns);
  for (const auto& row : table.rows) emit_row(row);
}

LoadedDataset expand_table(const Table& table, const std::string& origin) {
  if (table.columns.size() < 2 || table.columns[0] != "source" ||
      table.columns[1] != "outcome")
    throw InputError(origin +
                     ": header must start with columns 'source,outcome'");

  const std::size_t n_cov = table.columns.size() - 2;
  const std::size_t n = table.rows.size();

  // A covariate column is numeric iff every cell parses as a double.
  std::vector<bool> numeric(n_cov, true);
  for (std::size_t j = 0; j < n_cov; ++j)
    for (const auto& row : table.rows) {
      double unused;
      if (!parse_double(row[j + 2], unused)) {
        numeric[j] = false;
        break;
      }
    }

  // Alphabetical levels, first one dropped as the reference.
  std::vector<std::vector<std::string>> kept_levels(n_cov);
  LoadedDataset out;
  for (std::size_t j = 0; j < n_cov; ++j) {
    if (numeric[j]) {
      out.covariate_names.push_back(table.columns[j + 2]);
      continue;
    }
    std::set<std::string> levels;
    for (const auto& row : table.rows) levels.insert(row[j + 2]);
    if (levels.size() < 2)
      throw InputError(origin + ": column '" + table.columns[j + 2] +
                       "' has a single level; nothing to encode");
    auto it = levels.begin();
    for (++it; it != levels.end(); ++it) {
      kept_levels[j].push_back(*it);
      out.covariate_names.push_back(table.columns[j + 2] + "=" + *it);
    }
  }

  const int k = static_cast<int>(out.covariate_names.size());
  std::vector<PatientRecord> records;
  records.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;  // header is line 1
    PatientRecord rec;

    if (row[0] == "trial") rec.in_trial = true;
    else if (row[0] == "external") rec.in_trial = false;
    else
      throw InputError(loc(origin, line) + ": column 'source': expected "
                       "'trial' or 'external', got '" + row[0] + "'");

    if (row[1] == "0") rec.outcome = 0;
    else if (row[1] == "1") rec.outcome = 1;
    else
      throw InputError(loc(origin, line) +
                       ": column 'outcome': expected 0 or 1, got '" + row[1] +
                       "'");

    rec.covariates.reserve(k);
    for (std::size_t j = 0; j < n_cov; ++j) {
      if (numeric[j]) {
        double v;
        parse_double(row[j + 2], v);
        if (!std::isfinite(v))
          throw InputError(loc(origin, line) + ": column '" +
                           table.columns[j + 2] + "': non-finite value");
        rec.covariates.push_back(v);
      } else {
        for (const auto& level : kept_levels[j])
          rec.covariates.push_back(row[j + 2] == level ? 1.0 : 0.0);
      }
    }
    records.push_back(std::move(rec));
  }

  try {
    out.dataset = Dataset::create(std::move(records), k);
  } catch (const InputError& e) {
    throw InputError(origin + ": " + e.what());
  }
  return out;
}

LoadedDataset read_dataset(const std::string& path) {
  return expand_table(parse_csv_file(path), path);
}

void write_dataset(const Dataset& data,
                   const std::vector<std::string>& covariate_names,
                   std::ostream& out) {
  if (covariate_names.size() != static_cast<std::size_t>(data.k))
    throw InputError("write_dataset: covariate name count mismatch");
  Table table;
  table.columns.push_back("source");
  table.columns.push_back("outcome");
  for (const auto& name : covariate_names) table.columns.push_back(name);
  for (const auto& r : data.records) {
    std::vector<std::string> row;
    row.push_back(r.in_trial ? "trial" : "external");
    row.push_back(r.outcome ? "1" : "0");
    for (double c : r.covariates) row.push_back(format_double(c));
    table.rows.push_back(std::move(row));
  }
  write_csv(table, out);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw InputError(tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw InputError(path + ": atomic rename failed: " + ec.message());
}

}  // namespace propp
