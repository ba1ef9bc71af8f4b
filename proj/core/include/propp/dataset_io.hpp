#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "propp/types.hpp"

namespace propp {

// A parsed CSV: header plus string cells, no typing applied yet.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180-style reader: quoted fields, doubled quotes, CRLF tolerated.
// Lines starting with '#' before the header are skipped (tool outputs
// record their seed there).  Errors cite `origin` and the line number.
Table parse_csv(std::istream& in, const std::string& origin);
Table parse_csv_file(const std::string& path);

void write_csv(const Table& table, std::ostream& out);

// A Dataset plus the names of its (expanded) covariate columns.
struct LoadedDataset {
  Dataset dataset;
  std::vector<std::string> covariate_names;
};

// Types a raw table into a Dataset.  The first two columns must be
// `source` (trial/external) and `outcome` (0/1).  Each remaining column is
// numeric if every cell parses as a double, otherwise categorical and
// one-hot expanded with alphabetically sorted levels, first level dropped;
// expanded columns are named "<column>=<level>".
LoadedDataset expand_table(const Table& table, const std::string& origin);

LoadedDataset read_dataset(const std::string& path);

// Writes a numeric dataset in the same schema, %.17g so values round-trip.
void write_dataset(const Dataset& data,
                   const std::vector<std::string>& covariate_names,
                   std::ostream& out);

// Writes `content` through a temp file + rename so readers never observe a
// partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace propp
