#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace segsites::io {

// File-system failure (distinct exit code in the CLI); message includes the
// path.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Shortest decimal string that round-trips to the same double (std::to_chars
// shortest form). Both CSV and JSON use it so re-parsing an output file
// reconstructs the computed values bit for bit.
std::string format_double(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Header line, then one comma-joined line per row. Cells are plain numbers
// or bare identifiers; no quoting is needed or performed.
std::string to_csv(const Table& table);

// The same content as an array of {column: cell} objects.
std::string to_json(const Table& table);

// Written alongside every file output (<out>.manifest.json) and to stderr
// when results go to stdout. Re-running the recorded command reproduces the
// output byte for byte for deterministic commands; the manifest itself
// carries the (non-deterministic) timestamp.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string version;
  std::string timestamp;  // UTC, e.g. 2026-08-25T12:00:00Z
};

RunManifest make_manifest(
    const std::string& command,
    std::vector<std::pair<std::string, std::string>> parameters);

std::string to_json(const RunManifest& manifest);

// Throws io_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace segsites::io
