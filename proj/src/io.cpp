#include "segsites/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "segsites/version.hpp"

namespace segsites::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < table.header.size() && i < row.size(); ++i) {
      obj[table.header[i]] = row[i];
    }
    rows.push_back(obj);
  }
  return rows.dump(2) + "\n";
}

RunManifest make_manifest(
    const std::string& command,
    std::vector<std::pair<std::string, std::string>> parameters) {
  RunManifest m;
  m.command = command;
  m.parameters = std::move(parameters);
  m.version = kVersion;
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                utc.tm_min, utc.tm_sec);
  m.timestamp = buf;
  return m;
}

std::string to_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  nlohmann::ordered_json params;
  for (const auto& [key, value] : manifest.parameters) params[key] = value;
  j["parameters"] = params;
  j["version"] = manifest.version;
  j["timestamp"] = manifest.timestamp;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw io_error("cannot open '" + path + "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw io_error("write failed for '" + path + "'");
  }
}

}  // namespace segsites::io
