#include "greenwalk/reports.hpp"

#include <charconv>
#include <fstream>

#include "greenwalk/errors.hpp"

namespace greenwalk {

nlohmann::json make_envelope(const std::string& command, const RunConfig& cfg,
                             nlohmann::json payload, std::vector<std::string> findings) {
  nlohmann::json env;
  env["tool"] = "greenwalk";
  env["schema"] = 1;
  env["command"] = command;
  env["config"] = cfg.to_json();
  env["findings"] = findings;
  env["payload"] = std::move(payload);
  return env;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ResourceError("short write to '" + path + "'");
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  auto append_row = [&text](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      // cells are numbers or identifiers; quote anything that could clash
      const bool needs_quote = row[i].find_first_of(",\"\n") != std::string::npos;
      if (needs_quote) {
        text += '"';
        for (char c : row[i]) {
          if (c == '"') text += '"';
          text += c;
        }
        text += '"';
      } else {
        text += row[i];
      }
    }
    text += '\n';
  };
  append_row(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("CSV row width does not match the header");
    append_row(row);
  }
  return text;
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  write_text_file(path, csv_text(header, rows));
}

std::string csv_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

} // namespace greenwalk
