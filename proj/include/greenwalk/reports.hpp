#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "greenwalk/config.hpp"

namespace greenwalk {

/// Wraps a command payload in the stable report envelope (tool name, schema
/// version, command, config echo, findings list). No timestamps here: the
/// payload must be a pure function of the config so reruns byte-match.
nlohmann::json make_envelope(const std::string& command, const RunConfig& cfg,
                             nlohmann::json payload,
                             std::vector<std::string> findings = {});

void write_text_file(const std::string& path, const std::string& text);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// RFC-4180-ish rendering (quotes only where needed), one trailing newline.
std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Canonical number formatting for CSV cells (shortest round-trip form, so
/// identical runs produce identical bytes).
std::string csv_number(double v);

} // namespace greenwalk
