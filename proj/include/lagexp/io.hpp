#pragma once

// Plain-text persistence of profiles and tables. Numbers are written with 17 significant
// digits so that every artifact round-trips exactly.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagexp/profile.hpp"

namespace lagexp {

std::string format_double(double x);

/// Writes to a temporary sibling and renames it over `path`. Throws IoError.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Throws IoError if the file is missing or unreadable.
std::string read_text(const std::filesystem::path& path);

/// CSV with the given header and numeric rows.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

/// Parses a numeric CSV whose header must equal `header`. Errors name the line and field.
std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           const std::vector<std::string>& header,
                                           const std::string& source = "<input>");

/// Profile CSV with header s,r,phi,psi.
std::string profile_to_csv(const ProfileCurve& curve);
ProfileCurve profile_from_csv(const std::string& text, const std::string& source = "<input>");
ProfileCurve read_profile(const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline (keys are sorted, so output is deterministic).
std::string dump_json(const nlohmann::json& j);

/// Throws IoError with the parser's position on malformed input.
nlohmann::json parse_json(const std::string& text, const std::string& source = "<input>");

}  // namespace lagexp
