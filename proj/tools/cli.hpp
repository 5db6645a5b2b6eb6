#pragma once

// Subcommands of the lagexp tool. Each command reads a resolved JSON config (defaults, then
// the --config file, then flags), writes its artifacts under config["out"] and returns the
// exit status: 0 pass, 2 solver or domain failure or a failed check, 3 I/O failure.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lagexp::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitIo = 3;

/// Radians, with `pi` literals: "1.2", "pi", "-pi/2", "2pi/3", "2*pi/3", "0.5*pi".
/// Throws DomainError.
double parse_angle(std::string_view text);
/// Comma-separated angles.
std::vector<double> parse_angles(std::string_view text);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

enum class Kind { Number, Integer, Text, Angles, Integers };

struct OptionSpec {
  std::string key;  ///< JSON key; the flag is --key with '_' replaced by '-'
  Kind kind;
  nlohmann::json fallback;  ///< null means required
  std::string help;
  bool positive = false;  ///< numbers must be > 0
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  int (*run)(const nlohmann::json& config);
};

const std::vector<CommandSpec>& commands();

std::string flag_name(const std::string& key);

/// Converts a config-file value or a flag string to the option's type. Throws DomainError.
nlohmann::json convert(const OptionSpec& option, const nlohmann::json& value);

/// Defaults, overridden by `file` (a JSON object), overridden by `flags` (raw strings of the
/// flags given on the command line). Unknown keys in `file`, missing required options and
/// nonpositive values of positive options throw DomainError.
nlohmann::json resolve(const CommandSpec& command, const nlohmann::json& file,
                       const std::map<std::string, std::string>& flags);

/// Runs the command and maps exceptions to exit codes (message on stderr).
int execute(const CommandSpec& command, const nlohmann::json& config);

}  // namespace lagexp::cli
