#include "lagexp/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lagexp/errors.hpp"

namespace lagexp {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from " + path.string() + " failed");
  return ss.str();
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           const std::vector<std::string>& header,
                                           const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError(source + ": empty file");
  const auto got = split(line);
  if (got != header) {
    std::string want;
    for (std::size_t j = 0; j < header.size(); ++j) want += (j ? "," : "") + header[j];
    throw IoError(source + ":1: expected header '" + want + "'");
  }
  std::vector<std::vector<double>> rows;
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw IoError(source + ":" + std::to_string(lineNo) + ": expected " +
                    std::to_string(header.size()) + " fields, found " +
                    std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const char* b = fields[j].c_str();
      char* e = nullptr;
      errno = 0;
      const double v = std::strtod(b, &e);
      if (e == b || *e != '\0' || errno == ERANGE) {
        throw IoError(source + ":" + std::to_string(lineNo) + ": field '" + header[j] +
                      "' is not a number: '" + fields[j] + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string profile_to_csv(const ProfileCurve& curve) {
  std::vector<std::vector<double>> rows;
  rows.reserve(curve.size());
  for (const auto& p : curve.samples()) rows.push_back({p.s, p.r, p.phi, p.psi});
  return to_csv({"s", "r", "phi", "psi"}, rows);
}

ProfileCurve profile_from_csv(const std::string& text, const std::string& source) {
  const auto rows = parse_csv(text, {"s", "r", "phi", "psi"}, source);
  std::vector<ProfileSample> samples;
  samples.reserve(rows.size());
  for (const auto& r : rows) samples.push_back({r[0], r[1], r[2], r[3]});
  try {
    return ProfileCurve(std::move(samples));
  } catch (const DomainError& e) {
    throw IoError(source + ": not a valid profile: " + e.what());
  }
}

ProfileCurve read_profile(const fs::path& path) {
  return profile_from_csv(read_text(path), path.string());
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json parse_json(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(source + ": " + e.what());
  }
}

}  // namespace lagexp
