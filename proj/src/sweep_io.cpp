#include "cqed/sweep_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cqed/errors.hpp"

namespace cqed {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double parse_double(const std::string& s, int line) {
  if (s == "NaN" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "Inf") return std::numeric_limits<double>::infinity();
  if (s == "-Inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError("", line, "not a number: '" + s + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void write_file_atomic(const std::string& path, std::string_view text) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("output directory does not exist: " + dir.string());
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place: " + path);
  }
}

std::string format_sweep_csv(const SweepResult& r) {
  if (r.values.size() != r.cell_count() || r.errors.size() != r.cell_count())
    throw DimensionError("sweep result does not cover the axis grid");
  std::string out;
  bool first = true;
  auto field = [&](const std::string& f) {
    if (!first) out += ',';
    out += quote(f);
    first = false;
  };
  for (const auto& a : r.axes) field(a.name);
  for (const auto& c : r.columns) field(c);
  field("error");
  out += "\r\n";
  for (std::size_t cell = 0; cell < r.cell_count(); ++cell) {
    first = true;
    for (double x : r.coordinates(cell)) field(format_double(x));
    if (r.values[cell].size() != r.columns.size()) throw DimensionError("row width does not match the column count");
    for (double v : r.values[cell]) field(format_double(v));
    field(r.errors[cell]);
    out += "\r\n";
  }
  return out;
}

void write_sweep_csv(const SweepResult& r, const std::string& path) { write_file_atomic(path, format_sweep_csv(r)); }

std::string sidecar_path(const std::string& csv_path) {
  fs::path p(csv_path);
  if (p.extension() == ".csv") p.replace_extension();
  return p.string() + ".meta.json";
}

nlohmann::json sweep_sidecar(const SweepResult& r, const nlohmann::json& manifest) {
  nlohmann::json j = r.metadata;
  j["experiment"] = r.experiment;
  j["axes"] = nlohmann::json::array();
  for (const auto& a : r.axes) j["axes"].push_back({{"name", a.name}, {"count", a.values.size()}});
  j["columns"] = r.columns;
  j["manifest"] = manifest;
  return j;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string f;
  bool quoted = false, field_started = false;
  int line = 1;
  auto end_field = [&] {
    row.push_back(std::move(f));
    f.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          f += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        f += c;
      }
      continue;
    }
    if (c == '"') {
      if (field_started || !f.empty()) throw ParseError("", line, "quote inside an unquoted field");
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      f += c;
    }
  }
  if (quoted) throw ParseError("", line, "unterminated quoted field");
  if (!f.empty() || !row.empty() || field_started) end_row();
  return rows;
}

SweepResult parse_sweep_csv(std::string_view text, int axis_count) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ParseError("", 1, "empty CSV");
  const auto& header = rows.front();
  if (header.empty() || header.back() != "error") throw ParseError("", 1, "last column must be 'error'");
  const int width = static_cast<int>(header.size());
  if (axis_count < 1 || axis_count > width - 1) throw ParseError("", 1, "invalid axis column count");

  SweepResult r;
  r.axes.resize(static_cast<std::size_t>(axis_count));
  for (int k = 0; k < axis_count; ++k) r.axes[k].name = header[k];
  r.columns.assign(header.begin() + axis_count, header.end() - 1);

  std::vector<std::vector<double>> coords;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (static_cast<int>(rows[i].size()) != width) throw ParseError("", line, "row has the wrong number of fields");
    std::vector<double> c;
    for (int k = 0; k < axis_count; ++k) c.push_back(parse_double(rows[i][k], line));
    std::vector<double> v;
    for (int k = axis_count; k < width - 1; ++k) v.push_back(parse_double(rows[i][k], line));
    coords.push_back(std::move(c));
    r.values.push_back(std::move(v));
    r.errors.push_back(rows[i].back());
  }

  // recover the axes from the row-major ordering: the last axis varies fastest
  std::size_t stride = 1;
  for (int k = axis_count; k-- > 0;) {
    auto& vals = r.axes[k].values;
    for (std::size_t i = 0; i < coords.size(); i += stride) {
      if (!vals.empty() && coords[i][k] == vals.front()) break;
      vals.push_back(coords[i][k]);
    }
    stride *= std::max<std::size_t>(vals.size(), 1);
  }
  if (r.cell_count() != coords.size()) throw ParseError("", 0, "rows do not form a full axis grid");
  for (std::size_t cell = 0; cell < coords.size(); ++cell) {
    const auto expect = r.coordinates(cell);
    for (int k = 0; k < axis_count; ++k) {
      const bool same = expect[k] == coords[cell][k] || (std::isnan(expect[k]) && std::isnan(coords[cell][k]));
      if (!same) throw ParseError("", static_cast<int>(cell) + 2, "rows do not follow the axis grid order");
    }
  }
  return r;
}

SweepResult read_sweep_csv(const std::string& path, int axis_count) {
  nlohmann::json meta;
  const std::string side = sidecar_path(path);
  if (fs::exists(side)) {
    try {
      meta = nlohmann::json::parse(read_file(side));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(side, 0, e.what());
    }
    if (axis_count < 0 && meta.contains("axes")) axis_count = static_cast<int>(meta.at("axes").size());
  }
  if (axis_count < 0) throw ParseError(path, 0, "axis count unknown and no sidecar found");
  SweepResult r = parse_sweep_csv(read_file(path), axis_count);
  if (!meta.is_null()) {
    r.experiment = meta.value("experiment", "");
    r.metadata = std::move(meta);
  }
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace cqed
