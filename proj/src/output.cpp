#include "hypoflow/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hypoflow/errors.hpp"

namespace hypoflow {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw NumericError("sha256: cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw NumericError("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

OutputSink::OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputSink::record(const std::string& name, const std::string& kind, const std::string& bytes) {
  const auto path = dir_ / name;
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }
  for (auto& f : files_)
    if (f.name == name) {
      f = {name, kind, sha256_hex(bytes), bytes.size()};
      return;
    }
  files_.push_back({name, kind, sha256_hex(bytes), bytes.size()});
}

void OutputSink::write_csv(const std::string& name, const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::logic_error("csv row width does not match header in " + name);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ",";
      s += format_double(r[i]);
    }
    s += "\n";
  }
  record(name, "csv", s);
}

void OutputSink::write_table(const std::string& name, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::logic_error("csv row width does not match header in " + name);
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += "\n";
  }
  record(name, "csv", s);
}

void OutputSink::write_json(const std::string& name, const nlohmann::ordered_json& value) {
  record(name, "json", value.dump(2) + "\n");
}

void OutputSink::write_text(const std::string& name, const std::string& content, const std::string& kind) {
  record(name, kind, content);
}

void OutputSink::write_plot(const std::string& name, const PlotSpec& spec) {
  std::ostringstream os;
  const std::string png = std::filesystem::path(name).replace_extension(".png").string();
  os << "set terminal pngcairo size 960,640\n";
  os << "set output '" << png << "'\n";
  os << "set datafile separator ','\n";
  os << "set key autotitle columnhead\n";
  os << "set title '" << spec.title << "'\n";
  os << "set grid\n";
  if (spec.log_x) os << "set logscale x\n";
  if (spec.log_y) os << "set logscale y\n";
  os << "plot ";
  bool first = true;
  for (std::size_t k = 0; k < spec.y_columns.size(); ++k) {
    os << (first ? "" : ", \\\n     ") << "'" << spec.csv << "' using " << spec.x_column << ":" << spec.y_columns[k]
       << " with lines lw 2";
    if (k < spec.y_titles.size()) os << " title '" << spec.y_titles[k] << "'";
    first = false;
  }
  for (const auto& o : spec.overlays) {
    os << (first ? "" : ", \\\n     ") << o.expression << " with lines dt 2 lw 2 title '" << o.title << "'";
    first = false;
  }
  os << "\n";
  record(name, "gnuplot", os.str());
}

}  // namespace hypoflow
