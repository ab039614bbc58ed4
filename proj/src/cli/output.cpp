#include "output.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pppks::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::vector<std::size_t> histogram_counts(std::span<const double> values, std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) continue;
    auto b = static_cast<std::size_t>(v * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  return counts;
}

std::string svg_histogram(std::span<const double> values, const std::string& title, std::size_t bins) {
  const auto counts = histogram_counts(values, bins);
  std::size_t peak = 1;
  for (auto c : counts) peak = std::max(peak, c);

  const double width = 480, height = 320, left = 50, right = 20, top = 40, bottom = 40;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const double bar_w = plot_w / static_cast<double>(bins);

  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  };

  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << std::fixed << std::setprecision(2);
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double h = plot_h * static_cast<double>(counts[b]) / static_cast<double>(peak);
    o << "<rect class=\"bin\" x=\"" << left + bar_w * static_cast<double>(b) << "\" y=\"" << top + plot_h - h
      << "\" width=\"" << bar_w << "\" height=\"" << h << "\" fill=\"steelblue\" stroke=\"white\" data-count=\""
      << counts[b] << "\"/>\n";
  }
  // Height of a bin under an exactly uniform sample.
  const double uniform_h = plot_h * (static_cast<double>(values.size()) / static_cast<double>(bins)) /
                           static_cast<double>(peak);
  o << "<line x1=\"" << left << "\" y1=\"" << top + plot_h - uniform_h << "\" x2=\"" << left + plot_w << "\" y2=\""
    << top + plot_h - uniform_h << "\" stroke=\"darkred\" stroke-dasharray=\"4 3\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = left + plot_w * t / 4.0;
    o << "<text x=\"" << x << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << t / 4.0 << "</text>\n";
  }
  o << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
    << "font-size=\"11\">" << peak << "</text>\n"
    << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 6
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">ppp</text>\n"
    << "</svg>\n";
  return o.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string config_digest(const nlohmann::json& resolved) { return "sha256:" + sha256_hex(resolved.dump()); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& contents) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  files_.push_back(name);
}

void OutputDir::write_manifest(const std::string& command, const nlohmann::json& resolved_config,
                               const std::string& started_at, unsigned workers) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : files_) {
    std::ifstream in(dir_ / f, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files.push_back({{"name", f}, {"sha256", sha256_hex(buf.str())}});
  }
  const nlohmann::json manifest = {{"tool", "pppks"},
                                   {"tool_version", kToolVersion},
                                   {"command", command},
                                   {"config_digest", config_digest(resolved_config)},
                                   {"resolved_config", resolved_config},
                                   {"started_at", started_at},
                                   {"finished_at", utc_timestamp()},
                                   {"workers", workers},
                                   {"files", files}};
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace pppks::cli
