#include "gfkchain/cli/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gfkchain::cli {
namespace fs = std::filesystem;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from " + path.string() + " failed");
  return ss.str();
}

std::string results_csv(const chain::ChainExperimentResult& result) {
  std::string s = std::string(kResultsHeader) + "\n";
  for (const auto& r : result.trials) {
    const double nan = std::nan("");
    s += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
         std::string(chain::to_string(r.kernel)) + "," + std::to_string(r.n_intermediates) + "," +
         format_number(r.failed ? nan : r.direct_accuracy) + "," +
         format_number(r.failed ? nan : r.chain_accuracy) + "," + (r.collapsed ? "1" : "0") + "\n";
  }
  return s;
}

std::string summary_csv(const chain::ChainExperimentResult& result) {
  std::vector<int> ks;
  std::vector<chain::KernelKind> kernels;
  for (const auto& c : result.cells) {
    if (std::find(ks.begin(), ks.end(), c.n_intermediates) == ks.end()) ks.push_back(c.n_intermediates);
    if (std::find(kernels.begin(), kernels.end(), c.kernel) == kernels.end()) kernels.push_back(c.kernel);
  }
  std::sort(ks.begin(), ks.end());
  std::string s = "kernel";
  for (int k : ks) s += k == 0 ? std::string(",direct") : "," + std::to_string(k) + "IS";
  s += "\n";
  for (auto kernel : kernels) {
    s += std::string(chain::to_string(kernel));
    for (int k : ks) {
      const auto* c = result.cell(kernel, k);
      s += "," + format_number(c != nullptr && c->n_trials > 0 ? c->mean_chain : std::nan(""));
    }
    s += "\n";
  }
  return s;
}

std::string cells_csv(const chain::ChainExperimentResult& result) {
  std::string s =
      "kernel,n_intermediates,n_trials,n_failed,n_collapsed,mean_direct,mean_chain,"
      "fraction_chain_beats,fraction_chain_at_least\n";
  for (const auto& c : result.cells) {
    s += std::string(chain::to_string(c.kernel)) + "," + std::to_string(c.n_intermediates) + "," +
         std::to_string(c.n_trials) + "," + std::to_string(c.n_failed) + "," +
         std::to_string(c.n_collapsed) + "," + format_number(c.mean_direct) + "," +
         format_number(c.mean_chain) + "," + format_number(c.fraction_chain_beats) + "," +
         format_number(c.fraction_chain_at_least) + "\n";
  }
  return s;
}

std::string comparisons_csv(const chain::ChainExperimentResult& result) {
  std::string s = "n_intermediates,n_trials,gfk_minus_linear,fraction_gfk_beats,fraction_gfk_at_least\n";
  for (const auto& c : result.comparisons) {
    s += std::to_string(c.n_intermediates) + "," + std::to_string(c.n_trials) + "," +
         format_number(c.mean_difference) + "," + format_number(c.fraction_gfk_beats) + "," +
         format_number(c.fraction_gfk_at_least) + "\n";
  }
  return s;
}

std::string failures_csv(const chain::ChainExperimentResult& result) {
  std::string s = "trial,kernel,n_intermediates,error\n";
  for (const auto& r : result.trials) {
    if (!r.failed) continue;
    std::string msg = r.error;
    for (char& ch : msg) {
      if (ch == '"' || ch == '\n' || ch == '\r') ch = '\'';
    }
    s += std::to_string(r.trial) + "," + std::string(chain::to_string(r.kernel)) + "," +
         std::to_string(r.n_intermediates) + ",\"" + msg + "\"\n";
  }
  return s;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_field(const std::string& field, const char* name, int line_no) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw UserError("malformed results CSV at line " + std::to_string(line_no) + ": bad " + name +
                    " '" + field + "'");
  }
  return value;
}

}  // namespace

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kResultsHeader) {
        throw UserError("malformed results CSV at line " + std::to_string(line_no) +
                        ": expected header '" + kResultsHeader + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) {
      throw UserError("malformed results CSV at line " + std::to_string(line_no) + ": expected 7 fields, got " +
                      std::to_string(f.size()));
    }
    ResultRow r;
    r.trial = parse_field<int>(f[0], "trial", line_no);
    r.seed = parse_field<std::uint64_t>(f[1], "seed", line_no);
    r.kernel = f[2];
    if (r.kernel != "linear" && r.kernel != "gfk") {
      throw UserError("malformed results CSV at line " + std::to_string(line_no) + ": unknown kernel '" +
                      r.kernel + "', expected one of {linear, gfk}");
    }
    r.n_intermediates = parse_field<int>(f[3], "n_intermediates", line_no);
    r.direct_acc = parse_field<double>(f[4], "direct_acc", line_no);
    r.chain_acc = parse_field<double>(f[5], "chain_acc", line_no);
    for (double acc : {r.direct_acc, r.chain_acc}) {
      if (!std::isnan(acc) && (acc < 0.0 || acc > 1.0)) {
        throw UserError("malformed results CSV at line " + std::to_string(line_no) +
                        ": accuracy outside [0, 1]");
      }
    }
    if (f[6] != "0" && f[6] != "1") {
      throw UserError("malformed results CSV at line " + std::to_string(line_no) + ": bad collapsed '" +
                      f[6] + "'");
    }
    r.collapsed = f[6] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json load_manifest(const fs::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw UserError(std::string("cannot read manifest: ") + e.what());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UserError("malformed manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("artifact", "") != "gfkchain" || !doc.contains("config") ||
      !doc.contains("command")) {
    throw UserError(path.string() + " is not a gfkchain manifest");
  }
  return doc;
}

}  // namespace gfkchain::cli
