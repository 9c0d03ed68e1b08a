#include "gfkchain/cli/config.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "gfkchain/cli/io.hpp"
#include "gfkchain/errors.hpp"

namespace gfkchain::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw UserError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UserError(std::string("config key '") + key + "': " + e.what());
  }
}

sim::StiffnessSchedule parse_schedule(const std::string& name) {
  if (name == "linear") return sim::StiffnessSchedule::linear;
  if (name == "log") return sim::StiffnessSchedule::log;
  throw UserError("unknown stiffness_schedule '" + name + "', expected one of {linear, log}");
}

const char* schedule_name(sim::StiffnessSchedule s) {
  return s == sim::StiffnessSchedule::linear ? "linear" : "log";
}

std::vector<chain::KernelKind> parse_kernels(const json& value) {
  std::vector<std::string> names;
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "both") {
      names = {"linear", "gfk"};
    } else {
      names = {s};
    }
  } else if (value.is_array()) {
    for (const auto& v : value) {
      if (!v.is_string()) throw UserError("config key 'kernels' must hold strings");
      names.push_back(v.get<std::string>());
    }
  } else {
    throw UserError("config key 'kernels' must be a string or an array of strings");
  }
  std::vector<chain::KernelKind> out;
  for (const auto& n : names) {
    try {
      const auto k = chain::parse_kernel(n);
      if (std::find(out.begin(), out.end(), k) != out.end()) {
        throw UserError("kernel '" + n + "' listed twice");
      }
      out.push_back(k);
    } catch (const DomainError& e) {
      throw UserError(e.what());
    }
  }
  return out;
}

}  // namespace

chain::ChainConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw UserError("config must be a JSON object");
  reject_unknown(doc,
                 {"n_structures", "intermediate_counts", "kernels", "labeled_normal_fraction",
                  "noise_coeff", "damage", "stiffness_schedule", "n_reps", "n_modes",
                  "n_elements", "svm_c", "variance_threshold", "n_trials", "base_seed", "threads"},
                 "");
  chain::ChainConfig c;
  read(doc, "n_structures", c.n_structures);
  read(doc, "intermediate_counts", c.intermediate_counts);
  if (doc.contains("kernels")) c.kernels = parse_kernels(doc.at("kernels"));
  read(doc, "labeled_normal_fraction", c.labeled_normal_fraction);
  read(doc, "noise_coeff", c.noise_coeff);
  if (doc.contains("damage")) {
    const auto& d = doc.at("damage");
    if (!d.is_object()) throw UserError("config key 'damage' must be an object");
    reject_unknown(d, {"region_fraction", "stiffness_reduction"}, "damage.");
    read(d, "region_fraction", c.damage.region_fraction);
    read(d, "stiffness_reduction", c.damage.stiffness_reduction);
  }
  if (doc.contains("stiffness_schedule")) {
    std::string s;
    read(doc, "stiffness_schedule", s);
    c.schedule = parse_schedule(s);
  }
  read(doc, "n_reps", c.n_reps);
  read(doc, "n_modes", c.n_modes);
  read(doc, "n_elements", c.n_elements);
  read(doc, "svm_c", c.svm_c);
  read(doc, "variance_threshold", c.variance_threshold);
  read(doc, "n_trials", c.n_trials);
  read(doc, "base_seed", c.base_seed);
  read(doc, "threads", c.threads);
  return c;
}

json config_to_json(const chain::ChainConfig& c) {
  json kernels = json::array();
  for (auto k : c.kernels) kernels.push_back(std::string(chain::to_string(k)));
  return json{
      {"n_structures", c.n_structures},
      {"intermediate_counts", c.intermediate_counts},
      {"kernels", kernels},
      {"labeled_normal_fraction", c.labeled_normal_fraction},
      {"noise_coeff", c.noise_coeff},
      {"damage",
       {{"region_fraction", c.damage.region_fraction},
        {"stiffness_reduction", c.damage.stiffness_reduction}}},
      {"stiffness_schedule", schedule_name(c.schedule)},
      {"n_reps", c.n_reps},
      {"n_modes", c.n_modes},
      {"n_elements", c.n_elements},
      {"svm_c", c.svm_c},
      {"variance_threshold", c.variance_threshold},
      {"n_trials", c.n_trials},
      {"base_seed", c.base_seed},
      {"threads", c.threads},
  };
}

chain::ChainConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw UserError(std::string("cannot read config: ") + e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UserError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace gfkchain::cli
