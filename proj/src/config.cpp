#include "edg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace edg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void check_keys(const json& obj, const std::string& prefix,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) fail("unknown config key: " + prefix + key);
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail("config key " + path + ": expected a number");
  return j.get<double>();
}

std::size_t as_size(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail("config key " + path + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail("config key " + path + ": expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail("config key " + path + ": expected a string");
  return j.get<std::string>();
}

KernelFamily parse_kernel_family(const std::string& s) {
  if (s == "product_power") return KernelFamily::product_power;
  if (s == "sum_power") return KernelFamily::sum_power;
  if (s == "homogeneous_eta") return KernelFamily::homogeneous_eta;
  if (s == "tabulated") return KernelFamily::tabulated;
  if (s == "separable_custom") return KernelFamily::separable_custom;
  fail("config key kernel.family: unknown family '" + s + "'");
}

InitFamily parse_init_family(const std::string& s) {
  if (s == "monodisperse") return InitFamily::monodisperse;
  if (s == "delta_at") return InitFamily::delta_at;
  if (s == "geometric") return InitFamily::geometric;
  if (s == "custom") return InitFamily::custom;
  fail("config key init.family: unknown family '" + s + "'");
}

void parse_kernel(const json& j, const std::filesystem::path& base_dir, KernelSpec& out) {
  check_keys(j, "kernel.",
             {"family", "C", "mu", "nu", "eta", "beta", "C1", "zero_receiver_row",
              "table_path"});
  if (!j.contains("family")) fail("missing required config key: kernel.family");
  out.family = parse_kernel_family(as_string(j.at("family"), "kernel.family"));
  if (j.contains("C")) out.C = as_number(j.at("C"), "kernel.C");
  if (j.contains("mu")) out.mu = as_number(j.at("mu"), "kernel.mu");
  if (j.contains("nu")) out.nu = as_number(j.at("nu"), "kernel.nu");
  if (j.contains("eta")) out.eta = as_number(j.at("eta"), "kernel.eta");
  if (j.contains("beta")) out.beta = as_number(j.at("beta"), "kernel.beta");
  if (j.contains("C1")) out.C1 = as_number(j.at("C1"), "kernel.C1");
  if (j.contains("zero_receiver_row"))
    out.zero_receiver_row = as_bool(j.at("zero_receiver_row"), "kernel.zero_receiver_row");

  // Exactly the family-relevant parameters are required; others are ignored.
  switch (out.family) {
    case KernelFamily::product_power:
      if (!j.contains("mu")) fail("kernel.family=product_power requires kernel.mu");
      if (!j.contains("nu")) fail("kernel.family=product_power requires kernel.nu");
      break;
    case KernelFamily::sum_power:
      if (!j.contains("beta")) fail("kernel.family=sum_power requires kernel.beta");
      break;
    case KernelFamily::homogeneous_eta:
      if (!j.contains("eta")) fail("kernel.family=homogeneous_eta requires kernel.eta");
      break;
    case KernelFamily::tabulated: {
      if (!j.contains("table_path")) fail("kernel.family=tabulated requires kernel.table_path");
      std::filesystem::path p = as_string(j.at("table_path"), "kernel.table_path");
      if (p.is_relative()) p = base_dir / p;
      out.table = load_table_csv(p);
      break;
    }
    case KernelFamily::separable_custom:
      fail("kernel.family=separable_custom is not expressible in a config file");
  }
}

void parse_init(const json& j, InitSpec& out) {
  check_keys(j, "init.", {"family", "mass_at_one", "s", "q", "values"});
  if (!j.contains("family")) fail("missing required config key: init.family");
  out.family = parse_init_family(as_string(j.at("family"), "init.family"));
  if (j.contains("mass_at_one"))
    out.mass_at_one = as_number(j.at("mass_at_one"), "init.mass_at_one");
  if (j.contains("s")) out.s = as_size(j.at("s"), "init.s");
  if (j.contains("q")) out.q = as_number(j.at("q"), "init.q");
  if (j.contains("values")) {
    const json& v = j.at("values");
    if (!v.is_array()) fail("config key init.values: expected an array");
    for (std::size_t i = 0; i < v.size(); ++i)
      out.values.push_back(as_number(v.at(i), "init.values[" + std::to_string(i) + "]"));
  }
  if (out.family == InitFamily::custom && !j.contains("values"))
    fail("init.family=custom requires init.values");
}

void parse_integrator(const json& j, IntegratorConfig& out) {
  check_keys(j, "integrator.",
             {"rel_tol", "abs_tol", "dt_init", "dt_min", "dt_max", "neg_clip",
              "blowup_moment_order", "blowup_threshold", "t_end", "record_every"});
  if (!j.contains("t_end")) fail("missing required config key: integrator.t_end");
  out.t_end = as_number(j.at("t_end"), "integrator.t_end");
  if (j.contains("rel_tol")) out.rel_tol = as_number(j.at("rel_tol"), "integrator.rel_tol");
  if (j.contains("abs_tol")) out.abs_tol = as_number(j.at("abs_tol"), "integrator.abs_tol");
  if (j.contains("dt_init")) out.dt_init = as_number(j.at("dt_init"), "integrator.dt_init");
  if (j.contains("dt_min")) out.dt_min = as_number(j.at("dt_min"), "integrator.dt_min");
  if (j.contains("dt_max")) out.dt_max = as_number(j.at("dt_max"), "integrator.dt_max");
  if (j.contains("neg_clip")) out.neg_clip = as_number(j.at("neg_clip"), "integrator.neg_clip");
  if (j.contains("blowup_moment_order"))
    out.blowup_moment_order = as_number(j.at("blowup_moment_order"), "integrator.blowup_moment_order");
  if (j.contains("blowup_threshold"))
    out.blowup_threshold = as_number(j.at("blowup_threshold"), "integrator.blowup_threshold");
  if (j.contains("record_every"))
    out.record_every = as_number(j.at("record_every"), "integrator.record_every");
}

void parse_outputs(const json& j, OutputPaths& out) {
  check_keys(j, "outputs.", {"moments_path", "states_path", "report_path", "convergence_path"});
  if (j.contains("moments_path"))
    out.moments_path = as_string(j.at("moments_path"), "outputs.moments_path");
  if (j.contains("states_path"))
    out.states_path = as_string(j.at("states_path"), "outputs.states_path");
  if (j.contains("report_path"))
    out.report_path = as_string(j.at("report_path"), "outputs.report_path");
  if (j.contains("convergence_path"))
    out.convergence_path = as_string(j.at("convergence_path"), "outputs.convergence_path");
}

void parse_gelation(const json& j, GelationOptions& out) {
  check_keys(j, "gelation.", {"window"});
  if (j.contains("window")) {
    const json& w = j.at("window");
    if (!w.is_array() || w.size() != 2)
      fail("config key gelation.window: expected [t_lo, t_hi]");
    out.window_lo = as_number(w.at(0), "gelation.window[0]");
    out.window_hi = as_number(w.at(1), "gelation.window[1]");
    if (!(out.window_lo >= 0.0 && out.window_hi > out.window_lo))
      fail("config key gelation.window: need 0 <= t_lo < t_hi");
  }
}

void parse_converge(const json& j, ConvergeOptions& out) {
  check_keys(j, "converge.", {"N_list"});
  if (j.contains("N_list")) {
    const json& v = j.at("N_list");
    if (!v.is_array()) fail("config key converge.N_list: expected an array");
    for (std::size_t i = 0; i < v.size(); ++i)
      out.N_list.push_back(as_size(v.at(i), "converge.N_list[" + std::to_string(i) + "]"));
  }
}

void parse_verify(const json& j, VerifyOptions& out) {
  check_keys(j, "verify.",
             {"conservation_max_drift", "jensen", "upper_bound", "blowup_lower_bound"});
  if (j.contains("conservation_max_drift"))
    out.conservation_max_drift =
        as_number(j.at("conservation_max_drift"), "verify.conservation_max_drift");
  if (j.contains("jensen")) {
    const json& v = j.at("jensen");
    check_keys(v, "verify.jensen.", {"n", "beta"});
    if (!v.contains("n")) fail("missing required config key: verify.jensen.n");
    out.jensen_n = static_cast<int>(as_size(v.at("n"), "verify.jensen.n"));
    if (v.contains("beta")) out.jensen_beta = as_number(v.at("beta"), "verify.jensen.beta");
  }
  if (j.contains("upper_bound")) {
    const json& v = j.at("upper_bound");
    check_keys(v, "verify.upper_bound.", {"lambda"});
    if (!v.contains("lambda")) fail("missing required config key: verify.upper_bound.lambda");
    out.upper_bound_lambda = as_number(v.at("lambda"), "verify.upper_bound.lambda");
  }
  if (j.contains("blowup_lower_bound")) {
    const json& v = j.at("blowup_lower_bound");
    check_keys(v, "verify.blowup_lower_bound.", {"alpha", "C1", "t_max"});
    if (!v.contains("alpha"))
      fail("missing required config key: verify.blowup_lower_bound.alpha");
    if (!v.contains("C1")) fail("missing required config key: verify.blowup_lower_bound.C1");
    out.blowup_alpha = as_number(v.at("alpha"), "verify.blowup_lower_bound.alpha");
    out.blowup_C1 = as_number(v.at("C1"), "verify.blowup_lower_bound.C1");
    if (v.contains("t_max"))
      out.blowup_t_max = as_number(v.at("t_max"), "verify.blowup_lower_bound.t_max");
  }
}

}  // namespace

std::vector<std::vector<double>> load_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open kernel table: " + path.string());
  std::vector<std::vector<double>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        fail("kernel table " + path.string() + ": malformed cell '" + cell + "'");
      }
    }
    table.push_back(std::move(row));
  }
  if (table.empty()) fail("kernel table " + path.string() + " is empty");
  return table;
}

SimulationConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) fail("config root must be an object");
  check_keys(doc, "",
             {"kernel", "init", "N", "integrator", "tracked_moment_orders", "outputs",
              "gelation", "converge", "verify"});

  SimulationConfig cfg;
  if (!doc.contains("kernel")) fail("missing required config key: kernel");
  parse_kernel(doc.at("kernel"), base_dir, cfg.kernel);
  if (!doc.contains("init")) fail("missing required config key: init");
  parse_init(doc.at("init"), cfg.init);
  if (!doc.contains("N")) fail("missing required config key: N");
  cfg.N = as_size(doc.at("N"), "N");
  if (cfg.N < 2) fail("config key N: truncation size must be at least 2");
  if (!doc.contains("integrator")) fail("missing required config key: integrator");
  parse_integrator(doc.at("integrator"), cfg.integrator);
  if (doc.contains("tracked_moment_orders")) {
    const json& v = doc.at("tracked_moment_orders");
    if (!v.is_array()) fail("config key tracked_moment_orders: expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double p =
          as_number(v.at(i), "tracked_moment_orders[" + std::to_string(i) + "]");
      if (p < 0.0) fail("config key tracked_moment_orders: orders must be nonnegative");
      cfg.tracked_moment_orders.push_back(p);
    }
  }
  if (doc.contains("outputs")) parse_outputs(doc.at("outputs"), cfg.outputs);
  if (doc.contains("gelation")) parse_gelation(doc.at("gelation"), cfg.gelation);
  if (doc.contains("converge")) parse_converge(doc.at("converge"), cfg.converge);
  if (doc.contains("verify")) parse_verify(doc.at("verify"), cfg.verify);
  return cfg;
}

SimulationConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace edg
