#include "erloss/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace erloss {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

void warn_unknown(const json& obj, std::initializer_list<const char*> known,
                  const std::string& path, std::vector<std::string>& warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) warnings.push_back("unknown field ignored: " + path + "." + it.key());
  }
}

demand_curve parse_demand(const json& d, double lambda, const std::string& path,
                          std::vector<std::string>& warnings) {
  const json& kind_v = require(d, "kind", path);
  if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  try {
    if (kind == "linear" || kind == "exponential") {
      warn_unknown(d, {"kind", "a", "b"}, path, warnings);
      const double a = number_at(d, "a", path), b = number_at(d, "b", path);
      demand_curve c = kind == "linear" ? demand_curve::linear(a, b)
                                        : demand_curve::exponential(a, b);
      if (std::abs(lambda - c.max_rate()) > 1e-6 * std::max(1.0, c.max_rate()))
        fail(path, "Lambda must equal b/a for " + kind + " demand");
      return c;
    }
    if (kind == "reciprocal_tight") {
      warn_unknown(d, {"kind", "a", "b"}, path, warnings);
      return demand_curve::reciprocal_tight(number_at(d, "a", path), number_at(d, "b", path),
                                            lambda);
    }
    if (kind == "uniform_valuation") {
      warn_unknown(d, {"kind", "lo", "hi"}, path, warnings);
      return demand_curve::uniform_valuation(number_at(d, "lo", path),
                                             number_at(d, "hi", path), lambda);
    }
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;  // already carries the field path
    fail(path, msg);
  }
  fail(path + ".kind", "unknown demand kind '" + kind + "'");
}

json policy_rows(const state_space& S, const dynamic_policy& pol) {
  json rows = json::array();
  for (std::size_t s = 0; s < S.size(); ++s) {
    json row = json::array();
    for (int j = 0; j < pol.num_classes; ++j) row.push_back(pol.rate(s, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

load_report load_instance_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");

  load_report rep;
  warn_unknown(doc, {"C", "classes", "seed", "tolerances"}, "config", rep.warnings);

  const json& c_v = require(doc, "C", "config");
  if (!c_v.is_number_integer()) fail("config.C", "expected an integer");
  rep.inst.C = c_v.get<int>();

  const json& classes = require(doc, "classes", "config");
  if (!classes.is_array() || classes.empty())
    fail("config.classes", "expected a non-empty array");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string path = "classes[" + std::to_string(i) + "]";
    const json& cl = classes[i];
    if (!cl.is_object()) fail(path, "expected an object");
    warn_unknown(cl, {"Lambda", "mu", "demand"}, path, rep.warnings);
    class_spec spec;
    spec.Lambda = number_at(cl, "Lambda", path);
    spec.mu = number_at(cl, "mu", path);
    spec.demand = parse_demand(require(cl, "demand", path), spec.Lambda, path + ".demand",
                               rep.warnings);
    rep.inst.classes.push_back(std::move(spec));
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) fail("config.seed", "expected an integer");
    rep.seed = doc["seed"].get<std::uint64_t>();
    rep.has_seed = true;
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) fail("config.tolerances", "expected an object");
    warn_unknown(t, {"tol"}, "config.tolerances", rep.warnings);
    if (t.contains("tol")) rep.tol = number_at(t, "tol", "config.tolerances");
  }

  try {
    rep.inst.validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const std::string prefix = "instance: ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw std::invalid_argument("config: " + msg);
  }
  return rep;
}

load_report load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_instance_json(buf.str());
}

std::string instance_to_json(const instance& inst) {
  json doc;
  doc["C"] = inst.C;
  doc["classes"] = json::array();
  for (const auto& cl : inst.classes) {
    json d;
    d["kind"] = to_string(cl.demand.kind());
    if (cl.demand.kind() == demand_kind::uniform_valuation) {
      d["lo"] = cl.demand.support_lo();
      d["hi"] = cl.demand.support_hi();
    } else {
      d["a"] = cl.demand.coeff_a();
      d["b"] = cl.demand.coeff_b();
    }
    doc["classes"].push_back({{"Lambda", cl.Lambda}, {"mu", cl.mu}, {"demand", std::move(d)}});
  }
  return doc.dump(2);
}

std::string solve_report_to_json(const instance& inst, const state_space& S,
                                 const solve_report& rep) {
  json doc;
  doc["C"] = inst.C;
  doc["num_classes"] = inst.num_classes();
  doc["num_states"] = S.size();
  doc["gain"] = rep.gain;
  doc["uniformization"] = rep.uniformization;
  doc["span_residual"] = rep.span_residual;
  doc["iterations"] = rep.iterations;
  doc["converged"] = rep.converged;
  doc["policy_rates"] = policy_rows(S, rep.policy);
  return doc.dump(2);
}

std::string static_report_to_json(const instance& inst, const static_solve_report& rep) {
  json doc;
  doc["C"] = inst.C;
  doc["rates"] = rep.policy.rates;
  doc["revenue"] = rep.revenue;
  doc["grad_norm"] = rep.grad_norm;
  doc["starts_used"] = rep.starts_used;
  doc["start_spread"] = rep.start_spread;
  doc["lipschitz_bound"] = rep.lipschitz_bound;
  doc["boundary_active"] = rep.boundary_active;
  return doc.dump(2);
}

std::string sim_estimate_to_json(const sim_estimate& est) {
  json doc;
  doc["revenue_rate"] = est.revenue_rate;
  doc["revenue_ci"] = est.revenue_ci;
  doc["blocking"] = est.blocking;
  doc["blocking_ci"] = est.blocking_ci;
  doc["blocking_purchaser"] = est.blocking_purchaser;
  doc["blocking_purchaser_ci"] = est.blocking_purchaser_ci;
  doc["occupancy"] = est.occupancy;
  doc["occupancy_ci"] = est.occupancy_ci;
  doc["reps"] = est.reps;
  doc["horizon"] = est.horizon;
  doc["seed"] = est.seed;
  return doc.dump(2);
}

std::string certify_document_json(double case1, double case2, const certificate& box) {
  json doc;
  doc["C"] = box.C;
  doc["N"] = box.grid_N;
  doc["bound"] = std::min({case1, case2, box.lower_bound});
  doc["argmin_box"] = box.argmin_box;
  doc["cases"] = {{"case1", case1}, {"case2", case2}, {"box", box.lower_bound}};
  doc["runtime_s"] = box.runtime_s;
  return doc.dump(2);
}

}  // namespace erloss
