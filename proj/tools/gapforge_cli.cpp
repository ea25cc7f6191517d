// gapforge command-line front end. Talks to the library only through gapforge.h.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapforge/gapforge.h"

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kDisagree = 3, kNotConverged = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Library failure with its status attached.
struct LibError : std::runtime_error {
  gf_status status;
  LibError(gf_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

int exit_code(gf_status s) {
  switch (s) {
    case GF_OK: return kOk;
    case GF_ERR_NOT_CONVERGED: return kNotConverged;
    case GF_ERR_NON_FINITE_INTEGRAND:
    case GF_ERR_FIT_FAILED:
    case GF_ERR_INTERNAL: return kInternal;
    default: return kUsage;
  }
}

void check(gf_status s) {
  if (s != GF_OK) throw LibError(s, std::string(gf_status_name(s)) + ": " + gf_last_error());
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  gf_string_free(s);
  return out;
}

// Raw option values of one subcommand; flags override config-file entries.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& help) : app_(parent.add_subcommand(name, help)) {
    app_->add_option("--config", config_, "JSON file with option values; flags override it");
  }

  void option(const std::string& key, const std::string& help) {
    app_->add_option("--" + key, raw_[key], help);
  }
  void flag(const std::string& key, const std::string& help) {
    app_->add_flag("--" + key, flags_[key], help);
  }

  CLI::App* app() const { return app_; }

  // Fills values not given on the command line from the config file.
  void merge_config() {
    if (config_.empty()) return;
    std::ifstream in(config_);
    if (!in) throw UsageError("cannot read config file " + config_);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config " + config_ + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config " + config_ + ": top level must be an object");
    for (const auto& [key_in, value] : j.items()) {
      std::string key = key_in;
      for (char& ch : key) if (ch == '_') ch = '-';
      const auto* opt = app_->get_option_no_throw("--" + key);
      if (!opt) throw UsageError("unknown config key '" + key_in + "'");
      const bool given = opt->count() > 0;
      if (auto it = flags_.find(key); it != flags_.end()) {
        if (!value.is_boolean()) throw UsageError("config key '" + key_in + "' must be true or false");
        if (!given) it->second = value.get<bool>();
        continue;
      }
      auto it = raw_.find(key);
      if (it == raw_.end()) throw UsageError("unknown config key '" + key_in + "'");
      if (given) continue;
      if (value.is_string()) {
        it->second = value.get<std::string>();
      } else if (value.is_number()) {
        it->second = value.dump();
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) {
          if (!v.is_number()) throw UsageError("config key '" + key_in + "' must hold numbers");
          joined += (joined.empty() ? "" : ",") + v.dump();
        }
        it->second = joined;
      } else {
        throw UsageError("config key '" + key_in + "' has an unsupported type");
      }
    }
  }

  bool has(const std::string& key) const { return !raw_.at(key).empty(); }
  const std::string& str(const std::string& key) const { return raw_.at(key); }
  bool is_set(const std::string& key) const { return flags_.at(key); }

  double number(const std::string& key) const {
    const auto& s = raw_.at(key);
    if (s.empty()) throw UsageError("--" + key + " is required");
    return parse_number(s, key);
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw UsageError("--" + key + " must be an integer");
    return static_cast<long>(v);
  }

  static double parse_number(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || std::isnan(v)) {
      throw UsageError("--" + key + ": not a number: '" + s + "'");
    }
    return v;
  }

  // "min:max:steps" or a single value.
  gf_range range(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const auto& s = raw_.at(key);
    if (s.empty()) {
      if (!fallback) throw UsageError("--" + key + " is required");
      return {*fallback, *fallback, 1};
    }
    const auto first = s.find(':');
    if (first == std::string::npos) {
      const double v = parse_number(s, key);
      return {v, v, 1};
    }
    const auto second = s.find(':', first + 1);
    if (second == std::string::npos) throw UsageError("--" + key + ": expected min:max:steps");
    const double lo = parse_number(s.substr(0, first), key);
    const double hi = parse_number(s.substr(first + 1, second - first - 1), key);
    const double steps = parse_number(s.substr(second + 1), key);
    if (steps < 1 || steps != std::floor(steps) || steps > 1e7) throw UsageError("--" + key + ": steps must be a positive integer");
    return {lo, hi, static_cast<int>(steps)};
  }

 private:
  CLI::App* app_;
  std::string config_;
  std::map<std::string, std::string> raw_;
  std::map<std::string, bool> flags_;
};

void add_model_options(Command& c) {
  c.option("lambda-b", "pairing coupling lambda_B");
  c.option("lambda-m", "mean-field coupling lambda_M (default 0)");
  c.option("mu", "chemical potential");
  c.option("temp", "temperature (0 and inf allowed)");
  c.option("beta", "inverse temperature, instead of --temp");
}

gf_params model_params(const Command& c) {
  if (c.has("temp") && c.has("beta")) throw UsageError("give either --temp or --beta, not both");
  if (!c.has("temp") && !c.has("beta")) throw UsageError("--temp or --beta is required");
  gf_params p{};
  const double lb = c.number("lambda-b");
  const double lm = c.number("lambda-m", 0.0);
  const double mu = c.number("mu");
  if (c.has("beta")) {
    check(gf_params_from_beta(lb, lm, mu, c.number("beta"), &p));
  } else {
    p = {lb, lm, mu, c.number("temp")};
  }
  check(gf_validate(&p));
  return p;
}

void emit(const Command& c, const std::string& text) {
  if (!c.has("out")) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.str("out"), std::ios::binary);
  if (!out) throw LibError(GF_ERR_IO, "cannot write " + c.str("out"));
  out << text;
  if (!out) throw LibError(GF_ERR_IO, "write failed: " + c.str("out"));
}

std::string format_of(const Command& c, const std::string& fallback) {
  const std::string f = c.has("format") ? c.str("format") : fallback;
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

int run_solve(const Command& c) {
  const auto p = model_params(c);
  gf_report* raw = nullptr;
  check(gf_solve(&p, c.number("tol", 0.0), c.is_set("nonneg-mean-field") ? 1 : 0, &raw));
  std::unique_ptr<gf_report, decltype(&gf_report_destroy)> report(raw, gf_report_destroy);
  char* text = nullptr;
  if (format_of(c, "json") == "json") {
    check(gf_report_to_json(report.get(), c.is_set("check-mixing-angle") ? 1 : 0, &text));
  } else {
    check(gf_report_to_csv(report.get(), &text));
  }
  emit(c, take(text));
  std::cerr << gf_report_count(report.get()) << " solution(s), mixed multiplicity "
            << gf_report_multiplicity(report.get()) << '\n';
  return kOk;
}

int run_scan(const Command& c) {
  const bool json = format_of(c, "csv") == "json";
  char* text = nullptr;
  if (c.is_set("equilibrium")) {
    const auto r = c.range("lambda-b-bar");
    check(gf_equilibrium_curve(r.min, r.max, r.steps, json ? GF_FORMAT_JSON : GF_FORMAT_CSV, &text));
    emit(c, take(text));
    return kOk;
  }
  gf_scan_spec spec{};
  spec.lambda_b = c.range("lambda-b");
  spec.lambda_m = c.range("lambda-m", 0.0);
  spec.mu = c.range("mu");
  if (c.has("beta")) {
    if (c.has("temp")) throw UsageError("give either --temp or --beta, not both");
    const double beta = c.number("beta");
    gf_params p{};
    check(gf_params_from_beta(1.0, 0.0, 0.0, beta, &p));
    spec.temperature = {p.temperature, p.temperature, 1};
  } else {
    spec.temperature = c.range("temp");
  }
  spec.tol = c.number("tol", 0.0);
  const long threads = c.integer("threads", 0);
  if (threads < 0) throw UsageError("--threads must be >= 0");
  spec.threads = static_cast<unsigned>(threads);
  spec.require_nonnegative_mean_field_energy = c.is_set("nonneg-mean-field") ? 1 : 0;
  gf_scan* raw = nullptr;
  check(gf_scan_run(&spec, &raw));
  std::unique_ptr<gf_scan, decltype(&gf_scan_destroy)> result(raw, gf_scan_destroy);
  check(gf_scan_write(result.get(), json ? GF_FORMAT_JSON : GF_FORMAT_CSV, &text));
  emit(c, take(text));
  std::cerr << gf_scan_rows(result.get()) << " row(s)\n";
  return kOk;
}

int run_verify(const Command& c) {
  const std::string name = c.str("regime");
  gf_regime regime;
  if (name == "IA") regime = GF_REGIME_IA;
  else if (name == "IB") regime = GF_REGIME_IB;
  else if (name == "IIA") regime = GF_REGIME_IIA;
  else if (name == "IIB") regime = GF_REGIME_IIB;
  else throw UsageError("--regime must be IA, IB, IIA or IIB");
  const auto p = model_params(c);
  gf_verification* raw = nullptr;
  check(gf_verify_regime(regime, &p, c.number("tol", 0.0), &raw));
  std::unique_ptr<gf_verification, decltype(&gf_verification_destroy)> v(raw, gf_verification_destroy);
  char* text = nullptr;
  check(gf_verification_to_json(v.get(), &text));
  const std::string json_text = take(text);
  if (format_of(c, "csv") == "json") {
    emit(c, json_text);
  } else {
    const auto j = nlohmann::json::parse(json_text);
    std::ostringstream os;
    os << "quantity,numeric,closed_form,rel_error,tolerance,pass\n";
    for (const auto& row : j["comparisons"]) {
      os << row["quantity"].get<std::string>() << ',' << row["numeric"].dump() << ',' << row["closed_form"].dump()
         << ',' << (row["rel_error"].is_null() ? std::string("inf") : row["rel_error"].dump()) << ','
         << row["tolerance"].dump() << ',' << (row["pass"].get<bool>() ? "pass" : "fail") << '\n';
    }
    emit(c, os.str());
  }
  const bool passed = gf_verification_passed(v.get()) != 0;
  std::cerr << "regime " << name << ": " << (passed ? "pass" : "FAIL") << '\n';
  return passed ? kOk : kDisagree;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Command::parse_number(item, key));
  if (out.empty()) throw UsageError("--" + key + " needs at least one value");
  return out;
}

int run_kernel(const Command& c) {
  const auto p = model_params(c);
  gf_kernel_problem* raw_problem = nullptr;
  const bool tabulated = c.has("vm-csv") || c.has("vb-csv");
  std::optional<double> fermi_momentum;
  if (tabulated) {
    if (!c.has("vm-csv") || !c.has("vb-csv")) throw UsageError("--vm-csv and --vb-csv go together");
    check(gf_kernel_problem_tabulated(&p, c.str("vm-csv").c_str(), c.str("vb-csv").c_str(), &raw_problem));
  } else {
    const double eps = c.number("epsilon");
    const double p_max = c.number("p-max", 2.0 * (std::sqrt(std::max(p.mu, 0.0)) + eps));
    const long points = c.integer("points", 2000);
    if (points < 2) throw UsageError("--points must be >= 2");
    check(gf_kernel_problem_shell(&p, eps, p_max, static_cast<size_t>(points), &raw_problem));
    fermi_momentum = std::sqrt(p.mu);
  }
  std::unique_ptr<gf_kernel_problem, decltype(&gf_kernel_problem_destroy)> problem(raw_problem,
                                                                                  gf_kernel_problem_destroy);

  auto controls = gf_iteration_controls_default();
  controls.damping = c.number("damping", controls.damping);
  controls.max_iters = static_cast<int>(c.integer("max-iters", controls.max_iters));
  controls.tol = c.number("iter-tol", controls.tol);
  const std::string init = c.has("init") ? c.str("init") : (c.has("seed") ? "seeded" : "zero");
  if (init == "zero") controls.init = GF_INIT_ZERO_PAIRING;
  else if (init == "seeded") controls.init = GF_INIT_SEEDED_PAIRING;
  else if (init == "scalar") controls.init = GF_INIT_FROM_SCALAR;
  else throw UsageError("--init must be zero, seeded or scalar");
  controls.seed = c.number("seed", 1.0);
  const std::string method = c.has("method") ? c.str("method") : "picard";
  if (method == "picard") controls.method = GF_METHOD_PICARD;
  else if (method == "newton") controls.method = GF_METHOD_NEWTON_KRYLOV;
  else throw UsageError("--method must be picard or newton");
  const bool json = format_of(c, "csv") == "json";

  nlohmann::json summary;
  std::string body;
  gf_status status = GF_OK;
  char* text = nullptr;
  if (c.has("seeds")) {
    const auto seeds = parse_list(c.str("seeds"), "seeds");
    gf_branches* raw = nullptr;
    check(gf_kernel_branch_scan(problem.get(), &controls, seeds.data(), seeds.size(), &raw));
    std::unique_ptr<gf_branches, decltype(&gf_branches_destroy)> branches(raw, gf_branches_destroy);
    summary["branches"] = gf_branches_count(branches.get());
    summary["failed_seeds"] = gf_branches_failures(branches.get());
    if (fermi_momentum) {
      nlohmann::json at = nlohmann::json::array();
      for (size_t i = 0; i < gf_branches_count(branches.get()); ++i) {
        double db = 0.0;
        check(gf_gaps_value_at(gf_branches_get(branches.get(), i), *fermi_momentum, nullptr, &db, nullptr));
        at.push_back(db);
      }
      summary["delta_B_at_fermi_momentum"] = at;
    }
    if (json) {
      check(gf_branches_to_json(branches.get(), &text));
    } else {
      check(gf_branches_to_csv(branches.get(), &text));
    }
    body = take(text);
    if (gf_branches_count(branches.get()) == 0) status = GF_ERR_NOT_CONVERGED;
  } else {
    gf_gaps* raw = nullptr;
    status = gf_kernel_solve(problem.get(), &controls, &raw);
    if (status != GF_OK && status != GF_ERR_NOT_CONVERGED) check(status);
    const std::string message = status == GF_OK ? "" : gf_last_error();
    std::unique_ptr<gf_gaps, decltype(&gf_gaps_destroy)> gaps(raw, gf_gaps_destroy);
    summary["converged"] = status == GF_OK;
    if (!message.empty()) summary["message"] = message;
    summary["iterations"] = gf_gaps_iterations(gaps.get());
    summary["residual"] = gf_gaps_residual(gaps.get());
    summary["points"] = gf_gaps_size(gaps.get());
    if (fermi_momentum) {
      double dm = 0.0, db = 0.0, w = 0.0;
      check(gf_gaps_value_at(gaps.get(), *fermi_momentum, &dm, &db, &w));
      summary["at_fermi_momentum"] = {{"p", *fermi_momentum}, {"delta_M", dm}, {"delta_B", db}, {"w_bar", w}};
    }
    if (json) {
      check(gf_gaps_to_json(gaps.get(), &text));
    } else {
      check(gf_gaps_to_csv(gaps.get(), &text));
    }
    body = take(text);
  }

  if (json) {
    auto j = nlohmann::json::parse(body);
    j["summary"] = summary;
    emit(c, j.dump(2) + "\n");
  } else {
    emit(c, body);
  }
  if (c.has("summary")) {
    std::ofstream out(c.str("summary"), std::ios::binary);
    if (!out) throw LibError(GF_ERR_IO, "cannot write " + c.str("summary"));
    out << summary.dump(2) << '\n';
  } else if (!json) {
    std::cerr << summary.dump(2) << '\n';
  }
  if (status == GF_ERR_NOT_CONVERGED) std::cerr << "not converged\n";
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed mean-field / pairing gap equation solver"};
  app.require_subcommand(1, 1);

  Command solve(app, "solve", "Solve the Fermi-surface gap equations at one parameter point");
  add_model_options(solve);
  solve.option("tol", "root tolerance in reduced units");
  solve.option("format", "json (default) or csv");
  solve.option("out", "output file (default stdout)");
  solve.flag("nonneg-mean-field", "drop mixed solutions with mu + Delta_M < 0");
  solve.flag("check-mixing-angle", "also report |c| < sqrt(2)/2 as an invariant violation");

  Command scan(app, "scan", "Sweep parameters; ranges are min:max:steps or a single value");
  add_model_options(scan);
  scan.option("tol", "root tolerance in reduced units");
  scan.option("threads", "worker threads (default: hardware, capped by GAPFORGE_THREADS)");
  scan.option("format", "csv (default) or json");
  scan.option("out", "output file (default stdout)");
  scan.option("lambda-b-bar", "reduced coupling range for --equilibrium");
  scan.flag("equilibrium", "tabulate the tangency curve mu_e(lambda_B_bar)");
  scan.flag("nonneg-mean-field", "drop mixed solutions with mu + Delta_M < 0");

  Command verify(app, "verify", "Compare an asymptotic regime's closed form with the exact solver");
  add_model_options(verify);
  verify.option("regime", "IA, IB, IIA or IIB");
  verify.option("tol", "relative tolerance (default 1e-3 for A, 5e-2 for B)");
  verify.option("format", "csv (default) or json");
  verify.option("out", "output file (default stdout)");

  Command kernel(app, "kernel-solve", "Solve the momentum-dependent gap equations on a radial grid");
  add_model_options(kernel);
  kernel.option("epsilon", "half-width of the separable shell kernel");
  kernel.option("p-max", "grid end (default 2 (sqrt(mu) + epsilon))");
  kernel.option("points", "grid points (default 2000)");
  kernel.option("vm-csv", "tabulated V_M kernel");
  kernel.option("vb-csv", "tabulated V_B kernel (symmetric)");
  kernel.option("damping", "fixed-point damping in (0, 1] (default 0.5)");
  kernel.option("max-iters", "iteration limit (default 10000)");
  kernel.option("iter-tol", "sup-norm residual target (default 1e-10)");
  kernel.option("init", "zero, seeded or scalar");
  kernel.option("seed", "Delta_B start value for --init seeded (default 1)");
  kernel.option("seeds", "comma-separated Delta_B seeds; runs a branch scan");
  kernel.option("method", "picard (default) or newton");
  kernel.option("format", "csv (default) or json");
  kernel.option("out", "gap table file (default stdout)");
  kernel.option("summary", "convergence summary JSON file (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    for (Command* c : {&solve, &scan, &verify, &kernel}) {
      if (!c->app()->parsed()) continue;
      c->merge_config();
      if (c == &solve) return run_solve(*c);
      if (c == &scan) return run_scan(*c);
      if (c == &verify) return run_verify(*c);
      return run_kernel(*c);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const LibError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
