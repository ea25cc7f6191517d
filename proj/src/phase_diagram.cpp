#include "gapforge/phase_diagram.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace gapforge {

namespace {

double snap(double value, double bound) {
  return std::abs(value - bound) <= kBoundarySnap * std::max(1.0, std::abs(bound)) ? bound : value;
}

}  // namespace

Area classify_area(const ModelParams& params) {
  const double lb = params.lambda_B;
  const double lm = params.lambda_M;
  const double mu = params.mu;

  if (lb > 0.0) {
    if (!(snap(lb, mu) > mu)) return Area::None;
    const double a_bound = -(lb + mu) / 2.0;
    const double c_bound = (lb - 4.0 * mu) / 4.0;
    const bool a_side = snap(lm, a_bound) > a_bound;
    const bool c_side = snap(lm, c_bound) < c_bound;
    if (a_side && c_side) return Area::BPlus;
    if (a_side) return Area::APlus;
    if (c_side) return Area::CPlus;
    return Area::None;
  }
  if (lb < 0.0) {
    const double t = params.temperature;
    // -mu T / (|lb| + 2T), written to stay finite at T = inf.
    const double upper = t == 0.0 ? 0.0 : -mu / (std::abs(lb) / t + 2.0);
    const double lower = -2.0 * mu;
    if (!(snap(lm, lower) >= lower) || !(snap(lm, upper) <= upper)) return Area::None;
    const double b_bound = -(lb + 4.0 * mu) / 4.0;
    return snap(lm, b_bound) < b_bound ? Area::BMinus : Area::AMinus;
  }
  return Area::None;
}

RootClass mixed_root_class(std::span<const PairingRoot> roots) {
  switch (roots.size()) {
    case 0: return RootClass::NoSolution;
    case 1: return RootClass::Unique;
    default: return RootClass::Two;
  }
}

RootClass multiplicity_class(const ModelParams& params, double tol) {
  validate(params);
  if (params.zero_temperature()) fail(ErrorCode::ZeroTemperature, "multiplicity class needs T > 0");
  if (params.lambda_B == 0.0 || params.infinite_temperature()) return RootClass::NoSolution;
  if (params.lambda_B < 0.0) return mixed_root_class(pairing_energy_roots(params, {tol, 512}));

  const auto r = to_reduced(params);
  if (!(r.lambda_B_bar > 1.0)) return RootClass::NoSolution;
  if (r.mu_bar == 0.0) return RootClass::Unique;  // the partner root sits at x = 0
  const auto eq = equilibrium_mu(r.lambda_B_bar);
  const double scale = std::max(1.0, r.lambda_B_bar);
  const double d = r.mu_bar - eq.mu_e_bar;
  if (std::abs(d) < std::sqrt(tol) * scale) return RootClass::Unique;
  return d < 0.0 ? RootClass::Two : RootClass::NoSolution;
}

RegionLabel classify_region(const ModelParams& params, double tol) {
  validate(params);
  RegionLabel label;
  label.area = classify_area(params);
  if (params.lambda_B == 0.0) {
    label.roots = RootClass::NoSolution;
  } else if (params.zero_temperature()) {
    label.roots = mixed_root_class(pairing_energy_roots(params, {tol, 512}));
  } else {
    label.roots = multiplicity_class(params, tol);
  }
  return label;
}

std::vector<double> ParamRange::values() const {
  if (steps < 1 || !std::isfinite(min) || !std::isfinite(max)) {
    fail(ErrorCode::InvalidArgument, "range needs finite bounds and steps >= 1");
  }
  if (steps == 1) return {min};
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = min + (max - min) * i / (steps - 1.0);
  v.back() = max;
  return v;
}

unsigned default_scan_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAPFORGE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<ScanRow> scan(const ScanSpec& spec) {
  const auto lb = spec.lambda_B.values();
  const auto lm = spec.lambda_M.values();
  const auto mu = spec.mu.values();
  const auto temp = spec.temperature.values();
  const std::size_t total = lb.size() * lm.size() * mu.size() * temp.size();

  std::vector<ScanRow> rows(total);
  auto evaluate = [&](std::size_t idx) {
    std::size_t rest = idx;
    const std::size_t it = rest % temp.size();
    rest /= temp.size();
    const std::size_t imu = rest % mu.size();
    rest /= mu.size();
    const std::size_t ilm = rest % lm.size();
    const std::size_t ilb = rest / lm.size();

    ScanRow& row = rows[idx];
    row.params = {lb[ilb], lm[ilm], mu[imu], temp[it]};
    try {
      const auto report = solve_all(row.params, spec.solve);
      row.region = report.region;
      row.multiplicity = report.multiplicity;
      row.pure_delta_M = report.solutions.front().delta_M;
      row.pure_w_bar = report.solutions.front().w_bar;
      row.mixed.assign(report.solutions.begin() + 1, report.solutions.end());
    } catch (const Error& e) {
      row.error = std::string(to_string(e.code())) + ": " + e.what();
    }
  };

  const unsigned threads = std::min<std::size_t>(spec.threads ? spec.threads : default_scan_threads(), total);
  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) evaluate(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) evaluate(i);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

std::vector<EquilibriumPoint> equilibrium_curve(double lo, double hi, int steps) {
  if (!(lo > 1.0) || !(hi > 1.0)) fail(ErrorCode::DomainError, "equilibrium curve needs lambda_B_bar range inside (1, inf)");
  std::vector<EquilibriumPoint> out;
  for (double lb : ParamRange{lo, hi, steps}.values()) out.push_back(equilibrium_mu(lb));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json solution_json(const GapSolution& s, const ModelParams& params, bool check_mixing_angle) {
  nlohmann::json j;
  j["phase"] = to_string(s.phase);
  j["delta_M"] = s.delta_M;
  j["delta_B"] = s.delta_B;
  j["w_bar"] = s.w_bar;
  j["c"] = s.coeffs.c;
  j["s"] = s.coeffs.s;
  j["phi"] = s.coeffs.phi;
  j["residual"] = s.residual;
  j["delta_B_sign_free"] = s.delta_B_sign_free;
  j["invariant_violations"] = check_invariants(s, params, 1e-9, check_mixing_angle);
  return j;
}

nlohmann::json params_json(const ModelParams& p) {
  nlohmann::json j;
  j["lambda_B"] = p.lambda_B;
  j["lambda_M"] = p.lambda_M;
  j["mu"] = p.mu;
  j["temperature"] = p.temperature;
  j["beta"] = p.beta();
  return j;
}

}  // namespace

void write_scan_csv(std::ostream& out, std::span<const ScanRow> rows) {
  out << "lambda_B,lambda_M,mu,temperature,area,root_class,multiplicity,pure_delta_M,pure_w_bar,"
         "w_bar_1,delta_M_1,delta_B_1,phase_1,w_bar_2,delta_M_2,delta_B_2,phase_2,error\n";
  for (const auto& r : rows) {
    out << format_double(r.params.lambda_B) << ',' << format_double(r.params.lambda_M) << ','
        << format_double(r.params.mu) << ',' << format_double(r.params.temperature) << ',';
    if (r.error.empty()) {
      out << to_string(r.region.area) << ',' << to_string(r.region.roots) << ',' << r.multiplicity << ','
          << format_double(r.pure_delta_M) << ',' << format_double(r.pure_w_bar);
    } else {
      out << ",,,,";
    }
    for (std::size_t k = 0; k < 2; ++k) {
      if (k < r.mixed.size()) {
        const auto& s = r.mixed[k];
        out << ',' << format_double(s.w_bar) << ',' << format_double(s.delta_M) << ',' << format_double(s.delta_B)
            << ',' << to_string(s.phase);
      } else {
        out << ",,,,";
      }
    }
    out << ',' << csv_field(r.error) << '\n';
  }
}

void write_scan_json(std::ostream& out, std::span<const ScanRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["params"] = params_json(r.params);
    if (r.error.empty()) {
      j["area"] = to_string(r.region.area);
      j["root_class"] = to_string(r.region.roots);
      j["multiplicity"] = r.multiplicity;
      j["pure_delta_M"] = r.pure_delta_M;
      j["pure_w_bar"] = r.pure_w_bar;
      nlohmann::json mixed = nlohmann::json::array();
      for (const auto& s : r.mixed) mixed.push_back(solution_json(s, r.params, false));
      j["mixed"] = mixed;
    } else {
      j["error"] = r.error;
    }
    arr.push_back(j);
  }
  out << arr.dump(2) << '\n';
}

void write_equilibrium_csv(std::ostream& out, std::span<const EquilibriumPoint> points) {
  out << "lambda_B_bar,mu_e_bar,x_e\n";
  for (const auto& p : points) {
    out << format_double(p.lambda_B_bar) << ',' << format_double(p.mu_e_bar) << ',' << format_double(p.x_e) << '\n';
  }
}

void write_equilibrium_json(std::ostream& out, std::span<const EquilibriumPoint> points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) arr.push_back({{"lambda_B_bar", p.lambda_B_bar}, {"mu_e_bar", p.mu_e_bar}, {"x_e", p.x_e}});
  out << arr.dump(2) << '\n';
}

void write_report_json(std::ostream& out, const SolveReport& report, bool check_mixing_angle) {
  nlohmann::json j;
  j["params"] = params_json(report.params);
  j["area"] = to_string(report.region.area);
  j["root_class"] = to_string(report.region.roots);
  j["multiplicity"] = report.multiplicity;
  nlohmann::json sols = nlohmann::json::array();
  bool clean = true;
  for (const auto& s : report.solutions) {
    auto sj = solution_json(s, report.params, check_mixing_angle);
    clean = clean && sj["invariant_violations"].empty();
    sols.push_back(std::move(sj));
  }
  j["solutions"] = sols;
  j["invariants_ok"] = clean;
  j["notes"] = report.notes;
  out << j.dump(2) << '\n';
}

}  // namespace gapforge
