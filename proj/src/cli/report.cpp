#include "report.hpp"

#include <cmath>
#include <sstream>

#include "kgt/serialize.hpp"

namespace kgt::cli {

namespace {

using nlohmann::json;

// JSON has no infinities; those are written as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

json kam_report_json(const KamReport& rep) {
  json j;
  j["status"] = rep.status;
  j["eps0"] = num(rep.eps0);
  j["gamma"] = rep.gamma;
  json trace = json::array();
  for (const auto& e : rep.trace) {
    json t;
    t["s"] = e.s;
    t["rho"] = num(e.rho);
    t["eps"] = num(e.eps);
    t["norm_r0"] = num(e.norm_r0);
    t["norm_r1"] = num(e.norm_r1);
    t["norm_r2"] = num(e.norm_r2);
    t["terms"] = e.terms;
    t["post_r0"] = e.post_r0;
    t["post_r1"] = e.post_r1;
    t["post_r2"] = e.post_r2;
    if (e.has_step) {
      t["shift_inf"] = num(e.shift_inf);
      t["vstar_delta_inf"] = num(e.vstar_delta_inf);
      t["phi_size"] = num(e.phi_size);
      t["lambda_shift_inf"] = num(e.lambda_shift_inf);
      t["shift_bound_ok"] = e.shift_bound_ok;
      t["min_divisor"] = num(e.min_divisor);
      t["fast_path"] = e.fast_path;
      t["newton_iterations"] = e.newton_iterations;
      t["lie_brackets"] = e.brackets;
      t["lie_tail_bound"] = num(e.tail_bound);
    }
    trace.push_back(t);
  }
  j["trace"] = trace;
  json decay = json::array();
  for (double x : rep.decay_exponents) decay.push_back(num(x));
  j["decay_exponents"] = decay;
  j["torus_residual"] = num(rep.torus_residual);
  j["target"] = rep.target.data();
  json vstar = json::array();
  for (const auto& v : rep.vstar) vstar.push_back(v.data());
  j["vstar"] = vstar;
  j["divisor_indices"] = rep.divisor_indices.size();
  j["warnings"] = rep.warnings;
  return j;
}

std::string kam_trace_csv(const KamReport& rep) {
  std::ostringstream os;
  os << "s,rho,eps,norm_r0,norm_r1,norm_r2,shift_inf,vstar_delta_inf,phi_size,min_divisor\n";
  for (const auto& e : rep.trace) {
    os << e.s << ',' << format_double(e.rho) << ',' << format_double(e.eps) << ',' << format_double(e.norm_r0)
       << ',' << format_double(e.norm_r1) << ',' << format_double(e.norm_r2) << ',';
    if (e.has_step)
      os << format_double(e.shift_inf) << ',' << format_double(e.vstar_delta_inf) << ','
         << format_double(e.phi_size) << ',' << format_double(e.min_divisor);
    else
      os << ",,,";
    os << '\n';
  }
  return os.str();
}

json measure_json(const MeasureEstimate& est, const EllBudget& budget, long samples, std::uint64_t seed) {
  json j;
  j["fraction"] = est.fraction;
  j["stderr"] = est.stderr_;
  j["samples"] = samples;
  j["budget"] = est.budget;
  j["gamma"] = est.gamma;
  j["c"] = est.c;
  j["lower_bound"] = true;
  j["seed"] = seed;
  j["support"] = budget.max_support;
  j["height"] = budget.max_height;
  j["n3max"] = budget.max_n3star;
  j["regimes"] = {{"with_b", est.with_b_regime}, {"direct", est.direct_regime}};
  return j;
}

}  // namespace kgt::cli
