//
// Copyright 2026 The ptr-accountant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line accountant for propose-test-release mechanisms: privacy
// curves, amplification comparisons, composition sweeps, margin reports,
// training simulations, and empirical audits. Output is CSV or JSON with an
// embedded run manifest; re-running a manifest reproduces the numeric
// payload byte for byte.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptrdp/errors.hpp"
#include "ptrdp/noise_mechanisms.hpp"
#include "ptrdp/ptr_core.hpp"
#include "ptrdp/rdp_accountant.hpp"
#include "ptrdp/robust_sgd_sim.hpp"
#include "ptrdp/subsampling.hpp"
#include "ptrdp/trimmed_sum.hpp"
#include "ptrdp/version.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Locale-independent formatting. Twelve significant digits for CSV payload
// fields, shortest round-trip form for manifest parameters.
std::string fmt12(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 12);
  return std::string(buf, ptr);
}

std::string fmtExact(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string isoTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Canonical argv stored in the manifest: enough to reproduce the payload,
// excluding output destinations.
std::vector<std::string> paramsToArgv(const std::string& command, const json& params) {
  std::vector<std::string> argv{command};
  for (const auto& [key, value] : params.items()) {
    argv.push_back("--" + key);
    if (value.is_string()) {
      argv.push_back(value.get<std::string>());
    } else if (value.is_number_unsigned()) {
      argv.push_back(std::to_string(value.get<unsigned long long>()));
    } else if (value.is_number_integer()) {
      argv.push_back(std::to_string(value.get<long long>()));
    } else if (value.is_number_float()) {
      argv.push_back(fmtExact(value.get<double>()));
    } else if (value.is_boolean()) {
      if (!value.get<bool>()) argv.pop_back();  // flags appear only when set
    } else {
      argv.push_back(value.dump());
    }
  }
  return argv;
}

json makeManifest(const std::string& command, const json& params) {
  json manifest;
  manifest["command"] = command;
  manifest["params"] = params;
  manifest["argv"] = paramsToArgv(command, params);
  // Commands without sampled randomness carry seed 0.
  manifest["seed"] = params.contains("seed") ? params["seed"] : json(0);
  manifest["tool_version"] = ptrdp::kVersion;
  manifest["timestamp"] = isoTimestamp();
  return manifest;
}

class OutputSink {
 public:
  explicit OutputSink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ptrdp::config_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }

 private:
  std::string path_;
  std::ofstream file_;
};

void writeCsv(std::ostream& out, const json& manifest,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  out << "# manifest: " << manifest.dump() << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
}

void writeJson(std::ostream& out, const json& manifest, const json& result) {
  json doc;
  doc["manifest"] = manifest;
  doc["result"] = result;
  out << doc.dump(2) << "\n";
}

std::vector<double> logSpaced(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) {
    throw ptrdp::config_error("sweep bounds must satisfy 0 < min <= max, count >= 1");
  }
  std::vector<double> out;
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(std::log(lo) + i * step));
  return out;
}

std::vector<int> parseKList(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    ks.push_back(std::stoi(item));
    if (ks.back() < 1) throw ptrdp::config_error("composition counts must be >= 1");
  }
  if (ks.empty()) throw ptrdp::config_error("empty composition list");
  return ks;
}

ptrdp::PtrConfig configFrom(double sigma1, double sigma2, double tau, double b,
                            double delta0) {
  if (tau <= 0.0) tau = sigma2 / sigma1;  // calibrated relation by default
  ptrdp::PtrConfig config{sigma1, sigma2, tau, b, delta0};
  config.validate();
  return config;
}

int dispatch(std::vector<std::string> args, const std::string& out_override,
             const std::string& trace_override = "");

// ---------------------------------------------------------------------------
// rdp-curve

int cmdRdpCurve(std::vector<std::string> args, const std::string& out_path) {
  CLI::App app{"Renyi-DP curve of the propose-test-release mechanism"};
  double sigma1 = 4.0, sigma2 = 2.0, tau = 0.0, b = 1.0, delta0 = 1e-5;
  double alpha = 0.0;
  std::string alpha_range;
  bool optimal = false;
  app.add_option("--sigma1", sigma1);
  app.add_option("--sigma2", sigma2);
  app.add_option("--tau", tau);
  app.add_option("--b", b);
  app.add_option("--delta0", delta0);
  app.add_option("--alpha", alpha, "single order; omit for the default grid");
  app.add_option("--alpha-range", alpha_range, "orders as min:max:step");
  app.add_flag("--optimal-delta0", optimal, "balance the two arms (needs --alpha)");
  app.parse(args);

  if (sigma2 > sigma1) throw ptrdp::config_error("sigma2 must not exceed sigma1");
  double delta0_raw = delta0;
  if (optimal) {
    if (!(alpha > 1.0)) {
      throw ptrdp::config_error("--optimal-delta0 needs a single --alpha");
    }
    const ptrdp::OptimalDelta0 opt = ptrdp::optimal_delta0(sigma1, sigma2, b, alpha);
    delta0 = opt.value;
    delta0_raw = opt.raw;
  }
  const ptrdp::PtrConfig config = configFrom(sigma1, sigma2, tau, b, delta0);
  json params;
  params["sigma1"] = sigma1;
  params["sigma2"] = sigma2;
  params["tau"] = config.tau;
  params["b"] = b;
  params["delta0"] = delta0;
  if (alpha > 0.0) params["alpha"] = alpha;
  if (!alpha_range.empty()) params["alpha-range"] = alpha_range;
  json manifest = makeManifest("rdp-curve", params);
  if (optimal) {
    manifest["delta0_rule"] = "optimal";
    manifest["delta0_raw"] = delta0_raw;
  }

  std::vector<double> grid;
  if (alpha > 0.0) {
    grid.push_back(alpha);
  } else if (!alpha_range.empty()) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::stringstream ss(alpha_range);
    ss >> lo >> c1 >> hi >> c2 >> step;
    if (!ss || c1 != ':' || c2 != ':' || !(lo > 1.0) || !(hi >= lo) || !(step > 0.0)) {
      throw ptrdp::config_error("--alpha-range wants min:max:step with min > 1");
    }
    for (double a = lo; a <= hi + 1e-12; a += step) grid.push_back(a);
  } else {
    grid = ptrdp::default_alpha_grid();
  }
  std::vector<std::vector<std::string>> rows;
  for (double a : grid) {
    const ptrdp::PtrRdpArms arms =
        ptrdp::ptr_rdp_arms(config.sigma1, config.sigma2, config.b, config.delta0, a);
    const double eps_gauss =
        ptrdp::gaussian_rdp_eps(ptrdp::NoiseToSensitivityRatio(config.sigma1), a);
    const double eps_lap =
        ptrdp::laplace_rdp_eps(ptrdp::NoiseToSensitivityRatio(config.b), a);
    const bool mixture = arms.mixture_arm >= arms.composition_arm;
    rows.push_back({fmt12(a), fmt12(std::max(arms.mixture_arm, arms.composition_arm)),
                    fmt12(eps_gauss), fmt12(eps_lap),
                    mixture ? "mixture" : "composition"});
  }
  OutputSink sink(out_path);
  writeCsv(sink.stream(), manifest,
           {"alpha", "eps_ptr", "eps_gauss_large", "eps_lap", "arm_taken"}, rows);
  return 0;
}

// ---------------------------------------------------------------------------
// compare-fig1: direct analysis vs converted RDP across the test-failure
// probability.

int cmdCompareFig1(std::vector<std::string> args, const std::string& out_path) {
  CLI::App app{"direct (eps, delta) analysis vs converted RDP"};
  double sigma1 = 8.0, sigma2 = 4.0, tau = 0.0, b = 0.5, delta = 1e-5;
  double d0_min = 1e-8, d0_max = 5e-6;
  int d0_count = 25;
  app.add_option("--sigma1", sigma1);
  app.add_option("--sigma2", sigma2);
  app.add_option("--tau", tau);
  app.add_option("--b", b);
  app.add_option("--delta", delta);
  app.add_option("--delta0-min", d0_min);
  app.add_option("--delta0-max", d0_max);
  app.add_option("--delta0-count", d0_count);
  app.parse(args);

  if (sigma2 > sigma1) throw ptrdp::config_error("sigma2 must not exceed sigma1");
  if (!(d0_max < delta)) {
    throw ptrdp::config_error("the sweep must stay below the target delta");
  }
  json params;
  params["sigma1"] = sigma1;
  params["sigma2"] = sigma2;
  params["tau"] = tau > 0.0 ? tau : sigma2 / sigma1;
  params["b"] = b;
  params["delta"] = delta;
  params["delta0-min"] = d0_min;
  params["delta0-max"] = d0_max;
  params["delta0-count"] = d0_count;
  const json manifest = makeManifest("compare-fig1", params);

  const std::vector<double> grid = ptrdp::default_alpha_grid();
  std::vector<std::vector<std::string>> rows;
  for (double d0 : logSpaced(d0_min, d0_max, d0_count)) {
    const ptrdp::PtrConfig config = configFrom(sigma1, sigma2, tau, b, d0);
    const double direct = ptrdp::ptr_direct_dp(config, delta - d0, 1.0, 1.0).eps;
    const double converted =
        ptrdp::rdp_to_dp(ptrdp::ptr_rdp_curve(config, grid), delta).tight.eps;
    rows.push_back({fmt12(d0), fmt12(direct), fmt12(converted)});
  }
  OutputSink sink(out_path);
  writeCsv(sink.stream(), manifest, {"delta0", "eps_direct", "eps_from_rdp"}, rows);
  return 0;
}

// ---------------------------------------------------------------------------
// compare-fig2: subsampled bounds per order.

int cmdCompareFig2(std::vector<std::string> args, const std::string& out_path) {
  CLI::App app{"white-box vs black-box vs lower amplification bounds"};
  double q = 0.01, sigma1 = 4.0, sigma2 = 4.0, tau = 0.0, b = 1.0, delta0 = 1e-5;
  int alpha_max = 64;
  app.add_option("--q", q);
  app.add_option("--sigma1", sigma1);
  app.add_option("--sigma2", sigma2);
  app.add_option("--tau", tau);
  app.add_option("--b", b);
  app.add_option("--delta0", delta0);
  app.add_option("--alpha-max", alpha_max);
  app.parse(args);

  if (sigma2 > sigma1) throw ptrdp::config_error("sigma2 must not exceed sigma1");
  if (alpha_max < 2) throw ptrdp::config_error("--alpha-max must be at least 2");
  const ptrdp::PtrConfig config = configFrom(sigma1, sigma2, tau, b, delta0);
  json params;
  params["q"] = q;
  params["sigma1"] = sigma1;
  params["sigma2"] = sigma2;
  params["tau"] = config.tau;
  params["b"] = b;
  params["delta0"] = delta0;
  params["alpha-max"] = alpha_max;
  const json manifest = makeManifest("compare-fig2", params);

  std::vector<double> int_alphas;
  for (int j = 2; j <= alpha_max; ++j) int_alphas.push_back(j);
  const ptrdp::RdpCurve base = ptrdp::ptr_rdp_curve(config, int_alphas);
  const ptrdp::SubsampleParams subsample{q, config};

  std::vector<std::vector<std::string>> rows;
  for (int a = 2; a <= alpha_max; ++a) {
    const bool ok = ptrdp::check_conditions(subsample, a).satisfied;
    const std::string white =
        ok ? fmt12(ptrdp::subsampled_ptr_rdp(subsample, a)) : "";
    rows.push_back({std::to_string(a), white,
                    fmt12(ptrdp::blackbox_subsampled_rdp(base, q, a)),
                    fmt12(ptrdp::subsampled_rdp_lower_bound(base, q, a)),
                    ok ? "true" : "false"});
  }
  OutputSink sink(out_path);
  writeCsv(sink.stream(), manifest,
           {"alpha", "eps_whitebox", "eps_blackbox", "eps_lower", "conditions_ok"},
           rows);
  return 0;
}

// ---------------------------------------------------------------------------
// compose-fig3: accountant composition vs strong composition.

int cmdComposeFig3(std::vector<std::string> args, const std::string& out_path) {
  CLI::App app{"privacy loss across composition rounds"};
  double q = 0.01, sigma1 = 8.0, sigma2 = 8.0, tau = 0.0, b = 2.0;
  double delta0 = 1e-8, delta = 1e-5;
  std::string k_list = "1,2,5,10,20,50,100,200,400,700,1000,1400,2000";
  app.add_option("--q", q);
  app.add_option("--sigma1", sigma1);
  app.add_option("--sigma2", sigma2);
  app.add_option("--tau", tau);
  app.add_option("--b", b);
  app.add_option("--delta0", delta0);
  app.add_option("--delta", delta);
  app.add_option("--k-list", k_list);
  app.parse(args);

  if (sigma2 > sigma1) throw ptrdp::config_error("sigma2 must not exceed sigma1");
  const ptrdp::PtrConfig config = configFrom(sigma1, sigma2, tau, b, delta0);
  const std::vector<int> ks = parseKList(k_list);
  const int k_ref = *std::max_element(ks.begin(), ks.end());
  json params;
  params["q"] = q;
  params["sigma1"] = sigma1;
  params["sigma2"] = sigma2;
  params["tau"] = config.tau;
  params["b"] = b;
  params["delta0"] = delta0;
  params["delta"] = delta;
  params["k-list"] = k_list;
  const json manifest = makeManifest("compose-fig3", params);

  const ptrdp::SubsampleParams subsample{q, config};
  const ptrdp::RdpCurve white =
      ptrdp::subsampled_ptr_rdp_curve(subsample, ptrdp::default_alpha_grid());

  std::vector<double> int_alphas;
  for (int j = 2; j <= 200; ++j) int_alphas.push_back(j);
  const ptrdp::RdpCurve base = ptrdp::ptr_rdp_curve(config, int_alphas);
  std::vector<double> bb_eps;
  for (int j = 2; j <= 200; ++j) {
    bb_eps.push_back(ptrdp::blackbox_subsampled_rdp(base, q, j));
  }
  const ptrdp::RdpCurve black(int_alphas, std::move(bb_eps));

  // Fixed per-step schedule: the delta budget is split once at the largest
  // composition count, so every row composes the same mechanism.
  const double delta_prime = delta / 2.0;
  const double delta_step = delta_prime / static_cast<double>(k_ref);
  const double delta_mech = delta_step / q;
  if (!(delta_mech > delta0)) {
    throw ptrdp::config_error("per-step delta leaves no room above delta0");
  }
  const double eps_direct =
      ptrdp::ptr_direct_dp(config, delta_mech - delta0, 1.0, 1.0).eps;
  const double eps_step = ptrdp::amplify_dp_eps(eps_direct, q);

  std::vector<std::vector<std::string>> rows;
  for (int k : ks) {
    const double wb = ptrdp::rdp_to_dp(white.scaled(k), delta).tight.eps;
    const double bb = ptrdp::rdp_to_dp(black.scaled(k), delta).tight.eps;
    const double sc =
        ptrdp::strong_composition(eps_step, delta_step, k, delta_prime).eps;
    rows.push_back({std::to_string(k), fmt12(wb), fmt12(bb), fmt12(sc)});
  }
  OutputSink sink(out_path);
  writeCsv(sink.stream(), manifest,
           {"k", "eps_whitebox_ma", "eps_blackbox_ma", "eps_strong_composition"}, rows);
  return 0;
}

// ---------------------------------------------------------------------------
// delta-margin

int cmdDeltaMargin(std::vector<std::string> args, const std::string& out_path) {
  CLI::App app{"trimmed-sum sensitivity margin of a vector file"};
  std::string input;
  int f = 1;
  double tau = 0.5, clip_r = 1.0;
  app.add_option("--input", input)->required();
  app.add_option("--trim-f", f);
  app.add_option("--tau", tau);
  app.add_option("--clip-r", clip_r);
  app.parse(args);

  std::ifstream file(input);
  if (!file) throw ptrdp::config_error("cannot open input file: " + input);
  ptrdp::GradientBatch batch;
  batch.clip_bound_r = clip_r;
  std::string line;
  int dim = -1;
  while (std::getline(file, line)) {
    std::stringstream ss(line);
    std::vector<double> v;
    double value;
    while (ss >> value) v.push_back(value);
    if (!ss.eof()) throw ptrdp::config_error("malformed vector line: " + line);
    if (v.empty()) continue;  // blank lines ignored
    if (dim < 0) dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != dim) {
      throw ptrdp::config_error("inconsistent vector dimensions in " + input);
    }
    batch.vectors.push_back(ptrdp::clip(std::move(v), clip_r));
  }
  if (batch.vectors.empty()) throw ptrdp::config_error("input file holds no vectors");
  batch.dim = dim;

  json params;
  params["input"] = input;
  params["trim-f"] = f;
  params["tau"] = tau;
  params["clip-r"] = clip_r;
  const json manifest = makeManifest("delta-margin", params);

  const ptrdp::SensitivityProfile profile{f, tau, clip_r};
  json result;
  result["m"] = batch.vectors.size();
  result["F"] = f;
  result["tau"] = tau;
  json ls = json::array();
  for (int r = 0; r <= f; ++r) {
    ls.push_back(ptrdp::local_sensitivity_r(batch, profile, r));
  }
  result["ls_r"] = ls;
  const double margin = ptrdp::safety_margin(batch, profile);
  if (std::isinf(margin)) {
    result["delta_margin"] = "inf";
  } else {
    result["delta_margin"] = static_cast<int>(margin);
  }
  OutputSink sink(out_path);
  writeJson(sink.stream(), manifest, result);
  return 0;
}

// ---------------------------------------------------------------------------
// train-sim

ptrdp::CorruptionSpec parseCorruption(const std::string& text) {
  ptrdp::CorruptionSpec spec;
  if (text.empty() || text == "none") return spec;
  std::stringstream ss(text);
  std::string kind, ratio, noise;
  std::getline(ss, kind, ':');
  std::getline(ss, ratio, ':');
  spec.kind = ptrdp::corruption_kind_from_name(kind);
  if (!ratio.empty()) spec.ratio = std::stod(ratio);
  if (std::getline(ss, noise, ':') && !noise.empty()) {
    spec.noise_sigma = std::stod(noise);
  }
  spec.validate();
  return spec;
}

struct SimSetup {
  std::string model = "linreg";
  int n = 2000;
  int dim = 10;
  int classes = 2;
  double wstar_norm = 3.0;
  double label_noise = 0.01;
  double center_norm = 2.0;
  std::string corruption = "none";
  ptrdp::TrainConfig config;
};

void applyConfigJson(const json& doc, SimSetup& setup) {
  static const std::vector<std::string> known{
      "schema_version", "model", "n", "dim", "classes", "wstar_norm",
      "label_noise", "center_norm", "corruption", "q", "eta_b", "f_init",
      "f_adapt_frac", "f_min_frac", "f_max_frac", "clip_r", "tau", "sigma",
      "b", "delta0", "t_max", "budget_eps", "budget_delta", "seed",
      "aggregator", "mean_sigma"};
  for (const auto& item : doc.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ptrdp::config_error("unknown config field: " + item.key());
    }
  }
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1) {
    throw ptrdp::config_error("config field: schema_version must be 1");
  }
  auto get = [&](const char* key, auto& slot) {
    if (doc.contains(key)) {
      slot = doc[key].get<std::remove_reference_t<decltype(slot)>>();
    }
  };
  get("model", setup.model);
  get("n", setup.n);
  get("dim", setup.dim);
  get("classes", setup.classes);
  get("wstar_norm", setup.wstar_norm);
  get("label_noise", setup.label_noise);
  get("center_norm", setup.center_norm);
  get("corruption", setup.corruption);
  get("q", setup.config.q);
  get("eta_b", setup.config.eta_b);
  get("f_init", setup.config.f_init);
  get("f_adapt_frac", setup.config.f_adapt_frac);
  get("f_min_frac", setup.config.f_min_frac);
  get("f_max_frac", setup.config.f_max_frac);
  get("clip_r", setup.config.clip_r);
  get("tau", setup.config.tau);
  get("sigma", setup.config.sigma);
  get("b", setup.config.b);
  get("delta0", setup.config.delta0);
  get("t_max", setup.config.t_max);
  get("budget_eps", setup.config.budget.eps);
  get("budget_delta", setup.config.budget.delta);
  get("seed", setup.config.seed);
  get("mean_sigma", setup.config.mean_sigma);
  if (doc.contains("aggregator")) {
    const std::string agg = doc["aggregator"].get<std::string>();
    if (agg == "ptr") {
      setup.config.aggregator = ptrdp::Aggregator::ptr_tmean;
    } else if (agg == "mean") {
      setup.config.aggregator = ptrdp::Aggregator::mean;
    } else {
      throw ptrdp::config_error("config field: aggregator must be ptr or mean");
    }
  }
}

int cmdTrainSim(std::vector<std::string> args, const std::string& out_path,
                const std::string& trace_path) {
  CLI::App app{"private robust SGD simulation"};
  SimSetup setup;
  setup.config.q = 0.05;
  setup.config.eta_b = 1e-3;
  setup.config.f_init = 25;
  setup.config.f_min_frac = 0.2;
  setup.config.f_max_frac = 0.45;
  setup.config.clip_r = 1.0;
  setup.config.tau = 0.25;
  setup.config.sigma = 16.0;
  setup.config.b = 4.0;
  setup.config.delta0 = 0.2;
  setup.config.t_max = 500;
  setup.config.budget = {6.0, 1e-5};
  setup.config.seed = 1;

  std::string config_file, aggregator = "ptr";
  double budget_eps = setup.config.budget.eps;
  double budget_delta = setup.config.budget.delta;
  std::uint64_t seed = setup.config.seed;
  app.add_option("--config", config_file, "JSON configuration file");
  app.add_option("--model", setup.model);
  app.add_option("--n", setup.n);
  app.add_option("--dim", setup.dim);
  app.add_option("--classes", setup.classes);
  app.add_option("--wstar-norm", setup.wstar_norm);
  app.add_option("--label-noise", setup.label_noise);
  app.add_option("--center-norm", setup.center_norm);
  app.add_option("--corruption", setup.corruption, "kind:ratio[:noise_sigma]");
  app.add_option("--q", setup.config.q);
  app.add_option("--eta-b", setup.config.eta_b);
  app.add_option("--f-init", setup.config.f_init);
  app.add_option("--f-adapt-frac", setup.config.f_adapt_frac);
  app.add_option("--f-min-frac", setup.config.f_min_frac);
  app.add_option("--f-max-frac", setup.config.f_max_frac);
  app.add_option("--clip-r", setup.config.clip_r);
  app.add_option("--tau", setup.config.tau);
  app.add_option("--sigma", setup.config.sigma);
  app.add_option("--b", setup.config.b);
  app.add_option("--delta0", setup.config.delta0);
  app.add_option("--t-max", setup.config.t_max);
  app.add_option("--budget-eps", budget_eps);
  app.add_option("--budget-delta", budget_delta);
  app.add_option("--seed", seed);
  app.add_option("--aggregator", aggregator, "ptr or mean");
  app.add_option("--mean-sigma", setup.config.mean_sigma);
  app.parse(args);

  if (!config_file.empty()) {
    std::ifstream file(config_file);
    if (!file) throw ptrdp::config_error("cannot open config file: " + config_file);
    json doc;
    try {
      doc = json::parse(file);
    } catch (const json::exception& e) {
      throw ptrdp::config_error(std::string("config parse failure: ") + e.what());
    }
    applyConfigJson(doc, setup);
  } else {
    setup.config.budget = {budget_eps, budget_delta};
    setup.config.seed = seed;
    if (aggregator == "ptr") {
      setup.config.aggregator = ptrdp::Aggregator::ptr_tmean;
    } else if (aggregator == "mean") {
      setup.config.aggregator = ptrdp::Aggregator::mean;
    } else {
      throw ptrdp::config_error("--aggregator must be ptr or mean");
    }
  }
  const ptrdp::CorruptionSpec corruption = parseCorruption(setup.corruption);
  setup.config.validate();

  json params;
  params["model"] = setup.model;
  params["n"] = setup.n;
  params["dim"] = setup.dim;
  params["classes"] = setup.classes;
  params["wstar-norm"] = setup.wstar_norm;
  params["label-noise"] = setup.label_noise;
  params["center-norm"] = setup.center_norm;
  params["corruption"] = setup.corruption.empty() ? "none" : setup.corruption;
  params["q"] = setup.config.q;
  params["eta-b"] = setup.config.eta_b;
  params["f-init"] = setup.config.f_init;
  params["f-adapt-frac"] = setup.config.f_adapt_frac;
  params["f-min-frac"] = setup.config.f_min_frac;
  params["f-max-frac"] = setup.config.f_max_frac;
  params["clip-r"] = setup.config.clip_r;
  params["tau"] = setup.config.tau;
  params["sigma"] = setup.config.sigma;
  params["b"] = setup.config.b;
  params["delta0"] = setup.config.delta0;
  params["t-max"] = setup.config.t_max;
  params["budget-eps"] = setup.config.budget.eps;
  params["budget-delta"] = setup.config.budget.delta;
  params["seed"] = setup.config.seed;
  params["aggregator"] =
      setup.config.aggregator == ptrdp::Aggregator::ptr_tmean ? "ptr" : "mean";
  params["mean-sigma"] = setup.config.mean_sigma;
  const json manifest = makeManifest("train-sim", params);

  ptrdp::Rng data_rng = ptrdp::Rng(setup.config.seed).fork(1337);
  ptrdp::SimDataset data;
  std::unique_ptr<ptrdp::Model> model;
  if (setup.model == "linreg") {
    data = ptrdp::make_regression_data(setup.n, setup.dim, setup.wstar_norm,
                                       setup.label_noise, data_rng);
    model = std::make_unique<ptrdp::LinearRegressionModel>();
  } else if (setup.model == "logreg") {
    data = ptrdp::make_blob_classification_data(setup.n, setup.dim, setup.classes,
                                                setup.center_norm, data_rng);
    model = std::make_unique<ptrdp::LogisticRegressionModel>();
  } else {
    throw ptrdp::config_error("--model must be linreg or logreg");
  }

  const ptrdp::TrainReport report =
      ptrdp::train(*model, data, setup.config, corruption);

  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw ptrdp::config_error("cannot open trace file: " + trace_path);
    std::vector<std::vector<std::string>> rows;
    for (const auto& rec : report.trace) {
      rows.push_back({std::to_string(rec.iter), fmt12(rec.loss),
                      std::string(1, static_cast<char>(rec.branch)),
                      std::to_string(rec.f), fmt12(rec.eps_so_far)});
    }
    writeCsv(trace, manifest, {"iter", "loss", "branch", "F", "eps_so_far"}, rows);
  }

  json result;
  result["iterations"] = report.trace.size();
  result["steps_charged"] = report.steps_charged;
  result["stopped_on_budget"] = report.stopped_on_budget;
  result["final_eps"] = report.final_guarantee.eps;
  result["final_delta"] = report.final_guarantee.delta;
  result["final_loss"] = report.trace.empty() ? 0.0 : report.trace.back().loss;
  int plus = 0, minus = 0, degenerate = 0;
  for (const auto& rec : report.trace) {
    if (rec.branch == ptrdp::StepBranch::plus) ++plus;
    if (rec.branch == ptrdp::StepBranch::minus) ++minus;
    if (rec.branch == ptrdp::StepBranch::degenerate) ++degenerate;
  }
  result["branch_plus"] = plus;
  result["branch_minus"] = minus;
  result["branch_degenerate"] = degenerate;
  result["final_f"] =
      report.trace.empty() ? setup.config.f_init : report.trace.back().f;
  OutputSink sink(out_path);
  writeJson(sink.stream(), manifest, result);
  return 0;
}

// ---------------------------------------------------------------------------
// audit

struct AuditScenario {
  ptrdp::AdjacentPair pair;
  ptrdp::PtrConfig config;
  std::unique_ptr<ptrdp::TrimmedSumOracle> oracle;
};

AuditScenario makeScenario(const std::string& name) {
  AuditScenario sc;
  auto dataset = [](std::initializer_list<double> values) {
    ptrdp::Dataset d;
    for (double v : values) d.push_back({v});
    return d;
  };
  if (name == "identical") {
    sc.pair = {dataset({0.2, 0.4, 0.6, 1.0}), dataset({0.2, 0.4, 0.6, 1.0})};
    sc.config = ptrdp::PtrConfig{4.0, 2.0, 0.5, 1.0, 0.05};
    sc.oracle = std::make_unique<ptrdp::TrimmedSumOracle>(1, 1.0, 2);
  } else if (name == "degenerate-gaussian") {
    // No trimming and tau at the clip bound: the margin is infinite and the
    // mechanism degenerates to one Gaussian release at unit distance.
    sc.pair = {dataset({0.3}), dataset({0.3, 1.0})};
    sc.config = ptrdp::PtrConfig{4.0, 4.0, 1.0, 1.0, 0.05};
    sc.oracle = std::make_unique<ptrdp::TrimmedSumOracle>(1, 1.0, 0);
  } else if (name == "trimmed-worst") {
    // Adjacent pair differing by a max-norm point whose trimmed sums differ
    // by more than tau: the low-noise branch is exercised at its worst case.
    sc.pair = {dataset({0.2, 0.4, 0.6, 1.0}), dataset({0.2, 0.4, 0.6, 1.0, 1.0})};
    sc.config = ptrdp::PtrConfig{4.0, 2.0, 0.5, 1.0, 0.05};
    sc.oracle = std::make_unique<ptrdp::TrimmedSumOracle>(1, 1.0, 2);
  } else {
    throw ptrdp::config_error("unknown audit scenario: " + name);
  }
  return sc;
}

int cmdAudit(std::vector<std::string> args, const std::string& out_path) {
  CLI::App app{"empirical Renyi moment audit against the analytic bound"};
  std::string scenario = "trimmed-worst";
  double alpha = 2.0;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 1;
  app.add_option("--scenario", scenario,
                 "identical | degenerate-gaussian | trimmed-worst");
  app.add_option("--alpha", alpha);
  app.add_option("--samples", samples);
  app.add_option("--seed", seed);
  app.parse(args);

  AuditScenario sc = makeScenario(scenario);
  json params;
  params["scenario"] = scenario;
  params["alpha"] = alpha;
  params["samples"] = samples;
  params["seed"] = seed;
  const json manifest = makeManifest("audit", params);

  ptrdp::Rng rng(seed);
  const ptrdp::MomentEstimate est = ptrdp::empirical_renyi_moment(
      sc.pair, sc.config, *sc.oracle, alpha, samples, rng);
  const double bound = ptrdp::f_alpha(ptrdp::ptr_rdp(sc.config, alpha), alpha);
  const double rel_se = est.std_error / std::max(est.estimate, 1e-300);
  const bool pass = est.estimate <= bound * (1.0 + 5.0 * rel_se);

  json result;
  result["estimate"] = est.estimate;
  result["stderr"] = est.std_error;
  result["analytic_bound"] = bound;
  result["pass"] = pass;
  OutputSink sink(out_path);
  writeJson(sink.stream(), manifest, result);
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// rerun

json extractManifest(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ptrdp::config_error("cannot open file: " + path);
  std::string first;
  std::getline(file, first);
  const std::string prefix = "# manifest: ";
  try {
    if (first.rfind(prefix, 0) == 0) {
      return json::parse(first.substr(prefix.size()));
    }
    file.seekg(0);
    json doc = json::parse(file);
    if (doc.contains("manifest")) return doc["manifest"];
  } catch (const json::exception& e) {
    throw ptrdp::config_error(std::string("manifest parse failure: ") + e.what());
  }
  throw ptrdp::config_error("no manifest found in " + path);
}

int cmdRerun(std::vector<std::string> args, const std::string& out_path,
             const std::string& trace_path) {
  CLI::App app{"re-execute the command embedded in an output file"};
  std::string from;
  app.add_option("--from", from)->required();
  app.parse(args);
  const json manifest = extractManifest(from);
  std::vector<std::string> argv;
  for (const auto& item : manifest["argv"]) argv.push_back(item.get<std::string>());
  return dispatch(std::move(argv), out_path, trace_path);
}

// ---------------------------------------------------------------------------

int dispatch(std::vector<std::string> args, const std::string& out_override,
             const std::string& trace_override) {
  if (args.empty()) {
    std::cerr << "usage: ptr_accountant <command> [options]\n"
              << "commands: rdp-curve compare-fig1 compare-fig2 compose-fig3\n"
              << "          delta-margin train-sim audit rerun\n";
    return kExitUsage;
  }
  const std::string command = args.front();
  std::vector<std::string> rest(args.begin() + 1, args.end());

  // Pull output destinations out before the per-command parser runs.
  std::string out = out_override, trace_out = trace_override;
  for (std::size_t i = 0; i < rest.size();) {
    if ((rest[i] == "--out" || rest[i] == "-o") && i + 1 < rest.size()) {
      out = rest[i + 1];
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i),
                 rest.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (rest[i] == "--trace-out" && i + 1 < rest.size()) {
      trace_out = rest[i + 1];
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i),
                 rest.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else {
      ++i;
    }
  }
  // CLI11 consumes the argument vector back to front.
  std::reverse(rest.begin(), rest.end());

  if (command == "rdp-curve") return cmdRdpCurve(std::move(rest), out);
  if (command == "compare-fig1") return cmdCompareFig1(std::move(rest), out);
  if (command == "compare-fig2") return cmdCompareFig2(std::move(rest), out);
  if (command == "compose-fig3") return cmdComposeFig3(std::move(rest), out);
  if (command == "delta-margin") return cmdDeltaMargin(std::move(rest), out);
  if (command == "train-sim") return cmdTrainSim(std::move(rest), out, trace_out);
  if (command == "audit") return cmdAudit(std::move(rest), out);
  if (command == "rerun") return cmdRerun(std::move(rest), out, trace_out);
  std::cerr << "unknown command: " << command << "\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(std::move(args), "");
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const ptrdp::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ptrdp::bound_not_applicable& e) {
    std::cerr << "bound not applicable: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ptrdp::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
