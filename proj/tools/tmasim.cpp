// tmasim: simulate threshold moving-average processes with feedback, compute
// their closed-form stationary construction and analytic ACF/moment formulas,
// and verify the stationarity/uniqueness/decay properties empirically.
//
// One model JSON in, CSV/JSON out. Exit codes: 0 success, 2 invalid input,
// 3 verification failure, 4 numeric refusal (delta estimate too close to 1).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tma/analytics.hpp"
#include "tma/estimate.hpp"
#include "tma/io_util.hpp"
#include "tma/model_io.hpp"
#include "tma/stationary.hpp"
#include "tma/verify.hpp"

namespace {

using nlohmann::json;

struct Column {
  std::string name;
  std::vector<double> values;
  bool integral = false;
};

std::string meta_block(const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string s = "# tmasim " + std::string(tma::kVersion) + "\n";
  for (const auto& [k, v] : meta) s += "# " + k + "=" + v + "\n";
  return s;
}

std::string table_csv(const std::vector<std::pair<std::string, std::string>>& meta,
                      const std::vector<Column>& cols) {
  std::string s = meta_block(meta);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    s += cols[c].name;
    s += (c + 1 < cols.size()) ? ',' : '\n';
  }
  const std::size_t rows = cols.empty() ? 0 : cols.front().values.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = cols[c].values[r];
      s += cols[c].integral ? std::to_string(static_cast<long long>(v))
                            : tma::fmt_double(v);
      s += (c + 1 < cols.size()) ? ',' : '\n';
    }
  }
  return s;
}

json table_json(const std::vector<std::pair<std::string, std::string>>& meta,
                const std::vector<Column>& cols) {
  json m;
  m["version"] = tma::kVersion;
  for (const auto& [k, v] : meta) m[k] = v;
  json columns;
  for (const auto& col : cols) {
    if (col.integral) {
      std::vector<long long> iv(col.values.begin(), col.values.end());
      columns[col.name] = iv;
    } else {
      columns[col.name] = col.values;
    }
  }
  return json{{"meta", m}, {"columns", columns}};
}

void write_table(const std::string& out, const std::string& format,
                 const std::vector<std::pair<std::string, std::string>>& meta,
                 const std::vector<Column>& cols) {
  if (format == "json") {
    tma::atomic_write_file(out, table_json(meta, cols).dump(2) + "\n");
  } else {
    tma::atomic_write_file(out, table_csv(meta, cols));
  }
}

tma::TmaModel builtin_eq31() {
  tma::TmaModel m;
  m.mu1 = 5.0;
  m.mu2 = -3.0;
  m.phi = {0.2};
  m.psi = {0.8};
  m.d = 1;
  m.r = 0.5;
  m.innovation = tma::Innovation::standard_normal();
  return m;
}

struct GridSpec {
  double lo, hi, step;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g{};
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &g.lo, &g.hi, &g.step) != 3 ||
      !(g.step > 0.0) || g.hi < g.lo) {
    throw tma::ModelFormatError("bad --grid, expected lo:hi:step with step > 0");
  }
  return g;
}

std::vector<std::size_t> parse_lags(const std::string& text) {
  std::vector<std::size_t> lags;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    lags.push_back(static_cast<std::size_t>(std::stoull(text.substr(pos, next - pos))));
    pos = next + 1;
  }
  if (lags.empty()) throw tma::ModelFormatError("bad --lags, expected k1,k2,...");
  return lags;
}

json delta_json(const tma::DeltaEstimate& d) {
  return json{{"value", d.value}, {"se", d.se}, {"exact", d.exact},
              {"samples", d.samples}};
}

constexpr std::size_t kAuto = static_cast<std::size_t>(-1);

std::size_t resolve_burn_in(const tma::TmaModel& model, std::size_t requested,
                            const tma::DeltaEstimate& delta) {
  if (requested != kAuto) return requested;
  return tma::default_burn_in(tma::structural_m(model.d, model.q()), delta.value);
}

int run(int argc, char** argv) {
  CLI::App app{"threshold moving-average simulation and verification"};
  app.require_subcommand(1);

  std::string model_file;
  std::string out = "tmasim_out.csv";
  std::string format = "csv";
  std::uint64_t seed = 1;
  std::size_t n = 10'000;
  std::size_t burn_in = kAuto;
  std::size_t max_lag = 50;

  auto add_common = [&](CLI::App* cmd, bool needs_model) {
    if (needs_model) {
      cmd->add_option("--model", model_file, "model JSON file")->required();
    }
    cmd->add_option("--seed", seed, "run seed (all substreams derive from it)");
    cmd->add_option("--out", out, "output file");
    cmd->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a path (CSV + JSON sidecar)");
  std::string method = "recursive";
  add_common(sim, true);
  sim->add_option("--n", n, "path length");
  sim->add_option("--burn-in", burn_in, "burn-in steps (default: auto rule)");
  sim->add_option("--method", method, "recursive|closed-form")
      ->check(CLI::IsMember({"recursive", "closed-form"}));

  // theory
  auto* theory = app.add_subcommand(
      "theory", "closed-form ACF (lag,rho_analytic) or skew/kurt grid");
  std::string grid_text;
  std::size_t mc_samples = 10'000'000;
  add_common(theory, true);
  theory->add_option("--max-lag", max_lag, "largest lag for the analytic ACF");
  theory->add_option("--grid", grid_text, "r-grid lo:hi:step for the moment curves");
  theory->add_option("--mc-samples", mc_samples,
                     "MC samples for non-normal convolution probabilities");

  // acf
  auto* acf = app.add_subcommand("acf", "sample ACF of a simulated path");
  add_common(acf, true);
  acf->add_option("--n", n, "path length");
  acf->add_option("--burn-in", burn_in, "burn-in steps (default: auto rule)");
  acf->add_option("--max-lag", max_lag, "largest lag");

  // moments
  auto* moments = app.add_subcommand("moments", "sample moments with batch-means SEs");
  add_common(moments, true);
  moments->add_option("--n", n, "path length");
  moments->add_option("--burn-in", burn_in, "burn-in steps (default: auto rule)");

  // decay
  auto* decay = app.add_subcommand(
      "decay", "joint-dependence decay over replicate paths");
  std::size_t replicates = 100'000;
  std::string lags_text = "auto";
  double dep_u = std::numeric_limits<double>::quiet_NaN();
  double dep_v = std::numeric_limits<double>::quiet_NaN();
  add_common(decay, true);
  decay->add_option("--replicates", replicates, "independent replicate paths (>= 1e5)");
  decay->add_option("--lags", lags_text, "comma-separated lags, or 'auto'");
  decay->add_option("--u", dep_u, "first threshold (default: model r)");
  decay->add_option("--v", dep_v, "second threshold (default: model r)");
  decay->add_option("--burn-in", burn_in, "per-replicate burn-in (default: auto rule)");

  // figure
  auto* figure = app.add_subcommand("figure", "reproduce the moment curves / slow-decay ACF data");
  std::string which;
  figure->add_option("which", which, "fig1|fig2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));
  add_common(figure, false);
  figure->add_option("--grid", grid_text, "fig1 r-grid lo:hi:step (default -6:8:0.05)");
  figure->add_option("--n", n, "fig2 path length (default 1e4)");
  figure->add_option("--max-lag", max_lag, "fig2 largest lag");

  // verify
  auto* verify = app.add_subcommand("verify", "run the property-level verification battery");
  std::string path_file;
  std::size_t dep_replicates = 100'000;
  add_common(verify, true);
  verify->add_option("--path", path_file, "check an existing path CSV instead");
  verify->add_option("--replicates", dep_replicates, "dependence-decay replicates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (sim->parsed()) {
    const tma::TmaModel model = tma::load_model_file(model_file);
    const tma::DeltaEstimate delta = tma::contraction_delta(model, 1'000'000, seed);
    json sidecar{{"seed", seed},
                 {"model_hash", tma::model_hash_hex(model)},
                 {"method", method},
                 {"n", n},
                 {"delta_estimate", delta_json(delta)},
                 {"version", tma::kVersion},
                 {"model", tma::model_to_json(model)}};
    std::vector<Column> cols;
    std::vector<std::pair<std::string, std::string>> meta{
        {"model_hash", tma::model_hash_hex(model)},
        {"seed", std::to_string(seed)},
        {"method", method}};
    if (method == "recursive") {
      const std::size_t burn = resolve_burn_in(model, burn_in, delta);
      const tma::SeriesPath path = tma::simulate_recursive(model, n, burn, {}, seed);
      sidecar["burn_in"] = burn;
      meta.emplace_back("burn_in", std::to_string(burn));
      Column idx{"index", {}, true}, e{"e", {}}, y{"y", {}};
      for (std::size_t i = 0; i < path.values.size(); ++i) {
        idx.values.push_back(static_cast<double>(i + 1));
        e.values.push_back(path.innovations[i + model.q()]);
        y.values.push_back(path.values[i]);
      }
      cols = {idx, e, y};
    } else {
      tma::ClosedFormOptions cfo;
      cfo.delta = delta;
      const tma::ClosedFormResult cf = tma::simulate_closed_form(model, n, seed, cfo);
      sidecar["burn_in"] = 0;
      sidecar["K"] = cf.truncation_k;
      sidecar["tail_bound"] = cf.alpha.tail_bound;
      meta.emplace_back("K", std::to_string(cf.truncation_k));
      Column idx{"index", {}, true}, e{"e", {}}, y{"y", {}}, al{"alpha", {}, true};
      for (std::size_t i = 0; i < cf.path.values.size(); ++i) {
        idx.values.push_back(static_cast<double>(i + 1));
        e.values.push_back(cf.path.innovations[i + model.q()]);
        y.values.push_back(cf.path.values[i]);
        al.values.push_back(cf.path.alpha[i]);
      }
      cols = {idx, e, y, al};
    }
    write_table(out, format, meta, cols);
    tma::atomic_write_file(out + ".meta.json", sidecar.dump(2) + "\n");
    return 0;
  }

  if (theory->parsed()) {
    const tma::TmaModel model = tma::load_model_file(model_file);
    std::vector<std::pair<std::string, std::string>> meta{
        {"model_hash", tma::model_hash_hex(model)},
        {"seed", std::to_string(seed)}};
    if (!grid_text.empty()) {
      if (!tma::is_ex31_shape(model)) {
        throw tma::ModelFormatError(
            "theory --grid needs the q=0, d=1 shape (moment curves vary r)");
      }
      const GridSpec g = parse_grid(grid_text);
      meta.emplace_back("grid", grid_text);
      Column r{"r", {}}, sk{"skewness", {}}, ku{"kurtosis", {}};
      for (std::size_t i = 0;; ++i) {
        const double rv = g.lo + static_cast<double>(i) * g.step;
        if (rv > g.hi + 1e-12) break;
        const tma::SkewKurt s =
            tma::ex31_skewness_kurtosis(model.mu1, model.mu2, rv, model.innovation);
        r.values.push_back(rv);
        sk.values.push_back(s.skewness);
        ku.values.push_back(s.kurtosis);
      }
      write_table(out, format, meta, {r, sk, ku});
      return 0;
    }
    Column lag{"lag", {}, true}, rho{"rho_analytic", {}};
    if (tma::is_ex31_shape(model)) {
      const tma::Ex31Constants c =
          tma::ex31_constants(model.mu1, model.mu2, model.r, model.innovation);
      const auto values = tma::ex31_acf_range(max_lag, c, model.mu1, model.mu2);
      for (std::size_t k = 1; k <= max_lag; ++k) {
        lag.values.push_back(static_cast<double>(k));
        rho.values.push_back(values[k - 1]);
      }
    } else if (tma::is_ex32_shape(model)) {
      const tma::Ex32Acf1 a1 = tma::ex32_acf1(model.phi[0], model.psi[0], model.r,
                                              model.innovation, mc_samples, seed);
      for (std::size_t k = 1; k <= max_lag; ++k) {
        lag.values.push_back(static_cast<double>(k));
        rho.values.push_back(k == 1 ? a1.value : 0.0);  // cut-off after lag q
      }
    } else {
      throw tma::ModelFormatError(
          "no closed-form ACF for this model shape; use 'acf' (simulation)");
    }
    write_table(out, format, meta, {lag, rho});
    return 0;
  }

  if (acf->parsed()) {
    const tma::TmaModel model = tma::load_model_file(model_file);
    const tma::DeltaEstimate delta = tma::contraction_delta(model, 1'000'000, seed);
    const std::size_t burn = resolve_burn_in(model, burn_in, delta);
    const tma::SeriesPath path = tma::simulate_recursive(model, n, burn, {}, seed);
    tma::AcfReport report = tma::sample_acf(path, max_lag);
    json summary{{"n", report.n}, {"band", report.band},
                 {"seed", seed}, {"model_hash", tma::model_hash_hex(model)},
                 {"version", tma::kVersion},
                 {"rate", nullptr}, {"r2", nullptr}, {"lag_range", nullptr}};
    try {
      const tma::DecayFit fit = tma::fit_decay(report, {1, max_lag});
      report.decay_fit = fit;
      summary["rate"] = fit.rate;
      summary["r2"] = fit.r2;
      summary["lag_range"] = {fit.lag_range.first, fit.lag_range.second};
    } catch (const std::invalid_argument&) {
      // not enough usable lags; summary keeps nulls
    }
    Column lag{"lag", {}, true}, value{"value", {}}, se{"se", {}}, band{"band", {}};
    for (std::size_t i = 0; i < report.lags.size(); ++i) {
      lag.values.push_back(static_cast<double>(report.lags[i]));
      value.values.push_back(report.rho_hat[i]);
      se.values.push_back(report.se());
      band.values.push_back(report.band);
    }
    write_table(out, format,
                {{"model_hash", tma::model_hash_hex(model)},
                 {"seed", std::to_string(seed)},
                 {"n", std::to_string(n)},
                 {"burn_in", std::to_string(burn)}},
                {lag, value, se, band});
    tma::atomic_write_file(out + ".summary.json", summary.dump(2) + "\n");
    return 0;
  }

  if (moments->parsed()) {
    const tma::TmaModel model = tma::load_model_file(model_file);
    const tma::DeltaEstimate delta = tma::contraction_delta(model, 1'000'000, seed);
    const std::size_t burn = resolve_burn_in(model, burn_in, delta);
    const tma::SeriesPath path = tma::simulate_recursive(model, n, burn, {}, seed);
    const tma::Moments mom = tma::sample_moments(path.values);
    json j{{"mean", mom.mean},         {"variance", mom.variance},
           {"skewness", mom.skewness}, {"kurtosis", mom.kurtosis},
           {"se_mean", mom.se_mean},   {"se_variance", mom.se_variance},
           {"se_skewness", mom.se_skewness}, {"se_kurtosis", mom.se_kurtosis},
           {"batches", mom.batches},   {"n", n},
           {"burn_in", burn},          {"seed", seed},
           {"model_hash", tma::model_hash_hex(model)}, {"version", tma::kVersion}};
    tma::atomic_write_file(out, j.dump(2) + "\n");
    return 0;
  }

  if (decay->parsed()) {
    const tma::TmaModel model = tma::load_model_file(model_file);
    const double u = std::isnan(dep_u) ? model.r : dep_u;
    const double v = std::isnan(dep_v) ? model.r : dep_v;
    const tma::DeltaEstimate delta = tma::contraction_delta(model, 1'000'000, seed);
    std::vector<std::size_t> lags;
    if (lags_text == "auto") {
      const int m = tma::structural_m(model.d, model.q());
      const double scale =
          (m + 1.0) * model.d / std::max(1e-3, 1.0 - delta.upper(3.0));
      const std::size_t top = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::ceil(3.0 * scale)), 10, 2500);
      const std::size_t step = std::max<std::size_t>(1, top / 15);
      for (std::size_t k = step; k <= top; k += step) lags.push_back(k);
    } else {
      lags = parse_lags(lags_text);
    }
    const std::size_t burn = resolve_burn_in(model, burn_in, delta);
    const tma::DependenceReport report =
        tma::dependence_decay(model, u, v, lags, replicates, seed, burn);
    json summary{{"replicates", replicates}, {"u", u}, {"v", v},
                 {"seed", seed}, {"model_hash", tma::model_hash_hex(model)},
                 {"version", tma::kVersion},
                 {"rate", nullptr}, {"r2", nullptr}, {"lag_range", nullptr}};
    try {
      const tma::DecayFit fit =
          tma::fit_decay(report, {1, report.lags.back()});
      summary["rate"] = fit.rate;
      summary["r2"] = fit.r2;
      summary["lag_range"] = {fit.lag_range.first, fit.lag_range.second};
    } catch (const std::invalid_argument&) {
    }
    Column lag{"lag", {}, true}, depc{"dep", {}}, sec{"se", {}};
    for (std::size_t i = 0; i < report.lags.size(); ++i) {
      lag.values.push_back(static_cast<double>(report.lags[i]));
      depc.values.push_back(report.dep[i]);
      sec.values.push_back(report.se[i]);
    }
    write_table(out, format,
                {{"model_hash", tma::model_hash_hex(model)},
                 {"seed", std::to_string(seed)},
                 {"replicates", std::to_string(replicates)},
                 {"burn_in", std::to_string(burn)},
                 {"u", tma::fmt_double(u)},
                 {"v", tma::fmt_double(v)}},
                {lag, depc, sec});
    tma::atomic_write_file(out + ".summary.json", summary.dump(2) + "\n");
    return 0;
  }

  if (figure->parsed()) {
    if (which == "fig1") {
      const GridSpec g = parse_grid(grid_text.empty() ? "-6:8:0.05" : grid_text);
      const tma::Innovation normal = tma::Innovation::standard_normal();
      Column r{"r", {}}, sk{"skewness", {}}, ku{"kurtosis", {}};
      for (std::size_t i = 0;; ++i) {
        const double rv = g.lo + static_cast<double>(i) * g.step;
        if (rv > g.hi + 1e-12) break;
        const tma::SkewKurt s = tma::ex31_skewness_kurtosis(4.0, -1.0, rv, normal);
        r.values.push_back(rv);
        sk.values.push_back(s.skewness);
        ku.values.push_back(s.kurtosis);
      }
      write_table(out, format,
                  {{"figure", "fig1"},
                   {"mu1", "4"},
                   {"mu2", "-1"},
                   {"seed", std::to_string(seed)},
                   {"grid", grid_text.empty() ? "-6:8:0.05" : grid_text}},
                  {r, sk, ku});
      return 0;
    }
    // fig2: sample ACF of the near-long-memory model at n = 1e4
    const tma::TmaModel model = builtin_eq31();
    const tma::DeltaEstimate delta = tma::contraction_delta(model, 1'000'000, seed);
    const std::size_t burn = resolve_burn_in(model, kAuto, delta);
    const tma::SeriesPath path = tma::simulate_recursive(model, n, burn, {}, seed);
    const tma::AcfReport report = tma::sample_acf(path, max_lag);
    Column lag{"lag", {}, true}, value{"value", {}}, se{"se", {}}, band{"band", {}};
    for (std::size_t i = 0; i < report.lags.size(); ++i) {
      lag.values.push_back(static_cast<double>(report.lags[i]));
      value.values.push_back(report.rho_hat[i]);
      se.values.push_back(report.se());
      band.values.push_back(report.band);
    }
    write_table(out, format,
                {{"figure", "fig2"},
                 {"model_hash", tma::model_hash_hex(model)},
                 {"seed", std::to_string(seed)},
                 {"n", std::to_string(n)},
                 {"burn_in", std::to_string(burn)}},
                {lag, value, se, band});
    return 0;
  }

  if (verify->parsed()) {
    const tma::TmaModel model = tma::load_model_file(model_file);
    if (!path_file.empty()) {
      const tma::CsvTable table = tma::read_csv(path_file);
      std::size_t e_col = table.header.size(), y_col = table.header.size();
      for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == "e") e_col = i;
        if (table.header[i] == "y") y_col = i;
      }
      if (e_col == table.header.size() || y_col == table.header.size()) {
        throw tma::ModelFormatError("path csv must have 'e' and 'y' columns");
      }
      const tma::CheckResult c = tma::verify_path_rows(model, table.rows, e_col, y_col);
      std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                  c.detail.c_str());
      return c.passed ? 0 : 3;
    }
    tma::VerifyOptions vo;
    vo.seed = seed;
    vo.dep_replicates = dep_replicates;
    const tma::VerificationReport report = tma::run_verification(model, vo);
    json checks = json::array();
    for (const auto& c : report.checks) {
      std::printf("[%s] %s: %s\n",
                  !c.applicable ? "SKIP" : (c.passed ? "PASS" : "FAIL"),
                  c.name.c_str(), c.detail.c_str());
      checks.push_back(json{{"name", c.name}, {"passed", c.passed},
                            {"applicable", c.applicable}, {"measured", c.measured},
                            {"threshold", c.threshold}, {"detail", c.detail}});
    }
    if (verify->count("--out") > 0) {
      tma::atomic_write_file(
          out, json{{"model_hash", tma::model_hash_hex(model)}, {"seed", seed},
                    {"version", tma::kVersion}, {"checks", checks},
                    {"all_passed", report.all_passed()}}.dump(2) + "\n");
    }
    return report.all_passed() ? 0 : 3;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tma::NumericRefusal& e) {
    std::cerr << "numeric refusal: " << e.what() << "\n";
    return 4;
  } catch (const tma::ModelFormatError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
