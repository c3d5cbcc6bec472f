#include "rbanova/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rbanova/io.hpp"

namespace rbanova {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long to_long(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

// simple '#'-comment value files: one float64 per non-comment line
void write_value_file(const fs::path& path, const std::vector<std::string>& header,
                      const Eigen::VectorXd& values) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  for (const auto& line : header) os << "# " << line << '\n';
  for (Eigen::Index i = 0; i < values.size(); ++i) os << format_full(values[i]) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Eigen::VectorXd read_value_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing file: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    values.push_back(to_double(t, path.string()));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct ProblemSetup {
  UniformGrid grid;
  KlExpansion kl;
  AffineOperatorFamily ops;
  SensorSet sensors;
};

ProblemSetup make_setup(const ExperimentConfig& c, int grid_n) {
  UniformGrid grid(grid_n);
  KlExpansion kl = build_kl({c.kl_sigma, c.kl_alpha}, grid, c.kl_fraction, c.kl_mean);
  AffineOperatorFamily ops = assemble_affine(grid, kl);
  return {grid, std::move(kl), std::move(ops), SensorSet::tensor_grid(c.sensors_per_side)};
}

// actual permeability field on the analysis grid; with refined data
// generation the fine-grid truth is restricted to the coarse nodes
Eigen::VectorXd actual_field(const ExperimentConfig& c, const Eigen::VectorXd& xi_true,
                             const UniformGrid& grid) {
  if (!c.data_refine) {
    KlExpansion kl = build_kl({c.kl_sigma, c.kl_alpha}, grid, c.kl_fraction, c.kl_mean);
    if (xi_true.size() != kl.n_modes())
      throw std::runtime_error("truth file does not match the configured KL expansion");
    return evaluate_field_unchecked(kl, xi_true);
  }
  UniformGrid fine(2 * grid.n());
  KlExpansion klf = build_kl({c.kl_sigma, c.kl_alpha}, fine, c.kl_fraction, c.kl_mean);
  if (xi_true.size() != klf.n_modes())
    throw std::runtime_error("truth file does not match the refined KL expansion");
  const Eigen::VectorXd full = evaluate_field_unchecked(klf, xi_true);
  Eigen::VectorXd coarse(grid.total_nodes());
  for (int iy = 0; iy <= grid.n(); ++iy)
    for (int ix = 0; ix <= grid.n(); ++ix)
      coarse[grid.node_id(ix, iy)] = full[fine.node_id(2 * ix, 2 * iy)];
  return coarse;
}

FieldEstimate prefix_moments(const Chain& chain, const KlExpansion& kl, long n) {
  Chain head;
  head.states.assign(chain.states.begin(), chain.states.begin() + n);
  head.accepted.assign(chain.accepted.begin(), chain.accepted.begin() + n);
  return field_moments(head, kl);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: empty key or value in '" + t + "'");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("config: duplicate key " + key);
  }

  ExperimentConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "grid.n") c.grid_n = static_cast<int>(to_long(value, key));
    else if (key == "kl.alpha") c.kl_alpha = to_double(value, key);
    else if (key == "kl.sigma") c.kl_sigma = to_double(value, key);
    else if (key == "kl.fraction") c.kl_fraction = to_double(value, key);
    else if (key == "kl.mean") c.kl_mean = to_double(value, key);
    else if (key == "noise.sigma") c.noise_sigma = to_double(value, key);
    else if (key == "proposal.step") c.proposal_step = to_double(value, key);
    else if (key == "mcmc.n") c.mcmc_n = to_long(value, key);
    else if (key == "mcmc.seed") c.mcmc_seed = static_cast<std::uint64_t>(to_long(value, key));
    else if (key == "mcmc.mode") c.mcmc_mode = value;
    else if (key == "surrogate.tol_anova") c.tol_anova = to_double(value, key);
    else if (key == "surrogate.tol_rb") c.tol_rb = to_double(value, key);
    else if (key == "surrogate.tol_pod") c.tol_pod = to_double(value, key);
    else if (key == "surrogate.n_model") c.n_model = to_long(value, key);
    else if (key == "surrogate.order_cap") c.order_cap = static_cast<int>(to_long(value, key));
    else if (key == "sensors.per_side") c.sensors_per_side = static_cast<int>(to_long(value, key));
    else if (key == "data.truth_seed") c.truth_seed = static_cast<std::uint64_t>(to_long(value, key));
    else if (key == "data.noise_seed") c.noise_seed = static_cast<std::uint64_t>(to_long(value, key));
    else if (key == "data.refine") c.data_refine = to_long(value, key) != 0;
    else if (key == "paths.out_dir") c.out_dir = value;
    else if (key == "paths.data") c.data_path = value;
    else if (key == "paths.truth") c.truth_path = value;
    else if (key == "paths.model") c.model_dir = value;
    else throw std::invalid_argument("config: unknown key " + key);
  }

  if (c.mcmc_mode != "full" && c.mcmc_mode != "prior" && c.mcmc_mode != "adaptive")
    throw std::invalid_argument("config: mcmc.mode must be full, prior, or adaptive");
  if (!(c.tol_anova > 0 && c.tol_rb > 0 && c.tol_pod > 0))
    throw std::invalid_argument("config: tolerances must be positive");
  if (c.noise_sigma < 0) throw std::invalid_argument("config: noise.sigma must be >= 0");
  if (!(c.proposal_step > 0)) throw std::invalid_argument("config: proposal.step must be positive");
  return c;
}

ExperimentConfig ExperimentConfig::parse_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_text(buf.str());
}

std::string ExperimentConfig::canonical_text() const {
  // every key rendered canonically in sorted order, so whitespace, key
  // ordering, and defaulted-vs-explicit values cannot change the hash
  std::map<std::string, std::string> kv;
  kv["grid.n"] = std::to_string(grid_n);
  kv["kl.alpha"] = format_full(kl_alpha);
  kv["kl.sigma"] = format_full(kl_sigma);
  kv["kl.fraction"] = format_full(kl_fraction);
  kv["kl.mean"] = format_full(kl_mean);
  kv["noise.sigma"] = format_full(noise_sigma);
  kv["proposal.step"] = format_full(proposal_step);
  kv["mcmc.n"] = std::to_string(mcmc_n);
  kv["mcmc.seed"] = std::to_string(mcmc_seed);
  kv["mcmc.mode"] = mcmc_mode;
  kv["surrogate.tol_anova"] = format_full(tol_anova);
  kv["surrogate.tol_rb"] = format_full(tol_rb);
  kv["surrogate.tol_pod"] = format_full(tol_pod);
  kv["surrogate.n_model"] = std::to_string(n_model);
  kv["surrogate.order_cap"] = std::to_string(order_cap);
  kv["sensors.per_side"] = std::to_string(sensors_per_side);
  kv["data.truth_seed"] = std::to_string(truth_seed);
  kv["data.noise_seed"] = std::to_string(noise_seed);
  kv["data.refine"] = data_refine ? "1" : "0";
  kv["paths.out_dir"] = out_dir;
  kv["paths.data"] = resolved_data_path().string();
  kv["paths.truth"] = resolved_truth_path().string();
  kv["paths.model"] = resolved_model_dir().string();
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(canonical_text()));
  return buf;
}

void ExperimentConfig::write(const fs::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write config: " + path.string());
  os << canonical_text();
}

fs::path ExperimentConfig::resolved_data_path() const {
  return data_path.empty() ? fs::path(out_dir) / "data.txt" : fs::path(data_path);
}
fs::path ExperimentConfig::resolved_truth_path() const {
  return truth_path.empty() ? fs::path(out_dir) / "truth.txt" : fs::path(truth_path);
}
fs::path ExperimentConfig::resolved_model_dir() const {
  return model_dir.empty() ? fs::path(out_dir) / "model" : fs::path(model_dir);
}

GenDataResult gen_data(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  const int gen_n = config.data_refine ? 2 * config.grid_n : config.grid_n;
  ProblemSetup setup = make_setup(config, gen_n);

  GenDataResult result;
  constexpr int kMaxAttempts = 100;
  std::uint64_t seed = config.truth_seed;
  bool found = false;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt, ++seed) {
    Rng rng(seed, "truth");
    const Eigen::VectorXd xi = rng.uniform_box(setup.kl.n_modes());
    try {
      evaluate_field(setup.kl, xi);
    } catch (const std::domain_error& e) {
      std::cerr << "gen-data: truth seed " << seed << " rejected (" << e.what()
                << "), retrying with the next seed\n";
      continue;
    }
    result.xi_true = xi;
    result.truth_seed_used = seed;
    found = true;
    break;
  }
  if (!found) throw std::runtime_error("gen-data: no positive truth field found");

  const Snapshot u = solve_full(setup.ops, result.xi_true);
  Eigen::VectorXd d = observe(u, setup.grid, setup.sensors);
  Rng noise_rng(config.noise_seed, "noise");
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] += config.noise_sigma * noise_rng.normal();
  result.data = d;

  write_value_file(config.resolved_data_path(),
                   {"rbanova data v1", "config_hash " + config.hash(),
                    "truth_seed " + std::to_string(result.truth_seed_used),
                    "noise_seed " + std::to_string(config.noise_seed),
                    "sensors " + std::to_string(setup.sensors.size()),
                    "grid_n " + std::to_string(gen_n),
                    "refined " + std::string(config.data_refine ? "1" : "0")},
                   d);
  write_value_file(config.resolved_truth_path(),
                   {"rbanova truth v1", "config_hash " + config.hash(),
                    "truth_seed " + std::to_string(result.truth_seed_used),
                    "m " + std::to_string(result.xi_true.size())},
                   result.xi_true);
  return result;
}

void build_surrogate_cmd(const ExperimentConfig& config) {
  ProblemSetup setup = make_setup(config, config.grid_n);
  Rng model_rng(config.mcmc_seed, "model-prior-samples");
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(static_cast<std::size_t>(config.n_model));
  for (long j = 0; j < config.n_model; ++j)
    samples.push_back(model_rng.uniform_box(setup.kl.n_modes()));
  CostLedger ledger;
  const SurrogateModel model = build_surrogate(samples, setup.ops, setup.kl,
                                               config.tolerances(), config.order_cap, ledger);
  save_model(model, config.resolved_model_dir());
  std::cout << "surrogate built: " << model.indices.active.size() << " terms, cost "
            << format_full(ledger.total()) << " units, saved to "
            << config.resolved_model_dir().string() << "\n";
}

void write_chain_csv(const fs::path& path, const Chain& chain) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write chain CSV: " + path.string());
  const int m = chain.states.empty() ? 0 : static_cast<int>(chain.states.front().size());
  os << "iter,accepted,cost_cum";
  for (int k = 1; k <= m; ++k) os << ",xi_" << k;
  os << '\n';
  for (std::size_t j = 0; j < chain.states.size(); ++j) {
    os << (j + 1) << ',' << static_cast<int>(chain.accepted[j]) << ','
       << format_full(chain.cost_cum[j]);
    for (int k = 0; k < m; ++k) os << ',' << format_full(chain.states[j][k]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed writing chain CSV: " + path.string());
}

Chain read_chain_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing chain CSV: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty chain CSV: " + path.string());
  int m = 0;
  {
    std::istringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(col);
    if (cols.size() < 3 || cols[0] != "iter" || cols[1] != "accepted" || cols[2] != "cost_cum")
      throw std::runtime_error("bad chain CSV header in " + path.string());
    m = static_cast<int>(cols.size()) - 3;
  }
  Chain chain;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');  // iter, implicit by position
    std::getline(ls, tok, ',');
    chain.accepted.push_back(static_cast<std::uint8_t>(to_long(tok, "accepted")));
    std::getline(ls, tok, ',');
    chain.cost_cum.push_back(to_double(tok, "cost_cum"));
    Eigen::VectorXd xi(m);
    for (int k = 0; k < m; ++k) {
      if (!std::getline(ls, tok, ',')) throw std::runtime_error("short row in " + path.string());
      xi[k] = to_double(tok, "xi");
    }
    chain.states.push_back(std::move(xi));
  }
  return chain;
}

RunResult run_experiment(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  const Eigen::VectorXd data = read_value_file(config.resolved_data_path());
  ProblemSetup setup = make_setup(config, config.grid_n);
  if (data.size() != setup.sensors.size())
    throw std::runtime_error("data file length does not match the sensor layout");

  const InverseProblem problem{data, config.noise_sigma, setup.kl.n_modes()};
  const ProposalSpec proposal{config.proposal_step};

  RunResult result;
  if (config.mcmc_mode == "full") {
    result.mcmc = run_full_mcmc(problem, setup.ops, setup.sensors, proposal, config.mcmc_n,
                                config.mcmc_seed);
  } else if (config.mcmc_mode == "prior") {
    result.mcmc = run_prior_rb_mcmc(problem, setup.ops, setup.kl, setup.sensors, proposal,
                                    config.mcmc_n, config.n_model, config.tolerances(),
                                    config.order_cap, config.mcmc_seed);
  } else {
    result.mcmc = run_adaptive_mcmc(problem, setup.ops, setup.kl, setup.sensors, proposal,
                                    config.mcmc_n, config.n_model, config.tolerances(),
                                    config.order_cap, config.mcmc_seed);
  }

  const fs::path out(config.out_dir);
  result.chain_csv = out / ("chain_" + config.mcmc_mode + ".csv");
  write_chain_csv(result.chain_csv, result.mcmc.chain);

  result.metrics_path = out / ("metrics_" + config.mcmc_mode + ".txt");
  std::ofstream ms(result.metrics_path, std::ios::trunc);
  ms << "mode " << config.mcmc_mode << '\n';
  ms << "chain_length " << result.mcmc.chain.length() << '\n';
  ms << "seed " << config.mcmc_seed << '\n';
  ms << "config_hash " << config.hash() << '\n';
  ms << "acceptance_rate " << format_full(acceptance_rate(result.mcmc.chain)) << '\n';
  ms << "cost_total " << format_full(result.mcmc.ledger.total()) << '\n';
  ms << "cost_full_solves " << result.mcmc.ledger.full_solve_count << '\n';
  ms << "cost_reduced " << format_full(result.mcmc.ledger.reduced_cost) << '\n';
  if (fs::exists(config.resolved_truth_path())) {
    const Eigen::VectorXd xi_true = read_value_file(config.resolved_truth_path());
    const Eigen::VectorXd actual = actual_field(config, xi_true, setup.grid);
    const Eigen::VectorXd est = mean_field(result.mcmc.chain, setup.kl);
    ms << "eps_actual " << format_full(error_vs_actual(est, actual, setup.grid)) << '\n';
  }
  if (!ms) throw std::runtime_error("failed writing metrics");

  std::ofstream meta(out / ("run_" + config.mcmc_mode + ".meta"), std::ios::trunc);
  meta << "config_hash " << config.hash() << '\n';
  meta << "seed " << config.mcmc_seed << '\n';
  meta << "mode " << config.mcmc_mode << '\n';
  meta << "rebuild_count " << result.mcmc.rebuilds.size() << '\n';
  for (const auto& r : result.mcmc.rebuilds) {
    meta << "rebuild iter=" << r.iteration << " before=";
    bool first = true;
    for (const auto& t : r.index_set_before) {
      meta << (first ? "" : ";") << t.to_string();
      first = false;
    }
    meta << " after=";
    first = true;
    for (const auto& t : r.index_set_after) {
      meta << (first ? "" : ";") << t.to_string();
      first = false;
    }
    meta << " stopped=" << (r.stopped_updates ? 1 : 0) << '\n';
  }
  if (result.mcmc.model) {
    for (const auto& [t, local] : result.mcmc.model->locals)
      meta << "term " << t.to_string() << " n_r " << local.basis.size() << '\n';
  }
  return result;
}

void analyze_chain(const ExperimentConfig& config, const fs::path& chain_csv,
                   const fs::path& reference_csv) {
  const Chain chain = read_chain_csv(chain_csv);
  if (chain.states.empty()) throw std::runtime_error("analyze: empty chain");
  ProblemSetup setup = make_setup(config, config.grid_n);

  const FieldEstimate est = field_moments(chain, setup.kl);
  const fs::path out(config.out_dir);
  fs::create_directories(out);
  const std::string stem = chain_csv.stem().string();
  write_vector(out / (stem + "_mean.bin"), est.mean);
  write_vector(out / (stem + "_var.bin"), est.variance);

  std::ofstream ms(out / (stem + "_analysis.txt"), std::ios::trunc);
  ms << "chain_length " << chain.length() << '\n';
  ms << "config_hash " << config.hash() << '\n';
  ms << "seed " << config.mcmc_seed << '\n';
  ms << "acceptance_rate " << format_full(acceptance_rate(chain)) << '\n';
  ms << "cost_total " << format_full(chain.cost_cum.back()) << '\n';
  if (fs::exists(config.resolved_truth_path())) {
    const Eigen::VectorXd xi_true = read_value_file(config.resolved_truth_path());
    const Eigen::VectorXd actual = actual_field(config, xi_true, setup.grid);
    ms << "eps_actual " << format_full(error_vs_actual(est.mean, actual, setup.grid)) << '\n';
  }
  if (!reference_csv.empty()) {
    const Chain ref_chain = read_chain_csv(reference_csv);
    const FieldEstimate ref = field_moments(ref_chain, setup.kl);
    const auto [eps_mean, eps_var] = error_vs_reference(est, ref, setup.grid);
    ms << "eps_mean " << format_full(eps_mean) << '\n';
    ms << "eps_var " << format_full(eps_var) << '\n';
  }
  if (!ms) throw std::runtime_error("failed writing analysis report");
}

void reproduce(const std::string& profile, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  if (profile == "paper") {
    // full-scale configurations only; these match the published setup and
    // are deliberately not executed here
    std::ofstream note(out_dir / "README.txt", std::ios::trunc);
    note << "Full-scale configurations (65x65 grid, 10^6 samples). Run each with\n"
            "`rbanova gen-data` followed by `rbanova run`; expect hours of runtime.\n";
    for (const double alpha : {1.25, 0.625}) {
      for (const std::string mode : {"full", "prior", "adaptive"}) {
        ExperimentConfig c;
        c.grid_n = 64;
        c.kl_alpha = alpha;
        c.sensors_per_side = 7;
        c.mcmc_n = 1000000;
        c.n_model = 1000;
        c.mcmc_mode = mode;
        c.out_dir = (out_dir / ("paper_alpha" + format_full(alpha))).string();
        c.write(out_dir / ("config_paper_alpha" + format_full(alpha) + "_" + mode + ".txt"));
      }
    }
    return;
  }
  if (profile != "desk") throw std::invalid_argument("reproduce: profile must be desk or paper");

  ExperimentConfig base;
  base.grid_n = 16;
  base.kl_alpha = 5.0;
  base.mcmc_n = 50000;
  base.n_model = 500;
  base.sensors_per_side = 3;
  base.mcmc_seed = 42;
  base.truth_seed = 7;
  base.noise_seed = 8;
  base.out_dir = out_dir.string();
  gen_data(base);

  std::map<std::string, RunResult> runs;
  for (const std::string mode : {"full", "prior", "adaptive"}) {
    ExperimentConfig c = base;
    c.mcmc_mode = mode;
    c.write(out_dir / ("config_" + mode + ".txt"));
    runs.emplace(mode, run_experiment(c));
  }

  const KlExpansion kl =
      build_kl({base.kl_sigma, base.kl_alpha}, UniformGrid(base.grid_n), base.kl_fraction,
               base.kl_mean);
  const UniformGrid grid(base.grid_n);
  const FieldEstimate reference = field_moments(runs.at("full").mcmc.chain, kl);

  std::vector<long> checkpoints;
  for (long n : {1000L, 2000L, 5000L, 10000L, 20000L, 50000L})
    if (n <= base.mcmc_n) checkpoints.push_back(n);

  const std::string provenance =
      "# config_hash " + base.hash() + " seed " + std::to_string(base.mcmc_seed) + "\n";

  std::ofstream costs(out_dir / "costs.tsv", std::ios::trunc);
  costs << provenance;
  costs << "n\tcost_full\tcost_prior\tcost_adaptive\n";
  for (long n : checkpoints) {
    costs << n;
    for (const std::string mode : {"full", "prior", "adaptive"})
      costs << '\t' << format_full(runs.at(mode).mcmc.chain.cost_cum[n - 1]);
    costs << '\n';
  }

  std::ofstream errors(out_dir / "errors.tsv", std::ios::trunc);
  errors << provenance;
  errors << "method\tn\tcost\teps_mean\teps_var\n";
  for (const std::string mode : {"full", "prior", "adaptive"}) {
    const Chain& chain = runs.at(mode).mcmc.chain;
    for (long n : checkpoints) {
      const FieldEstimate est = prefix_moments(chain, kl, n);
      const auto [em, ev] = error_vs_reference(est, reference, grid);
      errors << mode << '\t' << n << '\t' << format_full(chain.cost_cum[n - 1]) << '\t'
             << format_full(em) << '\t' << format_full(ev) << '\n';
    }
  }

  std::ofstream acc(out_dir / "acceptance.txt", std::ios::trunc);
  acc << provenance;
  double rates[3];
  int i = 0;
  for (const std::string mode : {"full", "prior", "adaptive"}) {
    rates[i] = acceptance_rate(runs.at(mode).mcmc.chain);
    acc << "acceptance_" << mode << ' ' << format_full(rates[i]) << '\n';
    ++i;
  }
  acc << "max_pairwise_diff "
      << format_full(std::max({std::abs(rates[0] - rates[1]), std::abs(rates[0] - rates[2]),
                               std::abs(rates[1] - rates[2])}))
      << '\n';
}

}  // namespace rbanova
