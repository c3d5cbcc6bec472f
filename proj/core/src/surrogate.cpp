#include "rbanova/surrogate.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rbanova/io.hpp"

namespace rbanova {

namespace {

constexpr const char* kManifestName = "manifest.txt";
constexpr int kFormatVersion = 1;

std::string basis_file_name(const AnovaIndex& t) {
  std::string s = t.to_string();
  for (auto& c : s)
    if (c == ',') c = '_';
  return "basis_" + s + ".bin";
}

// Hierarchical initialization of Q_t: POD over the union of the child bases
// (the anchor snapshot itself at order one), with the anchor-snapshot
// direction pinned as the first column so the reduced anchor problem stays
// exactly reproducible.
ReducedBasis init_basis(const AnovaIndex& t, const Eigen::VectorXd& anchor_snapshot,
                        const std::map<AnovaIndex, LocalModel>& locals, double tol_pod) {
  std::vector<Eigen::VectorXd> columns;
  if (t.order() == 1) {
    columns.push_back(anchor_snapshot);
  } else {
    for (const auto& s : t.facets()) {
      const auto it = locals.find(s);
      if (it == locals.end())
        throw std::logic_error("build_surrogate: missing child basis for " + s.to_string());
      const auto& b = it->second.basis.basis;
      for (Eigen::Index k = 0; k < b.cols(); ++k) columns.push_back(b.col(k));
    }
  }
  ReducedBasis q;
  q.index = t;
  q.basis = anchor_snapshot.normalized();
  if (static_cast<Eigen::Index>(columns.size()) < anchor_snapshot.size()) {
    const ReducedBasis merged = pod(columns, tol_pod, t);
    for (Eigen::Index k = 0; k < merged.basis.cols(); ++k) q = augment(q, merged.basis.col(k));
  } else {
    // union already saturates the space; POD truncation is moot, so
    // orthonormalize the columns directly
    for (const auto& col : columns) q = augment(q, col);
  }
  return q;
}

}  // namespace

Eigen::VectorXd SurrogateModel::predict_field(const Eigen::VectorXd& xi,
                                              CostLedger* ledger) const {
  if (xi.size() != dim()) throw std::invalid_argument("predict: xi has wrong length");
  Eigen::VectorXd total = anchor_snapshot;
  std::map<AnovaIndex, Eigen::VectorXd> memo;  // term values u^r_s for this call
  for (const auto& [t, local] : locals) {      // ordered: children before parents
    const Eigen::VectorXd xi_t = project_one(xi, t);
    const ReducedSolution sol = reduced_solve(local.system, local.basis, xi_t);
    if (ledger) ledger->add_reduced_solve(local.basis.size());
    Eigen::VectorXd u_t = sol.lifted;
    for (const auto& s : t.strict_subsets()) {
      if (s.empty())
        u_t -= anchor_snapshot;
      else
        u_t -= memo.at(s);
    }
    total += u_t;
    memo.emplace(t, std::move(u_t));
  }
  return total;
}

Eigen::VectorXd SurrogateModel::predict(const Eigen::VectorXd& xi, const SensorSet& sensors,
                                        CostLedger* ledger) const {
  return observe(predict_field(xi, ledger), grid, sensors);
}

Eigen::VectorXd SurrogateModel::term(const AnovaIndex& t, const Eigen::VectorXd& xi_t) const {
  if (t.empty()) return anchor_snapshot;
  const auto it = locals.find(t);
  if (it == locals.end())
    throw std::invalid_argument("term: " + t.to_string() + " is not in the active set");
  const ReducedSolution sol = reduced_solve(it->second.system, it->second.basis, xi_t);
  TermEvaluator child = [this](const AnovaIndex& s, const Eigen::VectorXd& xi_s) {
    return term(s, xi_s);
  };
  return term_value(t, xi_t, sol.lifted, child);
}

std::map<AnovaIndex, double> SurrogateModel::certify(
    const AffineOperatorFamily& ops, const std::vector<Eigen::VectorXd>& samples) const {
  std::map<AnovaIndex, double> worst;
  for (const auto& [t, local] : locals) {
    double mx = 0.0;
    for (const auto& xi : samples) {
      const Eigen::VectorXd xi_t = project_one(xi, t);
      const ReducedSolution sol = reduced_solve(local.system, local.basis, xi_t);
      mx = std::max(mx, residual_indicator(ops, anchor, t, sol.lifted, xi_t));
    }
    worst[t] = mx;
  }
  return worst;
}

SurrogateModel build_surrogate(const std::vector<Eigen::VectorXd>& samples,
                               const AffineOperatorFamily& ops, const KlExpansion& kl,
                               const SurrogateTolerances& tol, int order_cap,
                               CostLedger& ledger) {
  if (samples.size() < 2) throw std::invalid_argument("build_surrogate: need at least 2 samples");
  const int m = ops.n_modes();
  if (kl.n_modes() != m) throw std::invalid_argument("build_surrogate: KL/operator mismatch");
  for (const auto& xi : samples) {
    if (xi.size() != m) throw std::invalid_argument("build_surrogate: sample length mismatch");
    if ((xi.array().abs() > 1.0 + 1e-12).any())
      throw std::invalid_argument("build_surrogate: sample outside [-1,1]^M");
  }
  if (order_cap < 1) throw std::invalid_argument("build_surrogate: order_cap must be >= 1");
  ledger.n_h = ops.grid.total_nodes();

  SurrogateModel model;
  model.grid = ops.grid;
  model.kl = kl;
  model.tol = tol;
  model.order_cap = order_cap;

  // anchor = sample mean; zeroth-order snapshot
  Eigen::VectorXd anchor = Eigen::VectorXd::Zero(m);
  for (const auto& xi : samples) anchor += xi;
  anchor /= static_cast<double>(samples.size());
  model.anchor = anchor;

  FullSolver solver(ops);
  model.anchor_snapshot = solver.solve(anchor);
  ledger.add_full_solve();

  TermMeanTable table;
  table.set_mean(AnovaIndex{}, model.anchor_snapshot);

  IndexSets& sets = model.indices;
  sets.candidates.push_back({AnovaIndex{}});
  sets.important.push_back({AnovaIndex{}});
  sets.active.insert(AnovaIndex{});

  std::vector<AnovaIndex> first_order;
  for (int d = 1; d <= m; ++d) first_order.push_back(AnovaIndex({d}));
  sets.candidates.push_back(first_order);
  sets.active.insert(first_order.begin(), first_order.end());

  // term values at the training samples, reused as child terms by later orders
  std::map<AnovaIndex, std::vector<Eigen::VectorXd>> term_cache;

  for (int order = 1; order < static_cast<int>(sets.candidates.size()); ++order) {
    for (const auto& t : sets.candidates[order]) {
      ReducedBasis basis = init_basis(t, model.anchor_snapshot, model.locals, tol.pod);
      ReducedLocalSystem system = project_local(ops, anchor, t, basis);
      const auto xi_t_samples = project_samples(samples, t);
      const auto subsets = t.strict_subsets();

      std::vector<Eigen::VectorXd>& values = term_cache[t];
      values.reserve(samples.size());
      for (std::size_t j = 0; j < xi_t_samples.size(); ++j) {
        const Eigen::VectorXd& xi_t = xi_t_samples[j];
        const ReducedSolution sol = reduced_solve(system, basis, xi_t);
        ledger.add_reduced_solve(basis.size());
        const double tau = residual_indicator(ops, anchor, t, sol.lifted, xi_t);

        Eigen::VectorXd u_local;
        if (tau < tol.rb) {
          u_local = sol.lifted;
        } else {
          u_local = solver.solve(embed(anchor, t, xi_t));
          ledger.add_full_solve();
          basis = augment(basis, u_local);
          system = project_local(ops, anchor, t, basis);
        }
        for (const auto& s : subsets)
          u_local -= s.empty() ? model.anchor_snapshot : term_cache.at(s)[j];
        values.push_back(std::move(u_local));
      }

      table.set_mean(t, mc_mean(values));
      table.set_gamma(t, relative_mean(table, t, model.grid));
      model.locals.emplace(t, LocalModel{std::move(basis), std::move(system)});
    }

    sets.important.push_back(select_important(sets.candidates[order], table, tol.anova));
    if (order >= order_cap) break;
    auto next = next_order_indices(sets.important[order], order, m);
    if (next.empty()) break;
    sets.active.insert(next.begin(), next.end());
    sets.candidates.push_back(std::move(next));
  }

  model.means = std::move(table);
  return model;
}

void save_model(const SurrogateModel& model, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::vector<std::pair<std::string, fs::path>> files;
  auto put_vector = [&](const std::string& name, const Eigen::VectorXd& v) {
    write_vector(dir / name, v);
    files.emplace_back(name, dir / name);
  };
  auto put_matrix = [&](const std::string& name, const Eigen::MatrixXd& m) {
    write_matrix(dir / name, m);
    files.emplace_back(name, dir / name);
  };
  put_vector("anchor_snapshot.bin", model.anchor_snapshot);
  put_vector("kl_mean.bin", model.kl.mean);
  put_vector("kl_eigenvalues.bin", model.kl.eigenvalues);
  put_matrix("kl_modes.bin", model.kl.modes);
  for (const auto& [t, local] : model.locals) put_matrix(basis_file_name(t), local.basis.basis);

  std::ofstream os(dir / kManifestName, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write model manifest under " + dir.string());
  os << "format rbanova-model " << kFormatVersion << '\n';
  os << "grid_n " << model.grid.n() << '\n';
  os << "m " << model.dim() << '\n';
  os << "order_cap " << model.order_cap << '\n';
  os << "tol_anova " << format_full(model.tol.anova) << '\n';
  os << "tol_rb " << format_full(model.tol.rb) << '\n';
  os << "tol_pod " << format_full(model.tol.pod) << '\n';
  os << "variance_fraction " << format_full(model.kl.variance_fraction_captured) << '\n';
  os << "anchor";
  for (int k = 0; k < model.dim(); ++k) os << ' ' << format_full(model.anchor[k]);
  os << '\n';
  for (const auto& t : model.indices.active) {
    os << "index " << t.to_string();
    if (!t.empty() && model.means.gammas().count(t))
      os << ' ' << format_full(model.means.gamma(t));
    else
      os << " -";
    os << '\n';
  }
  for (const auto& [name, path] : files) os << "file " << name << ' ' << file_checksum(path) << '\n';
  if (!os) throw std::runtime_error("failed writing model manifest under " + dir.string());
}

SurrogateModel load_model(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::ifstream is(dir / kManifestName);
  if (!is) throw std::runtime_error("model manifest missing under " + dir.string());

  SurrogateModel model;
  int grid_n = 0, m = -1;
  double variance_fraction = 0.0;
  std::map<AnovaIndex, double> gammas;
  std::set<AnovaIndex> active;
  std::map<std::string, std::string> checks;

  std::string line;
  bool format_ok = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string name;
      int version = 0;
      ls >> name >> version;
      if (name != "rbanova-model" || version != kFormatVersion)
        throw std::runtime_error("model container: unsupported format '" + line + "'");
      format_ok = true;
    } else if (key == "grid_n") {
      ls >> grid_n;
    } else if (key == "m") {
      ls >> m;
    } else if (key == "order_cap") {
      ls >> model.order_cap;
    } else if (key == "tol_anova") {
      ls >> model.tol.anova;
    } else if (key == "tol_rb") {
      ls >> model.tol.rb;
    } else if (key == "tol_pod") {
      ls >> model.tol.pod;
    } else if (key == "variance_fraction") {
      ls >> variance_fraction;
    } else if (key == "anchor") {
      std::vector<double> vals;
      double v;
      while (ls >> v) vals.push_back(v);
      model.anchor = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    } else if (key == "index") {
      std::string idx, g;
      ls >> idx >> g;
      const AnovaIndex t = AnovaIndex::from_string(idx);
      active.insert(t);
      if (g != "-" && !g.empty()) gammas[t] = std::stod(g);
    } else if (key == "file") {
      std::string name, sum;
      ls >> name >> sum;
      checks[name] = sum;
    } else if (!key.empty()) {
      throw std::runtime_error("model manifest: unknown key '" + key + "'");
    }
  }
  if (!format_ok) throw std::runtime_error("model manifest: missing format line");
  if (grid_n < 2 || m < 0 || model.anchor.size() != m)
    throw std::runtime_error("model manifest: incomplete header");

  auto verified = [&](const std::string& name) {
    const auto it = checks.find(name);
    if (it == checks.end())
      throw std::runtime_error("model container: no checksum recorded for " + name);
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw std::runtime_error("model container: missing file " + name);
    if (file_checksum(p) != it->second)
      throw std::runtime_error("model container: checksum mismatch for " + name);
    return p;
  };

  model.grid = UniformGrid(grid_n);
  model.anchor_snapshot = read_vector(verified("anchor_snapshot.bin"));
  model.kl.grid = model.grid;
  model.kl.mean = read_vector(verified("kl_mean.bin"));
  model.kl.eigenvalues = read_vector(verified("kl_eigenvalues.bin"));
  model.kl.modes = read_matrix(verified("kl_modes.bin"));
  model.kl.variance_fraction_captured = variance_fraction;
  if (model.kl.n_modes() != m)
    throw std::runtime_error("model container: KL mode count mismatch");

  model.indices.active = active;
  int max_order = 0;
  for (const auto& t : active) max_order = std::max(max_order, t.order());
  model.indices.candidates.assign(max_order + 1, {});
  for (const auto& t : active) model.indices.candidates[t.order()].push_back(t);
  model.means.set_mean(AnovaIndex{}, model.anchor_snapshot);
  for (const auto& [t, g] : gammas) model.means.set_gamma(t, g);
  model.indices.important.assign(max_order + 1, {});
  model.indices.important[0] = {AnovaIndex{}};
  for (int order = 1; order <= max_order; ++order)
    model.indices.important[order] =
        select_important(model.indices.candidates[order], model.means, model.tol.anova);

  // reduced systems are re-projected from the (bit-exact) bases and the
  // deterministic operator assembly, so predictions round-trip bit-exactly
  const AffineOperatorFamily ops = assemble_affine(model.grid, model.kl);
  for (const auto& t : active) {
    if (t.empty()) continue;
    ReducedBasis basis;
    basis.index = t;
    basis.basis = read_matrix(verified(basis_file_name(t)));
    if (basis.basis.rows() != model.grid.interior_count() || basis.size() < 1)
      throw std::runtime_error("model container: bad basis dimensions for " + t.to_string());
    ReducedLocalSystem system = project_local(ops, model.anchor, t, basis);
    model.locals.emplace(t, LocalModel{std::move(basis), std::move(system)});
  }
  return model;
}

}  // namespace rbanova
