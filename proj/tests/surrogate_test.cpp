#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rbanova/io.hpp"
#include "rbanova/rng.hpp"
#include "rbanova/surrogate.hpp"

namespace rbanova {
namespace {

namespace fs = std::filesystem;

AnovaIndex idx(std::initializer_list<int> dims) { return AnovaIndex(std::vector<int>(dims)); }

struct DeskFixture {
  UniformGrid grid{16};
  KlExpansion kl = build_kl({0.25, 5.0}, grid, 0.95);
  AffineOperatorFamily ops = assemble_affine(grid, kl);
  SensorSet sensors = SensorSet::tensor_grid(3);

  std::vector<Eigen::VectorXd> ball_samples(int count, double radius, std::uint64_t seed,
                                            const Eigen::VectorXd& center) const {
    Rng rng(seed, "ball");
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
      Eigen::VectorXd xi = center + radius * rng.normal_vector(kl.n_modes());
      if ((xi.array().abs() <= 1.0).all()) out.push_back(std::move(xi));
    }
    return out;
  }

  std::vector<Eigen::VectorXd> prior_samples(int count, std::uint64_t seed) const {
    Rng rng(seed, "prior");
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    for (int j = 0; j < count; ++j) out.push_back(rng.uniform_box(kl.n_modes()));
    return out;
  }
};

TEST(SurrogateBuild, SingleModeStructure) {
  // M = 1: the active set is always {0, (1)} and the anchor is the sample mean
  const UniformGrid grid(8);
  const KlExpansion kl = build_kl({0.25, 1e6}, grid, 0.95);
  ASSERT_EQ(kl.n_modes(), 1);
  const auto ops = assemble_affine(grid, kl);
  Rng rng(1, "m1");
  std::vector<Eigen::VectorXd> samples;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(1);
  for (int j = 0; j < 10; ++j) {
    samples.push_back(rng.uniform_box(1));
    mean += samples.back();
  }
  mean /= 10.0;
  CostLedger ledger;
  const SurrogateModel model = build_surrogate(samples, ops, kl, {}, 3, ledger);
  EXPECT_EQ(model.indices.active, (std::set<AnovaIndex>{idx({}), idx({1})}));
  EXPECT_NEAR(model.anchor[0], mean[0], 1e-15);
}

TEST(SurrogateBuild, LargeAnovaToleranceKeepsFirstOrderOnly) {
  DeskFixture f;
  SurrogateTolerances tol;
  tol.anova = 0.9;  // above any realistic relative mean
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(100, 2), f.ops, f.kl, tol, 3, ledger);
  for (const auto& t : model.indices.active) EXPECT_LE(t.order(), 1);
  EXPECT_EQ(model.indices.active.size(), 1u + f.kl.n_modes());
}

TEST(SurrogateBuild, OrderCapBoundsActiveSet) {
  DeskFixture f;
  SurrogateTolerances tol;
  tol.anova = 1e-12;  // keep everything
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(60, 3), f.ops, f.kl, tol, 2, ledger);
  int max_order = 0;
  for (const auto& t : model.indices.active) max_order = std::max(max_order, t.order());
  EXPECT_EQ(max_order, 2);
}

TEST(SurrogateBuild, IndexSetContainment) {
  // J~_i is a subset of J_i, and every candidate at order i+1 has all its
  // order-i facets important
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(200, 30), f.ops, f.kl, {}, 3, ledger);
  const auto& sets = model.indices;
  for (std::size_t order = 0; order < sets.important.size(); ++order) {
    const std::set<AnovaIndex> candidates(sets.candidates[order].begin(),
                                          sets.candidates[order].end());
    for (const auto& t : sets.important[order]) EXPECT_TRUE(candidates.count(t));
    if (order + 1 < sets.candidates.size()) {
      const std::set<AnovaIndex> important(sets.important[order].begin(),
                                           sets.important[order].end());
      for (const auto& t : sets.candidates[order + 1])
        for (const auto& facet : t.facets()) EXPECT_TRUE(important.count(facet));
    }
  }
  // the active set is the union of the per-order candidate sets
  std::set<AnovaIndex> unioned;
  for (const auto& level : sets.candidates) unioned.insert(level.begin(), level.end());
  EXPECT_EQ(unioned, sets.active);
}

TEST(SurrogateBuild, InputValidation) {
  DeskFixture f;
  CostLedger ledger;
  EXPECT_THROW(build_surrogate({}, f.ops, f.kl, {}, 3, ledger), std::invalid_argument);
  EXPECT_THROW(build_surrogate({Eigen::VectorXd::Zero(f.kl.n_modes())}, f.ops, f.kl, {}, 3,
                               ledger),
               std::invalid_argument);
  std::vector<Eigen::VectorXd> outside(2, Eigen::VectorXd::Constant(f.kl.n_modes(), 1.5));
  EXPECT_THROW(build_surrogate(outside, f.ops, f.kl, {}, 3, ledger), std::invalid_argument);
}

TEST(SurrogatePredict, AnchorReproducesSnapshot) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(150, 4), f.ops, f.kl, {}, 3, ledger);
  const Eigen::VectorXd at_anchor = model.predict(model.anchor, f.sensors);
  const Eigen::VectorXd expected = observe(model.anchor_snapshot, f.grid, f.sensors);
  EXPECT_LE((at_anchor - expected).lpNorm<Eigen::Infinity>(),
            1e-12 * expected.lpNorm<Eigen::Infinity>());
}

TEST(SurrogatePredict, AnchoredVanishingOfModelTerms) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(150, 5), f.ops, f.kl, {}, 3, ledger);
  const double scale = model.anchor_snapshot.lpNorm<Eigen::Infinity>();
  for (const auto& [t, local] : model.locals) {
    const Eigen::VectorXd u_t = model.term(t, project_one(model.anchor, t));
    EXPECT_LE(u_t.lpNorm<Eigen::Infinity>(), 1e-12 * scale) << t.to_string();
  }
}

TEST(SurrogatePredict, PredictionDecompositionConsistency) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(100, 6), f.ops, f.kl, {}, 3, ledger);
  Rng rng(7, "consistency");
  const Eigen::VectorXd xi = rng.uniform_box(f.kl.n_modes());
  const Eigen::VectorXd via_field = observe(model.predict_field(xi), f.grid, f.sensors);
  const Eigen::VectorXd direct = model.predict(xi, f.sensors);
  EXPECT_EQ((via_field - direct).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(SurrogatePredict, DeterministicRepeatedCalls) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(100, 8), f.ops, f.kl, {}, 3, ledger);
  Rng rng(9, "det");
  const Eigen::VectorXd xi = rng.uniform_box(f.kl.n_modes());
  const Eigen::VectorXd a = model.predict(xi, f.sensors);
  const Eigen::VectorXd b = model.predict(xi, f.sensors);
  EXPECT_EQ((a - b).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(SurrogatePredict, LedgerBillsReducedSolvesPerCall) {
  DeskFixture f;
  CostLedger build_ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(100, 10), f.ops, f.kl, {}, 3, build_ledger);
  double expected = 0.0;
  for (const auto& [t, local] : model.locals)
    expected += static_cast<double>(local.basis.size()) / f.grid.total_nodes();
  CostLedger ledger;
  ledger.n_h = f.grid.total_nodes();
  model.predict(model.anchor, f.sensors, &ledger);
  EXPECT_NEAR(ledger.total(), expected, 1e-15);
  EXPECT_EQ(ledger.full_solve_count, 0);
}

TEST(SurrogatePredict, ExhaustiveBasisMatchesFullSolver) {
  // tiny grid, M = 2, tiny tol_rb: the greedy loop saturates the local
  // bases, so the full-index RB-ANOVA prediction reproduces the FEM field
  const UniformGrid grid(4);  // 9 interior nodes
  KlExpansion kl = build_kl({0.25, 2.5}, grid, 0.95);
  kl.eigenvalues.conservativeResize(2);
  kl.modes.conservativeResize(Eigen::NoChange, 2);
  const auto ops = assemble_affine(grid, kl);
  Rng rng(11, "exhaustive");
  std::vector<Eigen::VectorXd> samples;
  for (int j = 0; j < 40; ++j) samples.push_back(rng.uniform_box(2));
  SurrogateTolerances tol;
  tol.anova = 1e-14;  // keep the full index set
  tol.rb = 1e-13;     // force snapshots at (almost) every sample
  tol.pod = 1e-12;
  CostLedger ledger;
  const SurrogateModel model = build_surrogate(samples, ops, kl, tol, 2, ledger);
  EXPECT_EQ(model.indices.active.size(), 4u);  // 0, (1), (2), (1,2)
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd xi = rng.uniform_box(2);
    const Eigen::VectorXd predicted = model.predict_field(xi);
    const Eigen::VectorXd full = solve_full(ops, xi);
    EXPECT_LE((predicted - full).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(SurrogateFidelity, PosteriorRegionModelPredictsHeldOutFem) {
  DeskFixture f;
  Rng rng(12, "center");
  const Eigen::VectorXd center = 0.3 * rng.uniform_box(f.kl.n_modes());
  const auto train = f.ball_samples(100, 0.1, 13, center);
  CostLedger ledger;
  const SurrogateModel model = build_surrogate(train, f.ops, f.kl, {}, 3, ledger);
  FullSolver solver(f.ops);
  for (const auto& xi : f.ball_samples(30, 0.1, 14, center)) {
    const Eigen::VectorXd predicted = model.predict(xi, f.sensors);
    const Eigen::VectorXd truth = observe(solver.solve(xi), f.grid, f.sensors);
    EXPECT_LE((predicted - truth).norm() / truth.norm(), 1e-2);
  }
}

TEST(SurrogateFidelity, PriorBuiltModelPredictsPosteriorTypicalPoints) {
  // 200 prior training samples, held-out points concentrated in a
  // posterior-typical ball
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(200, 21), f.ops, f.kl, {}, 3, ledger);
  Rng rng(22, "center");
  const Eigen::VectorXd center = 0.3 * rng.uniform_box(f.kl.n_modes());
  FullSolver solver(f.ops);
  for (const auto& xi : f.ball_samples(100, 0.1, 23, center)) {
    const Eigen::VectorXd predicted = model.predict(xi, f.sensors);
    const Eigen::VectorXd truth = observe(solver.solve(xi), f.grid, f.sensors);
    EXPECT_LE((predicted - truth).norm() / truth.norm(), 1e-2);
  }
}

TEST(SurrogateCertify, TrainingResidualsWithinTolerance) {
  DeskFixture f;
  const auto samples = f.prior_samples(150, 15);
  CostLedger ledger;
  const SurrogateModel model = build_surrogate(samples, f.ops, f.kl, {}, 3, ledger);
  for (const auto& [t, tau] : model.certify(f.ops, samples))
    EXPECT_LE(tau, model.tol.rb) << t.to_string();
}

TEST(SurrogateBuild, RelativeMeansMatchResamplingOracle) {
  // first-order gamma~ values from the build vs independent exact-solve MC
  // batches of the same size: agreement within 2x the MC standard error
  DeskFixture f;
  const int batch = 300;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(batch, 24), f.ops, f.kl, {}, 3, ledger);

  FullSolver solver(f.ops);
  const Eigen::VectorXd anchor_u = solver.solve(model.anchor);
  const double denom = l2_norm_interior(anchor_u, f.grid);
  const int n_batches = 10;
  for (int k = 1; k <= f.kl.n_modes(); ++k) {
    const AnovaIndex t({k});
    std::vector<double> gammas;
    for (int b = 0; b < n_batches; ++b) {
      Rng rng(1000 + b, "resample");
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(f.grid.interior_count());
      for (int j = 0; j < batch; ++j) {
        Eigen::VectorXd xi_t = Eigen::VectorXd::Constant(1, rng.uniform(-1, 1));
        mean += solver.solve(embed(model.anchor, t, xi_t)) - anchor_u;
      }
      gammas.push_back(l2_norm_interior(mean / batch, f.grid) / denom);
    }
    double avg = 0.0;
    for (double g : gammas) avg += g;
    avg /= n_batches;
    double var = 0.0;
    for (double g : gammas) var += (g - avg) * (g - avg);
    const double batch_sd = std::sqrt(var / (n_batches - 1));
    EXPECT_LE(std::abs(model.means.gamma(t) - avg), 2.0 * batch_sd + 1e-12) << t.to_string();
  }
}

TEST(SurrogateBuild, LedgerSeparatesFullAndReducedCost) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(80, 16), f.ops, f.kl, {}, 3, ledger);
  EXPECT_GT(ledger.full_solve_count, 0);
  EXPECT_GT(ledger.reduced_cost, 0.0);
  EXPECT_EQ(ledger.total(), ledger.full_solve_count + ledger.reduced_cost);
  EXPECT_EQ(ledger.n_h, f.grid.total_nodes());
}

TEST(SurrogateSerialization, RoundTripIsBitExact) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(120, 17), f.ops, f.kl, {}, 3, ledger);
  const fs::path dir = fs::temp_directory_path() / "rbanova_model_roundtrip";
  fs::remove_all(dir);
  save_model(model, dir);
  const SurrogateModel loaded = load_model(dir);

  EXPECT_EQ(loaded.indices.active, model.indices.active);
  Rng rng(18, "roundtrip");
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::VectorXd xi = rng.uniform_box(f.kl.n_modes());
    const Eigen::VectorXd a = model.predict(xi, f.sensors);
    const Eigen::VectorXd b = loaded.predict(xi, f.sensors);
    EXPECT_EQ((a - b).lpNorm<Eigen::Infinity>(), 0.0);
  }
  fs::remove_all(dir);
}

TEST(SurrogateSerialization, CorruptionDetected) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(60, 19), f.ops, f.kl, {}, 3, ledger);
  const fs::path dir = fs::temp_directory_path() / "rbanova_model_corrupt";
  fs::remove_all(dir);
  save_model(model, dir);

  // flip one payload byte in the anchor snapshot
  {
    std::fstream fsck(dir / "anchor_snapshot.bin",
                      std::ios::in | std::ios::out | std::ios::binary);
    fsck.seekp(16);
    char c;
    fsck.seekg(16);
    fsck.get(c);
    fsck.seekp(16);
    fsck.put(static_cast<char>(c ^ 0x1));
  }
  EXPECT_THROW(load_model(dir), std::runtime_error);

  fs::remove_all(dir);
  EXPECT_THROW(load_model(dir), std::runtime_error);  // missing container
}

TEST(SurrogateSerialization, TruncatedFileDetected) {
  DeskFixture f;
  CostLedger ledger;
  const SurrogateModel model =
      build_surrogate(f.prior_samples(60, 20), f.ops, f.kl, {}, 3, ledger);
  const fs::path dir = fs::temp_directory_path() / "rbanova_model_truncated";
  fs::remove_all(dir);
  save_model(model, dir);
  fs::resize_file(dir / "kl_modes.bin", 64);
  EXPECT_THROW(load_model(dir), std::runtime_error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace rbanova
