#include "seqmeas/strategies.hpp"

#include "seqmeas/entanglement.hpp"
#include "seqmeas/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqmeas {
namespace {

// reported[j][o] = p(reported outcome o | input j) for one node.
using NodeStatistics = std::array<std::array<double, 2>, 2>;

NodeStatistics node_statistics(const MeasurementKit& kit) {
  const KrausPair kraus = kraus_pair(kit);
  NodeStatistics s{};
  for (int j = 0; j < 2; ++j)
    for (int o = 0; o < 2; ++o) s[j][o] = reported_probability(kit, kraus, o, j);
  return s;
}

void accumulate_joint(const std::vector<NodeStatistics>& table, int depth, int input, int level, int node,
                      unsigned history, double weight, std::vector<double>& out) {
  if (level == depth) {
    out[history] += weight;
    return;
  }
  for (int o = 0; o < 2; ++o)
    accumulate_joint(table, depth, input, level + 1, 2 * node + 1 + o, (history << 1) | o,
                     weight * table[node][input][o], out);
}

std::vector<double> joint_from_table(const std::vector<NodeStatistics>& table, int depth, int input) {
  std::vector<double> out(std::size_t{1} << depth, 0.0);
  accumulate_joint(table, depth, input, 0, 0, 0u, 1.0, out);
  return out;
}

std::vector<NodeStatistics> statistics_table(const KitTree& tree) {
  std::vector<NodeStatistics> table(tree.node_count());
  for (int node = 0; node < tree.node_count(); ++node) table[node] = node_statistics(tree.kit(node));
  return table;
}

int guess_bit(unsigned sequence, int depth, KnowledgeEstimator estimator) {
  return estimator == KnowledgeEstimator::first_kit ? static_cast<int>((sequence >> (depth - 1)) & 1u)
                                                    : static_cast<int>(sequence & 1u);
}

int depth_of(std::size_t sequences) {
  int depth = 0;
  while ((std::size_t{1} << depth) < sequences) ++depth;
  return depth;
}

// Caches per-node outcome statistics so single-angle updates stay cheap.
class TreeObjective {
 public:
  explicit TreeObjective(KitTree tree)
      : tree_(std::move(tree)), table_(statistics_table(tree_)), depth_(tree_.depth()) {}

  // Knowledge of the tree cut after `depth` kits, guessing from the last of them.
  void truncate(int depth) { depth_ = depth; }

  double value() const {
    return knowledge_from_joint(joint_from_table(table_, depth_, 0), joint_from_table(table_, depth_, 1),
                                KnowledgeEstimator::last_kit);
  }

  double value_with(int node, double lambda) {
    const NodeStatistics saved = table_[node];
    table_[node] = node_statistics(MeasurementKit(tree_.strength(), MeterBasisAngle(lambda), tree_.imperfection()));
    const double v = value();
    table_[node] = saved;
    return v;
  }

  void set(int node, double lambda) {
    tree_.set_angle(node, MeterBasisAngle(lambda));
    table_[node] = node_statistics(tree_.kit(node));
  }

  const KitTree& tree() const { return tree_; }

 private:
  KitTree tree_;
  std::vector<NodeStatistics> table_;
  int depth_;
};

void require_steps(int n) {
  if (n < 1) throw std::invalid_argument("number of measurements must be at least 1");
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::single: return "single";
    case Strategy::incoherent: return "incoherent";
    case Strategy::independent: return "independent";
    case Strategy::adaptive: return "adaptive";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::single, Strategy::incoherent, Strategy::independent, Strategy::adaptive})
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

KitTree::KitTree(KitStrength psi, int depth, std::optional<PbsImperfection> pbs)
    : psi_(psi), depth_(depth), pbs_(pbs) {
  if (depth < 1 || depth > kMaxDepth) throw std::invalid_argument("kit tree depth outside [1, 16]");
  if (pbs_) pbs_->validate();
  angles_.assign((std::size_t{1} << depth) - 1, MeterBasisAngle(kPi / 4));
}

KitTree KitTree::adaptive_pair(KitStrength psi, MeterBasisAngle lambda0, MeterBasisAngle lambda1,
                               std::optional<PbsImperfection> pbs) {
  KitTree tree(psi, 2, pbs);
  tree.set_angle(1, lambda0);
  tree.set_angle(2, lambda1);
  return tree;
}

std::vector<double> joint_outcome_distribution(const KitTree& tree, int input) {
  return joint_from_table(statistics_table(tree), tree.depth(), input);
}

double knowledge_from_joint(const std::vector<double>& given0, const std::vector<double>& given1,
                            KnowledgeEstimator estimator) {
  if (given0.size() != given1.size() || given0.empty())
    throw std::invalid_argument("joint distributions must have equal, non-zero size");
  const int depth = depth_of(given0.size());
  double margin = 0.0;
  for (std::size_t s = 0; s < given0.size(); ++s) {
    const double diff = given0[s] - given1[s];
    if (estimator == KnowledgeEstimator::best_assignment)
      margin += std::abs(diff);
    else
      margin += guess_bit(static_cast<unsigned>(s), depth, estimator) == 0 ? diff : -diff;
  }
  return std::abs(margin) / 2;
}

double tree_knowledge(const KitTree& tree, KnowledgeEstimator estimator) {
  const auto table = statistics_table(tree);
  return knowledge_from_joint(joint_from_table(table, tree.depth(), 0), joint_from_table(table, tree.depth(), 1),
                              estimator);
}

namespace {

void evolve_branches(const KitTree& tree, const std::vector<KrausPair>& kraus, int level, int node,
                     unsigned history, const Matrix4& rho, std::vector<BranchLeaf>& leaves, Matrix4& total) {
  if (level == tree.depth()) {
    BranchLeaf& leaf = leaves[history];
    leaf.outcomes = history;
    leaf.probability = rho.trace().real();
    if (leaf.probability >= kUnreachableProbability) leaf.state = DensityMatrix4::normalized(rho);
    total += rho;
    return;
  }
  for (int o = 0; o < 2; ++o) {
    const auto branch = conjugate_map<double, 4>(rho, embed<double>(kraus[node][o], Qubit::B));
    evolve_branches(tree, kraus, level + 1, 2 * node + 1 + o, (history << 1) | o, branch.matrix, leaves, total);
  }
}

}  // namespace

BranchTree evolve(const KitTree& tree, const DensityMatrix4& initial) {
  std::vector<KrausPair> kraus;
  kraus.reserve(tree.node_count());
  for (int node = 0; node < tree.node_count(); ++node) kraus.push_back(kraus_pair(tree.kit(node)));
  std::vector<BranchLeaf> leaves(std::size_t{1} << tree.depth());
  Matrix4 total = Matrix4::Zero();
  evolve_branches(tree, kraus, 0, 0, 0u, initial.matrix(), leaves, total);
  return BranchTree{tree, std::move(leaves), DensityMatrix4(total)};
}

TradeoffPoint single_coherent(const MeasurementKit& kit, const DensityMatrix4& initial) {
  const double k = knowledge_of_kit(kit).value;
  return {k, k, concurrence(apply_kit(initial, kit).non_selective), Strategy::single};
}

TradeoffPoint incoherent_sequence(double k_bar, int n, const DensityMatrix4& initial) {
  if (!(k_bar >= 0.0 && k_bar <= 1.0)) throw std::out_of_range("incoherent knowledge outside [0, 1]");
  require_steps(n);
  Matrix4 rho = initial.matrix();
  double unmeasured = 1.0;
  for (int step = 0; step < n; ++step) {
    rho = k_bar * dephase(DensityMatrix4(rho)).matrix() + (1.0 - k_bar) * rho;
    unmeasured *= 1.0 - k_bar;
  }
  // The measured fraction is identified perfectly; the rest is a coin toss.
  return {k_bar, 1.0 - unmeasured, concurrence(DensityMatrix4(rho)), Strategy::incoherent};
}

TradeoffPoint independent_sequence(KitStrength psi, int n, const DensityMatrix4& initial,
                                   KnowledgeEstimator estimator, const std::optional<PbsImperfection>& pbs) {
  require_steps(n);
  const KitTree tree(psi, n, pbs);
  return {knowledge_of_kit(tree.kit(0)).value, tree_knowledge(tree, estimator),
          concurrence(evolve(tree, initial).non_selective), Strategy::independent};
}

TradeoffPoint independent_coherent_pair(KitStrength psi, const DensityMatrix4& initial,
                                        KnowledgeEstimator estimator, const std::optional<PbsImperfection>& pbs) {
  return independent_sequence(psi, 2, initial, estimator, pbs);
}

TradeoffPoint adaptive_coherent_pair(KitStrength psi, MeterBasisAngle lambda0, MeterBasisAngle lambda1,
                                     const DensityMatrix4& initial, std::optional<PbsImperfection> pbs) {
  const KitTree tree = KitTree::adaptive_pair(psi, lambda0, lambda1, pbs);
  return {knowledge_of_kit(tree.kit(0)).value, tree_knowledge(tree, KnowledgeEstimator::last_kit),
          concurrence(evolve(tree, initial).non_selective), Strategy::adaptive};
}

double adaptive_pair_knowledge(KitStrength psi, double lambda0, double lambda1,
                               const std::optional<PbsImperfection>& pbs) {
  return tree_knowledge(KitTree::adaptive_pair(psi, MeterBasisAngle(lambda0), MeterBasisAngle(lambda1), pbs),
                        KnowledgeEstimator::last_kit);
}

AdaptiveSolution optimize_adaptive_pair(KitStrength psi, double tol, const std::optional<PbsImperfection>& pbs) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("optimizer tolerance outside (0, 1e-3]");
  constexpr double kHi = kPi / 2;
  const double step = kHi / (kAngleGridPoints - 1);
  auto objective = [&](double l0, double l1) { return adaptive_pair_knowledge(psi, l0, l1, pbs); };

  double best0 = 0.0, best1 = 0.0, best = objective(0.0, 0.0);
  for (int i = 0; i < kAngleGridPoints; ++i) {
    const double l0 = kHi * i / (kAngleGridPoints - 1);
    for (int k = 0; k < kAngleGridPoints; ++k) {
      const double l1 = kHi * k / (kAngleGridPoints - 1);
      const double v = objective(l0, l1);
      if (v > best + kTieTolerance) {
        best = v;
        best0 = l0;
        best1 = l1;
      }
    }
  }

  int used = 0;
  bool converged = false;
  while (used < kMaxRefinementSteps) {
    const double start0 = best0, start1 = best1;
    const auto r0 = golden_section_maximize([&](double x) { return objective(x, best1); },
                                            std::max(0.0, best0 - step), std::min(kHi, best0 + step), tol,
                                            kMaxRefinementSteps - used);
    used += r0.iterations;
    if (r0.value > best) {
      best = r0.value;
      best0 = r0.x;
    }
    const auto r1 = golden_section_maximize([&](double x) { return objective(best0, x); },
                                            std::max(0.0, best1 - step), std::min(kHi, best1 + step), tol,
                                            kMaxRefinementSteps - used);
    used += r1.iterations;
    if (r1.value > best) {
      best = r1.value;
      best1 = r1.x;
    }
    if (r0.converged && r1.converged && std::abs(best0 - start0) < tol && std::abs(best1 - start1) < tol) {
      converged = true;
      break;
    }
  }
  return {MeterBasisAngle(best0), MeterBasisAngle(best1), best, converged, used};
}

AdaptiveSequenceResult adaptive_sequence(KitStrength psi, int n, double tol, const DensityMatrix4& initial,
                                         const std::optional<PbsImperfection>& pbs) {
  if (n < 1 || n > kMaxSequenceLength) throw std::invalid_argument("adaptive sequence length outside [1, 8]");
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("optimizer tolerance outside (0, 1e-3]");
  constexpr double kHi = kPi / 2;
  const double step = kHi / (kAngleGridPoints - 1);

  TreeObjective objective(KitTree(psi, n, pbs));
  bool converged = true;
  auto refine = [&](int node, double& current) {
    auto along = [&](double lambda) { return objective.value_with(node, lambda); };
    const auto coarse = grid_maximize(along, 0.0, kHi, kAngleGridPoints);
    if (coarse.value > current + kTieTolerance) {
      objective.set(node, coarse.x);
      current = coarse.value;
    }
    const double x = objective.tree().angle(node).value();
    const auto fine =
        golden_section_maximize(along, std::max(0.0, x - step), std::min(kHi, x + step), tol, kMaxRefinementSteps);
    converged = converged && fine.converged;
    if (fine.value > current) {
      objective.set(node, fine.x);
      current = fine.value;
    }
  };

  // Seed level by level, each level tuned as if it were the last kit. Starting
  // the ascent from uniform angles stalls: with identical final kits the
  // intermediate angles have no effect on the objective.
  for (int level = 1; level < n; ++level) {
    objective.truncate(level + 1);
    double current = objective.value();
    for (int node = KitTree::node_index(level, 0); node < KitTree::node_index(level + 1, 0); ++node)
      refine(node, current);
  }
  objective.truncate(n);
  double current = objective.value();
  for (int sweep = 0; sweep < kCoordinateSweeps; ++sweep)
    for (int node = 1; node < objective.tree().node_count(); ++node) refine(node, current);

  AdaptiveSequenceResult out{evolve(objective.tree(), initial), {}, 0.0, converged};
  out.point = {knowledge_of_kit(objective.tree().kit(0)).value, current, concurrence(out.tree.non_selective),
               Strategy::adaptive};
  out.conjectured_k_tot = std::sqrt(1.0 - std::pow(std::cos(2 * psi.value()), 2 * n));
  return out;
}

DensityMatrix4 non_selective_after_kits(KitStrength psi, int n, const DensityMatrix4& initial) {
  require_steps(n);
  DensityMatrix4 rho = initial;
  const MeasurementKit kit(psi);
  for (int step = 0; step < n; ++step) rho = apply_kit(rho, kit).non_selective;
  return rho;
}

std::vector<TradeoffPoint> accumulation_curve(Strategy strategy, std::span<const double> k_bar_grid, int n,
                                              const StrategyOptions& options) {
  require_steps(n);
  std::vector<TradeoffPoint> out;
  out.reserve(k_bar_grid.size());
  for (double k_bar : k_bar_grid) {
    if (!(k_bar >= 0.0 && k_bar <= 1.0)) throw std::out_of_range("knowledge grid value outside [0, 1]");
    const KitStrength psi = KitStrength::from_knowledge(k_bar);
    switch (strategy) {
      case Strategy::single:
        out.push_back(single_coherent(MeasurementKit(psi, MeterBasisAngle{}, options.pbs), options.initial));
        break;
      case Strategy::incoherent:
        out.push_back(incoherent_sequence(k_bar, n, options.initial));
        break;
      case Strategy::independent:
        out.push_back(independent_sequence(psi, n, options.initial, KnowledgeEstimator::first_kit, options.pbs));
        break;
      case Strategy::adaptive:
        out.push_back(adaptive_sequence(psi, n, options.tol, options.initial, options.pbs).point);
        break;
    }
  }
  return out;
}

double zeno_expansion(Strategy strategy, int n, double k_bar) {
  switch (strategy) {
    case Strategy::incoherent: return 1.0 - n * k_bar;
    case Strategy::single: return 1.0 - k_bar * k_bar / 2;
    case Strategy::independent:
    case Strategy::adaptive: return 1.0 - n * k_bar * k_bar / 2;
  }
  return 1.0;
}

std::vector<ZenoRow> zeno_residuals(int n, std::span<const double> k_bar_grid) {
  require_steps(n);
  const DensityMatrix4 singlet = singlet_state();
  std::vector<ZenoRow> rows;
  rows.reserve(k_bar_grid.size());
  for (double k_bar : k_bar_grid) {
    if (!(k_bar > 0.0 && k_bar <= 0.3)) throw std::out_of_range("Zeno grid value outside (0, 0.3]");
    const double c_adapt = concurrence(non_selective_after_kits(KitStrength::from_knowledge(k_bar), n, singlet));
    const double c_inc = incoherent_sequence(k_bar, n, singlet).c;
    rows.push_back({k_bar, c_adapt, std::abs(c_adapt - zeno_expansion(Strategy::adaptive, n, k_bar)), c_inc,
                    std::abs(c_inc - zeno_expansion(Strategy::incoherent, n, k_bar))});
  }
  return rows;
}

}  // namespace seqmeas
