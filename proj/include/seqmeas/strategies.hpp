// Measurement strategies on qubit B of a shared two-qubit state, and their
// knowledge/disturbance trade-off.
//
// Knowledge is always evaluated on equal-prior basis inputs |0>, |1> of qubit B;
// disturbance is the concurrence of the outcome-averaged (non-selective) state.
#ifndef SEQMEAS_STRATEGIES_HPP
#define SEQMEAS_STRATEGIES_HPP

#include "seqmeas/measurement.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqmeas {

enum class Strategy { single, incoherent, independent, adaptive };

std::string to_string(Strategy s);
/// Throws std::invalid_argument on unknown names.
Strategy parse_strategy(std::string_view name);

struct TradeoffPoint {
  double k_bar = 0.0;  // knowledge of one kit performed alone
  double k_tot = 0.0;  // accumulated knowledge
  double c = 1.0;      // final non-selective concurrence
  Strategy strategy = Strategy::single;
};

/// How an outcome sequence is turned into a guess of the input.
enum class KnowledgeEstimator {
  last_kit,         // guess = outcome of the final kit
  first_kit,        // group sequences by the first outcome
  best_assignment,  // best of all sequence -> guess maps
};

/// Sequence of kits of equal strength with outcome-conditioned meter angles.
/// Nodes use heap layout: node 0 is the first kit, node k's successors are
/// 2k+1 (after outcome 0) and 2k+2 (after outcome 1). Depth d holds 2^d nodes.
class KitTree {
 public:
  static constexpr int kMaxDepth = 16;

  /// All meter angles start at pi/4.
  KitTree(KitStrength psi, int depth, std::optional<PbsImperfection> pbs = std::nullopt);

  /// First kit at pi/4, second at lambda0 / lambda1 after first outcome 0 / 1.
  static KitTree adaptive_pair(KitStrength psi, MeterBasisAngle lambda0, MeterBasisAngle lambda1,
                               std::optional<PbsImperfection> pbs = std::nullopt);

  int depth() const { return depth_; }
  int node_count() const { return static_cast<int>(angles_.size()); }
  static int node_index(int level, unsigned history) { return (1 << level) - 1 + static_cast<int>(history); }

  KitStrength strength() const { return psi_; }
  const std::optional<PbsImperfection>& imperfection() const { return pbs_; }
  MeterBasisAngle angle(int node) const { return angles_.at(node); }
  void set_angle(int node, MeterBasisAngle lambda) { angles_.at(node) = lambda; }
  MeasurementKit kit(int node) const { return MeasurementKit(psi_, angles_.at(node), pbs_); }

 private:
  KitStrength psi_;
  int depth_;
  std::optional<PbsImperfection> pbs_;
  std::vector<MeterBasisAngle> angles_;
};

/// p(reported outcome sequence | input j), indexed by the sequence bits with the
/// first kit most significant. Adaptation follows the reported outcomes.
std::vector<double> joint_outcome_distribution(const KitTree& tree, int input);

/// Knowledge from the two joint distributions (inputs 0 and 1).
double knowledge_from_joint(const std::vector<double>& given0, const std::vector<double>& given1,
                            KnowledgeEstimator estimator);

double tree_knowledge(const KitTree& tree, KnowledgeEstimator estimator = KnowledgeEstimator::last_kit);

struct BranchLeaf {
  unsigned outcomes = 0;
  double probability = 0.0;
  std::optional<DensityMatrix4> state;  // empty when unreachable
};

struct BranchTree {
  KitTree kits;
  std::vector<BranchLeaf> leaves;  // 2^depth entries, index = outcome bits
  DensityMatrix4 non_selective;
};

/// Propagates a state through every branch of the tree (acting on qubit B).
BranchTree evolve(const KitTree& tree, const DensityMatrix4& initial);

TradeoffPoint single_coherent(const MeasurementKit& kit, const DensityMatrix4& initial);

/// Each step projects B in the computational basis with probability k_bar and
/// leaves it untouched otherwise.
TradeoffPoint incoherent_sequence(double k_bar, int n, const DensityMatrix4& initial);

/// n kits at lambda = pi/4 applied regardless of earlier outcomes.
TradeoffPoint independent_sequence(KitStrength psi, int n, const DensityMatrix4& initial,
                                   KnowledgeEstimator estimator = KnowledgeEstimator::first_kit,
                                   const std::optional<PbsImperfection>& pbs = std::nullopt);

TradeoffPoint independent_coherent_pair(KitStrength psi, const DensityMatrix4& initial,
                                        KnowledgeEstimator estimator = KnowledgeEstimator::first_kit,
                                        const std::optional<PbsImperfection>& pbs = std::nullopt);

TradeoffPoint adaptive_coherent_pair(KitStrength psi, MeterBasisAngle lambda0, MeterBasisAngle lambda1,
                                     const DensityMatrix4& initial,
                                     std::optional<PbsImperfection> pbs = std::nullopt);

/// Knowledge part of adaptive_coherent_pair only (the optimizer's objective).
double adaptive_pair_knowledge(KitStrength psi, double lambda0, double lambda1,
                               const std::optional<PbsImperfection>& pbs = std::nullopt);

struct AdaptiveSolution {
  MeterBasisAngle lambda0;
  MeterBasisAngle lambda1;
  double k_tot = 0.0;
  bool converged = false;
  int iterations = 0;  // refinement steps
};

inline constexpr int kAngleGridPoints = 181;
inline constexpr int kMaxRefinementSteps = 10000;

/// Maximizes adaptive_pair_knowledge over [0, pi/2]^2: full grid scan, then
/// alternating golden-section refinement until the bracket is below tol.
AdaptiveSolution optimize_adaptive_pair(KitStrength psi, double tol = 1e-9,
                                        const std::optional<PbsImperfection>& pbs = std::nullopt);

struct AdaptiveSequenceResult {
  BranchTree tree;
  TradeoffPoint point;
  double conjectured_k_tot = 0.0;  // sqrt(1 - cos^{2n} 2 psi), a check value only
  bool converged = false;
};

inline constexpr int kMaxSequenceLength = 8;
inline constexpr int kCoordinateSweeps = 3;

/// Coordinate ascent over every non-root node angle (grid scan then golden
/// section per node, three sweeps).
AdaptiveSequenceResult adaptive_sequence(KitStrength psi, int n, double tol = 1e-9,
                                         const DensityMatrix4& initial = singlet_state(),
                                         const std::optional<PbsImperfection>& pbs = std::nullopt);

/// Outcome-averaged state after n kits of strength psi (independent of meter angles).
DensityMatrix4 non_selective_after_kits(KitStrength psi, int n, const DensityMatrix4& initial);

struct StrategyOptions {
  DensityMatrix4 initial = singlet_state();
  std::optional<PbsImperfection> pbs;
  double tol = 1e-9;
};

/// (K_tot, C) against K_bar; coherent strategies use psi = asin(K_bar)/2.
/// Strategy::single ignores n.
std::vector<TradeoffPoint> accumulation_curve(Strategy strategy, std::span<const double> k_bar_grid, int n,
                                              const StrategyOptions& options = {});

struct ZenoRow {
  double k_bar;
  double c_adaptive;
  double residual_adaptive;  // |C - (1 - n k^2 / 2)|
  double c_incoherent;
  double residual_incoherent;  // |C - (1 - n k)|
};

double zeno_expansion(Strategy strategy, int n, double k_bar);

/// Exact concurrences on the singlet compared to the small-K_bar expansions.
/// Grid values must lie in (0, 0.3].
std::vector<ZenoRow> zeno_residuals(int n, std::span<const double> k_bar_grid);

}  // namespace seqmeas

#endif  // SEQMEAS_STRATEGIES_HPP
