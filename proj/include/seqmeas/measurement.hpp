// Measurement kit: a meter coupled to qubit B with strength psi, then read out
// in a basis at angle lambda. The meter always starts in |0>_M, so the
// system-meter unitary is contracted into a diagonal Kraus pair on B.
#ifndef SEQMEAS_MEASUREMENT_HPP
#define SEQMEAS_MEASUREMENT_HPP

#include "seqmeas/qcore.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <utility>

namespace seqmeas {

inline constexpr double kPi = std::numbers::pi;

/// Coupling strength psi in [0, pi/4].
class KitStrength {
 public:
  explicit KitStrength(double psi);
  double value() const { return psi_; }

  /// psi = asin(k_bar) / 2, the principal branch.
  static KitStrength from_knowledge(double k_bar);

 private:
  double psi_;
};

/// Meter readout angle lambda in [0, pi/2]; |beta> = cos(lambda)|0> + sin(lambda)|1>.
class MeterBasisAngle {
 public:
  explicit MeterBasisAngle(double lambda = kPi / 4);
  double value() const { return lambda_; }

 private:
  double lambda_;
};

/// Polarizing beam-splitter cross-talk, modelled as outcome mislabelling:
/// an H (|0>) photon is reported with the wrong outcome with probability r_H,
/// a V (|1>) photon with probability t_V.
struct PbsImperfection {
  double t_h = 1.0;
  double r_v = 1.0;
  double r_h = 0.0;
  double t_v = 0.0;

  /// Builds a consistent set from the two transmission/reflection values.
  static PbsImperfection from_ports(double t_h, double r_v);

  /// Throws std::invalid_argument unless t_H + r_H = t_V + r_V = 1 and all lie in [0, 1].
  void validate() const;

  /// Probability that the reported outcome differs from the ideal one for input |j>.
  double flip_probability(int input) const { return input == 0 ? r_h : t_v; }
};

struct MeasurementKit {
  KitStrength strength{0.0};
  MeterBasisAngle meter_basis{};
  std::optional<PbsImperfection> imperfection{};

  MeasurementKit() = default;
  MeasurementKit(KitStrength s, MeterBasisAngle b = MeterBasisAngle{},  // NOLINT
                 std::optional<PbsImperfection> pbs = std::nullopt);
};

struct KrausPair {
  Matrix2 m0;
  Matrix2 m1;
  const Matrix2& operator[](int outcome) const { return outcome == 0 ? m0 : m1; }
};

/// Outcome statistics for basis inputs |0>, |1>.
struct KnowledgeEstimate {
  double value = 0.0;
  // conditional(j, i) = p(i | j): guess i given input j. Rows sum to 1.
  Eigen::Matrix2d conditional = Eigen::Matrix2d::Zero();

  double p(int guess, int input) const { return conditional(input, guess); }
};

/// K = |p(0|0) + p(1|1) - p(1|0) - p(0|1)| / 2
double knowledge_from_conditionals(const Eigen::Matrix2d& conditional);

/// alpha_0 = (cos psi, sin psi), alpha_1 = (cos psi, -sin psi)
std::pair<PureState2, PureState2> meter_states(KitStrength psi);

/// m0 = diag(<beta|alpha_0>, <beta|alpha_1>), m1 = diag(<beta_perp|alpha_0>, <beta_perp|alpha_1>).
/// The imperfection is not part of the quantum operation.
KrausPair kraus_pair(const MeasurementKit& kit);

/// Ideal outcome probability p(outcome | input) for a basis-state input.
double outcome_probability(const KrausPair& kraus, int outcome, int input);

/// Same after the kit's mislabelling model.
double reported_probability(const MeasurementKit& kit, const KrausPair& kraus, int outcome, int input);

KnowledgeEstimate knowledge_of_kit(const MeasurementKit& kit);

struct Branch {
  double probability = 0.0;
  std::optional<DensityMatrix4> state;  // empty when unreachable

  bool reachable() const { return state.has_value(); }
};

/// Branches with probability below this are flagged unreachable.
inline constexpr double kUnreachableProbability = 1e-14;

struct BranchSet {
  std::array<Branch, 2> branches;
  DensityMatrix4 non_selective;
};

BranchSet apply_kit(const DensityMatrix4& rho, const MeasurementKit& kit, Qubit target = Qubit::B);

struct StrengthFromWaveplate {
  KitStrength psi;
  double k;
};

/// psi = pi/4 - 2 theta_b, K = |cos 4 theta_b|, theta_b in [0, pi/8].
StrengthFromWaveplate waveplate_to_strength(double theta_b);

/// Inverse of the above: theta_b = (pi/4 - psi) / 2.
double strength_to_waveplate(KitStrength psi);

/// Optimal-configuration waveplate pair (theta_a = theta_b + pi/4).
struct WaveplateAngles {
  double theta_a;
  double theta_b;

  static WaveplateAngles optimal(double theta_b) { return {theta_b + kPi / 4, theta_b}; }
};

/// (|10> - |01>) / sqrt 2
DensityMatrix4 singlet_state();

/// p |psi-><psi-| + (1 - p) I/4
DensityMatrix4 werner_state(double p);

/// Complete dephasing of the target qubit in the computational basis.
DensityMatrix4 dephase(const DensityMatrix4& rho, Qubit target = Qubit::B);

}  // namespace seqmeas

#endif  // SEQMEAS_MEASUREMENT_HPP
