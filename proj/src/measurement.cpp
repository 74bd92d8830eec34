#include "seqmeas/measurement.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace seqmeas {
namespace {

constexpr double kRangeSlack = 1e-12;

double checked_range(double x, double lo, double hi, const char* what) {
  if (!(x >= lo - kRangeSlack && x <= hi + kRangeSlack)) {
    std::ostringstream os;
    os << what << " = " << x << " outside [" << lo << ", " << hi << "]";
    throw std::out_of_range(os.str());
  }
  return std::clamp(x, lo, hi);
}

}  // namespace

KitStrength::KitStrength(double psi) : psi_(checked_range(psi, 0.0, kPi / 4, "kit strength psi")) {}

KitStrength KitStrength::from_knowledge(double k_bar) {
  return KitStrength(std::asin(checked_range(k_bar, 0.0, 1.0, "knowledge")) / 2);
}

MeterBasisAngle::MeterBasisAngle(double lambda)
    : lambda_(checked_range(lambda, 0.0, kPi / 2, "meter basis angle lambda")) {}

PbsImperfection PbsImperfection::from_ports(double t_h, double r_v) {
  PbsImperfection p{t_h, r_v, 1.0 - t_h, 1.0 - r_v};
  p.validate();
  return p;
}

void PbsImperfection::validate() const {
  for (double x : {t_h, r_v, r_h, t_v})
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("PBS port probability outside [0, 1]");
  if (std::abs(t_h + r_h - 1.0) > 1e-12 || std::abs(t_v + r_v - 1.0) > 1e-12)
    throw std::invalid_argument("PBS port probabilities must satisfy t_H + r_H = t_V + r_V = 1");
}

MeasurementKit::MeasurementKit(KitStrength s, MeterBasisAngle b, std::optional<PbsImperfection> pbs)
    : strength(s), meter_basis(b), imperfection(pbs) {
  if (imperfection) imperfection->validate();
}

double knowledge_from_conditionals(const Eigen::Matrix2d& p) {
  return std::abs(p(0, 0) + p(1, 1) - p(0, 1) - p(1, 0)) / 2;
}

std::pair<PureState2, PureState2> meter_states(KitStrength psi) {
  const double c = std::cos(psi.value());
  const double s = std::sin(psi.value());
  return {PureState2(Ket2(c, s)), PureState2(Ket2(c, -s))};
}

KrausPair kraus_pair(const MeasurementKit& kit) {
  const auto [alpha0, alpha1] = meter_states(kit.strength);
  const double lambda = kit.meter_basis.value();
  const Ket2 beta(std::cos(lambda), std::sin(lambda));
  const Ket2 beta_perp(-std::sin(lambda), std::cos(lambda));

  KrausPair k;
  k.m0 = Matrix2::Zero();
  k.m1 = Matrix2::Zero();
  k.m0(0, 0) = beta.dot(alpha0.amplitudes());
  k.m0(1, 1) = beta.dot(alpha1.amplitudes());
  k.m1(0, 0) = beta_perp.dot(alpha0.amplitudes());
  k.m1(1, 1) = beta_perp.dot(alpha1.amplitudes());
  return k;
}

double outcome_probability(const KrausPair& kraus, int outcome, int input) {
  return std::norm(kraus[outcome](input, input));
}

double reported_probability(const MeasurementKit& kit, const KrausPair& kraus, int outcome, int input) {
  const double ideal = outcome_probability(kraus, outcome, input);
  if (!kit.imperfection) return ideal;
  const double flip = kit.imperfection->flip_probability(input);
  return (1.0 - flip) * ideal + flip * outcome_probability(kraus, 1 - outcome, input);
}

KnowledgeEstimate knowledge_of_kit(const MeasurementKit& kit) {
  const KrausPair kraus = kraus_pair(kit);
  KnowledgeEstimate est;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) est.conditional(j, i) = reported_probability(kit, kraus, i, j);
  est.value = knowledge_from_conditionals(est.conditional);
  return est;
}

BranchSet apply_kit(const DensityMatrix4& rho, const MeasurementKit& kit, Qubit target) {
  const KrausPair kraus = kraus_pair(kit);
  Matrix4 total = Matrix4::Zero();
  std::array<Branch, 2> branches;
  for (int o = 0; o < 2; ++o) {
    const auto branch = conjugate_map(rho, embed<double>(kraus[o], target));
    total += branch.matrix;
    branches[o].probability = branch.weight;
    if (branch.weight >= kUnreachableProbability)
      branches[o].state = DensityMatrix4::normalized(branch.matrix);
  }
  return {branches, DensityMatrix4(total)};
}

StrengthFromWaveplate waveplate_to_strength(double theta_b) {
  const double t = checked_range(theta_b, 0.0, kPi / 8, "waveplate angle theta_b");
  return {KitStrength(kPi / 4 - 2 * t), std::abs(std::cos(4 * t))};
}

double strength_to_waveplate(KitStrength psi) { return (kPi / 4 - psi.value()) / 2; }

DensityMatrix4 singlet_state() {
  const double h = 1.0 / std::sqrt(2.0);
  return DensityMatrix4(PureState4(Ket4(0, -h, h, 0)));
}

DensityMatrix4 werner_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::out_of_range("Werner parameter outside [0, 1]");
  return DensityMatrix4(p * singlet_state().matrix() + (1 - p) * Matrix4::Identity() / 4.0);
}

DensityMatrix4 dephase(const DensityMatrix4& rho, Qubit target) {
  Matrix4 out = Matrix4::Zero();
  for (int j = 0; j < 2; ++j) {
    Matrix2 proj = Matrix2::Zero();
    proj(j, j) = 1;
    out += conjugate_map(rho, embed<double>(proj, target)).matrix;
  }
  return DensityMatrix4(out);
}

}  // namespace seqmeas
