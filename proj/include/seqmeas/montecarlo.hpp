// Finite-shot emulation: outcome sampling through kit chains, knowledge
// estimation with binomial errors, and two-qubit Pauli tomography.
#ifndef SEQMEAS_MONTECARLO_HPP
#define SEQMEAS_MONTECARLO_HPP

#include "seqmeas/strategies.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace seqmeas {

struct RngSeed {
  std::uint64_t value = 42;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the index-th independent task: base XOR splitmix64(index).
inline RngSeed derive_seed(RngSeed base, std::uint64_t index) { return {base.value ^ splitmix64(index)}; }

/// Seedable generator. Each task owns its own instance; derive child
/// generators with split() rather than sharing one.
class Rng {
 public:
  explicit Rng(RngSeed seed) : seed_(seed), engine_(seed.value) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t binomial(std::uint64_t trials, double p);

  Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

 private:
  RngSeed seed_;
  std::mt19937_64 engine_;
};

/// Tallies keyed by label (input "0"/"1", or a tomography setting such as "XZ")
/// and outcome string (one character per kit / qubit, '0' or '1').
struct ShotCounts {
  std::map<std::string, std::map<std::string, std::uint64_t>> counts;

  void add(const std::string& label, const std::string& outcome, std::uint64_t n = 1) { counts[label][outcome] += n; }
  bool has(const std::string& label) const { return counts.count(label) != 0; }
  std::uint64_t total(const std::string& label) const;
  std::uint64_t count(const std::string& label, const std::string& outcome) const;
};

/// Normalized outcome frequencies. shots == 0 marks exact probabilities.
struct Frequencies {
  std::map<std::string, std::map<std::string, double>> probabilities;
  std::map<std::string, std::uint64_t> shots;

  static Frequencies from_counts(const ShotCounts& counts);
};

std::string outcome_string(unsigned bits, int length);

/// Per-shot Born-rule sampling of the reported outcome sequence for basis input
/// |input>, following the tree's adaptation and outcome-flip model.
ShotCounts sample_kit_chain(int input, const KitTree& chain, std::uint64_t shots, RngSeed seed);

/// Exact outcome probabilities in the same layout as sample_kit_chain (both inputs).
Frequencies exact_chain_frequencies(const KitTree& chain);

struct KnowledgeSample {
  double k_hat = 0.0;
  double sigma = 0.0;
};

/// Plug-in estimate on labels "0" and "1". sigma^2 = sum_j f_j (1 - f_j) / n_j
/// where f_j is the empirical success frequency for input j.
KnowledgeSample estimate_knowledge(const Frequencies& freqs, KnowledgeEstimator estimator);
KnowledgeSample estimate_knowledge(const ShotCounts& counts, KnowledgeEstimator estimator);

struct TomographySettings {
  std::uint64_t shots_per_setting = 10000;
};

/// The nine local Pauli settings "XX", "XY", ..., "ZZ".
const std::vector<std::string>& tomography_labels();

/// Outcome bit 0 is the +1 eigenvector of the local Pauli, bit 1 the -1 eigenvector.
Frequencies exact_tomography_frequencies(const DensityMatrix4& rho);

/// Multinomial sample of every setting (drawn as a chain of binomials).
ShotCounts simulate_tomography(const DensityMatrix4& rho, const TomographySettings& settings, RngSeed seed);

struct ReconstructedState {
  Matrix4 raw;            // Hermitian, unit trace, possibly not positive
  DensityMatrix4 physical;
  double distance = 0.0;  // Frobenius norm of raw - physical
};

/// Clamps negative eigenvalues to zero and renormalizes. Matrices whose
/// spectrum is already >= -1e-12 are returned unchanged with distance 0.
ReconstructedState project_to_physical(const Matrix4& raw);

/// Linear inversion of the Pauli expansion with S_00 = 1; single-qubit terms
/// are averaged over the three settings that share the basis.
ReconstructedState reconstruct(const Frequencies& freqs);
ReconstructedState reconstruct(const ShotCounts& counts);

struct ConcurrenceSample {
  double c_hat = 0.0;
  double sigma = 0.0;
};

/// Concurrence of the reconstruction, with a nonparametric bootstrap error.
ConcurrenceSample estimate_concurrence(const ShotCounts& counts, RngSeed seed, int resamples = 16);

/// Kit tree realizing a strategy (the adaptive pair uses optimized angles).
/// Strategy::incoherent has no kit realization and is rejected.
KitTree protocol_tree(Strategy strategy, KitStrength psi, const std::optional<PbsImperfection>& pbs = std::nullopt);

KnowledgeEstimator protocol_estimator(Strategy strategy);

struct ExperimentEstimate {
  KnowledgeSample knowledge;
  ConcurrenceSample concurrence;
  TradeoffPoint analytic;
};

/// Samples both basis inputs through the chain (shots each) and tomographs the
/// non-selective final state (shots per setting).
ExperimentEstimate emulate_experiment(const KitTree& chain, KnowledgeEstimator estimator,
                                      const DensityMatrix4& initial, std::uint64_t shots, RngSeed seed,
                                      int bootstrap = 16);

}  // namespace seqmeas

#endif  // SEQMEAS_MONTECARLO_HPP
