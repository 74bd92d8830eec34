#include "seqmeas/montecarlo.hpp"

#include "seqmeas/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace seqmeas {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::binomial(std::uint64_t trials, double p) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<std::uint64_t>(trials, p)(engine_);
}

std::uint64_t ShotCounts::total(const std::string& label) const {
  const auto it = counts.find(label);
  if (it == counts.end()) return 0;
  std::uint64_t sum = 0;
  for (const auto& [outcome, n] : it->second) sum += n;
  return sum;
}

std::uint64_t ShotCounts::count(const std::string& label, const std::string& outcome) const {
  const auto it = counts.find(label);
  if (it == counts.end()) return 0;
  const auto jt = it->second.find(outcome);
  return jt == it->second.end() ? 0 : jt->second;
}

Frequencies Frequencies::from_counts(const ShotCounts& counts) {
  Frequencies f;
  for (const auto& [label, outcomes] : counts.counts) {
    const std::uint64_t total = counts.total(label);
    if (total == 0) throw std::invalid_argument("no shots recorded for label '" + label + "'");
    for (const auto& [outcome, n] : outcomes)
      f.probabilities[label][outcome] = static_cast<double>(n) / static_cast<double>(total);
    f.shots[label] = total;
  }
  return f;
}

std::string outcome_string(unsigned bits, int length) {
  std::string s(static_cast<std::size_t>(length), '0');
  for (int k = 0; k < length; ++k)
    if ((bits >> (length - 1 - k)) & 1u) s[static_cast<std::size_t>(k)] = '1';
  return s;
}

ShotCounts sample_kit_chain(int input, const KitTree& chain, std::uint64_t shots, RngSeed seed) {
  if (input != 0 && input != 1) throw std::invalid_argument("input label must be 0 or 1");
  if (shots == 0) throw std::invalid_argument("shots must be at least 1");

  std::vector<double> p0(chain.node_count());
  for (int node = 0; node < chain.node_count(); ++node)
    p0[node] = outcome_probability(kraus_pair(chain.kit(node)), 0, input);
  const double flip = chain.imperfection() ? chain.imperfection()->flip_probability(input) : 0.0;

  Rng rng(seed);
  std::vector<std::uint64_t> tally(std::size_t{1} << chain.depth(), 0);
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    int node = 0;
    unsigned bits = 0;
    for (int level = 0; level < chain.depth(); ++level) {
      int outcome = rng.uniform() < p0[node] ? 0 : 1;
      if (flip > 0.0 && rng.uniform() < flip) outcome ^= 1;
      bits = (bits << 1) | static_cast<unsigned>(outcome);
      node = 2 * node + 1 + outcome;
    }
    ++tally[bits];
  }

  ShotCounts out;
  const std::string label = input == 0 ? "0" : "1";
  for (std::size_t bits = 0; bits < tally.size(); ++bits)
    if (tally[bits] != 0) out.add(label, outcome_string(static_cast<unsigned>(bits), chain.depth()), tally[bits]);
  return out;
}

Frequencies exact_chain_frequencies(const KitTree& chain) {
  Frequencies f;
  for (int input = 0; input < 2; ++input) {
    const std::string label = input == 0 ? "0" : "1";
    const auto joint = joint_outcome_distribution(chain, input);
    for (std::size_t bits = 0; bits < joint.size(); ++bits)
      f.probabilities[label][outcome_string(static_cast<unsigned>(bits), chain.depth())] = joint[bits];
    f.shots[label] = 0;
  }
  return f;
}

KnowledgeSample estimate_knowledge(const Frequencies& freqs, KnowledgeEstimator estimator) {
  const auto it0 = freqs.probabilities.find("0");
  const auto it1 = freqs.probabilities.find("1");
  if (it0 == freqs.probabilities.end() || it1 == freqs.probabilities.end())
    throw std::invalid_argument("knowledge estimate needs outcomes for both inputs 0 and 1");

  auto prob = [](const std::map<std::string, double>& m, const std::string& key) {
    const auto it = m.find(key);
    return it == m.end() ? 0.0 : it->second;
  };
  auto guess = [&](const std::string& seq) {
    switch (estimator) {
      case KnowledgeEstimator::first_kit: return seq.front() == '1' ? 1 : 0;
      case KnowledgeEstimator::last_kit: return seq.back() == '1' ? 1 : 0;
      case KnowledgeEstimator::best_assignment: return prob(it1->second, seq) > prob(it0->second, seq) ? 1 : 0;
    }
    return 0;
  };

  std::array<double, 2> success{0.0, 0.0};
  for (int j = 0; j < 2; ++j)
    for (const auto& [seq, f] : (j == 0 ? it0 : it1)->second) {
      if (seq.empty()) throw std::invalid_argument("empty outcome sequence");
      if (guess(seq) == j) success[j] += f;
    }

  KnowledgeSample out;
  out.k_hat = std::abs(success[0] + success[1] - 1.0);
  double var = 0.0;
  for (int j = 0; j < 2; ++j) {
    const auto n = freqs.shots.find(j == 0 ? "0" : "1");
    if (n != freqs.shots.end() && n->second > 0)
      var += success[j] * (1.0 - success[j]) / static_cast<double>(n->second);
  }
  out.sigma = std::sqrt(var);
  return out;
}

KnowledgeSample estimate_knowledge(const ShotCounts& counts, KnowledgeEstimator estimator) {
  for (const char* label : {"0", "1"})
    if (counts.total(label) == 0)
      throw std::invalid_argument(std::string("zero shots for input label ") + label);
  return estimate_knowledge(Frequencies::from_counts(counts), estimator);
}

// ---------------------------------------------------------------------------
// Tomography

namespace {

Matrix2 pauli(int index) {
  switch (index) {
    case 1: return pauli_x();
    case 2: return pauli_y();
    case 3: return pauli_z();
    default: return Matrix2::Identity();
  }
}

int pauli_index(char c) {
  switch (c) {
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
  }
  throw std::invalid_argument(std::string("unknown Pauli basis '") + c + "'");
}

Matrix2 local_projector(int basis, int bit) {
  return (Matrix2::Identity() + (bit == 0 ? 1.0 : -1.0) * pauli(basis)) / 2.0;
}

std::array<double, 4> setting_probabilities(const DensityMatrix4& rho, const std::string& label) {
  std::array<double, 4> p{};
  const int a = pauli_index(label[0]);
  const int b = pauli_index(label[1]);
  double sum = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const Matrix4 proj = tensor_product(local_projector(a, x), local_projector(b, y));
      const double v = std::max(0.0, (rho.matrix() * proj).trace().real());
      p[static_cast<std::size_t>(2 * x + y)] = v;
      sum += v;
    }
  for (double& v : p) v /= sum;
  return p;
}

template <std::size_t N>
std::array<std::uint64_t, N> multinomial(Rng& rng, std::uint64_t shots, const std::array<double, N>& p) {
  std::array<std::uint64_t, N> out{};
  std::uint64_t remaining = shots;
  double remaining_p = 1.0;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    const std::uint64_t c = remaining_p > 0.0 ? rng.binomial(remaining, std::min(1.0, p[k] / remaining_p)) : 0;
    out[k] = c;
    remaining -= c;
    remaining_p -= p[k];
  }
  out[N - 1] = remaining;
  return out;
}

}  // namespace

const std::vector<std::string>& tomography_labels() {
  static const std::vector<std::string> labels = {"XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ"};
  return labels;
}

Frequencies exact_tomography_frequencies(const DensityMatrix4& rho) {
  Frequencies f;
  for (const auto& label : tomography_labels()) {
    const auto p = setting_probabilities(rho, label);
    for (unsigned k = 0; k < 4; ++k) f.probabilities[label][outcome_string(k, 2)] = p[k];
    f.shots[label] = 0;
  }
  return f;
}

ShotCounts simulate_tomography(const DensityMatrix4& rho, const TomographySettings& settings, RngSeed seed) {
  if (settings.shots_per_setting == 0) throw std::invalid_argument("shots per setting must be at least 1");
  Rng rng(seed);
  ShotCounts out;
  for (const auto& label : tomography_labels()) {
    const auto counts = multinomial(rng, settings.shots_per_setting, setting_probabilities(rho, label));
    for (unsigned k = 0; k < 4; ++k) out.add(label, outcome_string(k, 2), counts[k]);
  }
  return out;
}

ReconstructedState project_to_physical(const Matrix4& raw) {
  const auto eig = hermitian_eigensystem<double, 4>(raw);
  if (eig.values(0) >= -1e-12) return {raw, DensityMatrix4(raw), 0.0};
  Eigen::Vector4d clamped = eig.values.cwiseMax(0.0);
  clamped /= clamped.sum();
  const Matrix4 physical = eig.vectors * clamped.cast<std::complex<double>>().asDiagonal() * eig.vectors.adjoint();
  return {raw, DensityMatrix4(physical), (raw - physical).norm()};
}

ReconstructedState reconstruct(const Frequencies& freqs) {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(0, 0) = 1.0;
  for (const auto& label : tomography_labels()) {
    const auto it = freqs.probabilities.find(label);
    if (it == freqs.probabilities.end()) throw std::invalid_argument("tomography setting " + label + " is missing");
    const int a = pauli_index(label[0]);
    const int b = pauli_index(label[1]);
    double total = 0.0;
    for (const auto& [outcome, f] : it->second) total += f;
    if (!(total > 0.0)) throw std::invalid_argument("tomography setting " + label + " has no data");
    for (const auto& [outcome, f] : it->second) {
      if (outcome.size() != 2) throw std::invalid_argument("tomography outcomes must have two bits");
      const double sa = outcome[0] == '0' ? 1.0 : -1.0;
      const double sb = outcome[1] == '0' ? 1.0 : -1.0;
      const double w = f / total;
      s(a, b) += sa * sb * w;
      s(a, 0) += sa * w / 3.0;
      s(0, b) += sb * w / 3.0;
    }
  }
  Matrix4 raw = Matrix4::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) raw += s(i, j) * tensor_product(pauli(i), pauli(j));
  raw /= 4.0;
  return project_to_physical(raw);
}

ReconstructedState reconstruct(const ShotCounts& counts) { return reconstruct(Frequencies::from_counts(counts)); }

ConcurrenceSample estimate_concurrence(const ShotCounts& counts, RngSeed seed, int resamples) {
  const Frequencies freqs = Frequencies::from_counts(counts);
  ConcurrenceSample out;
  out.c_hat = concurrence(reconstruct(freqs).physical);
  if (resamples < 2) return out;

  Rng rng(seed);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    ShotCounts resampled;
    for (const auto& label : tomography_labels()) {
      std::array<double, 4> p{};
      for (unsigned k = 0; k < 4; ++k) {
        const auto it = freqs.probabilities.at(label).find(outcome_string(k, 2));
        p[k] = it == freqs.probabilities.at(label).end() ? 0.0 : it->second;
      }
      const auto c = multinomial(rng, freqs.shots.at(label), p);
      for (unsigned k = 0; k < 4; ++k) resampled.add(label, outcome_string(k, 2), c[k]);
    }
    values.push_back(concurrence(reconstruct(resampled).physical));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  out.sigma = std::sqrt(var / static_cast<double>(values.size() - 1));
  return out;
}

KitTree protocol_tree(Strategy strategy, KitStrength psi, const std::optional<PbsImperfection>& pbs) {
  switch (strategy) {
    case Strategy::single: return KitTree(psi, 1, pbs);
    case Strategy::independent: return KitTree(psi, 2, pbs);
    case Strategy::adaptive: {
      const AdaptiveSolution opt = optimize_adaptive_pair(psi, 1e-9, pbs);
      return KitTree::adaptive_pair(psi, opt.lambda0, opt.lambda1, pbs);
    }
    case Strategy::incoherent: break;
  }
  throw std::invalid_argument("the incoherent strategy has no kit realization to sample");
}

KnowledgeEstimator protocol_estimator(Strategy strategy) {
  return strategy == Strategy::independent ? KnowledgeEstimator::first_kit : KnowledgeEstimator::last_kit;
}

ExperimentEstimate emulate_experiment(const KitTree& chain, KnowledgeEstimator estimator,
                                      const DensityMatrix4& initial, std::uint64_t shots, RngSeed seed,
                                      int bootstrap) {
  ShotCounts counts = sample_kit_chain(0, chain, shots, derive_seed(seed, 0));
  for (const auto& [label, outcomes] : sample_kit_chain(1, chain, shots, derive_seed(seed, 1)).counts)
    counts.counts[label] = outcomes;

  const DensityMatrix4 final_state = evolve(chain, initial).non_selective;
  const ShotCounts tomo = simulate_tomography(final_state, TomographySettings{shots}, derive_seed(seed, 2));

  ExperimentEstimate out;
  out.knowledge = estimate_knowledge(counts, estimator);
  out.concurrence = estimate_concurrence(tomo, derive_seed(seed, 3), bootstrap);
  out.analytic.k_bar = knowledge_of_kit(chain.kit(0)).value;
  out.analytic.k_tot = tree_knowledge(chain, estimator);
  out.analytic.c = concurrence(final_state);
  out.analytic.strategy = chain.depth() == 1                           ? Strategy::single
                          : estimator == KnowledgeEstimator::first_kit ? Strategy::independent
                                                                       : Strategy::adaptive;
  return out;
}

}  // namespace seqmeas
