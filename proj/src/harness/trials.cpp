#include "crest/harness/trials.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "crest/embed.hpp"
#include "crest/integrate.hpp"

namespace crest::harness {

std::string pseudo_word(Rng& rng) {
  static constexpr std::string_view kConsonants = "bcdfghjklmnprstvwxz";
  static constexpr std::string_view kVowels = "aeiou";
  std::string w;
  for (int s = 0; s < 3; ++s) {
    w.push_back(kConsonants[rng.index(kConsonants.size())]);
    w.push_back(kVowels[rng.index(kVowels.size())]);
  }
  return w;
}

void ClusterSpec::validate() const {
  if (candidates < 1) throw std::invalid_argument("cluster spec: need at least one candidate");
  if (cluster_size > candidates) throw std::invalid_argument("cluster spec: cluster larger than candidate count");
  if (cluster_size < candidates / 2 + 1) throw std::invalid_argument("cluster spec: cluster must be a strict majority");
  if (base_tokens < 1) throw std::invalid_argument("cluster spec: base_tokens must be >= 1");
  if (outlier_shared_tokens > base_tokens) throw std::invalid_argument("cluster spec: outliers share too many tokens");
  if (candidates > cluster_size && outlier_tokens + outlier_shared_tokens == 0) {
    throw std::invalid_argument("cluster spec: outliers need at least one token");
  }
  if (dim < 2) throw std::invalid_argument("cluster spec: dim must be >= 2");
}

namespace {

std::vector<std::string> fresh_words(std::size_t count, Rng& rng, std::set<std::string>& used) {
  std::vector<std::string> out;
  while (out.size() < count) {
    auto w = pseudo_word(rng);
    if (used.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

}  // namespace

TrialCandidates make_trial(const ClusterSpec& spec, Rng& rng, std::string query_id) {
  spec.validate();
  std::set<std::string> used;
  const auto base = fresh_words(spec.base_tokens, rng, used);
  std::vector<bool> membership(spec.candidates, false);
  std::fill(membership.begin(), membership.begin() + static_cast<std::ptrdiff_t>(spec.cluster_size), true);
  if (spec.shuffle) rng.shuffle(membership);

  TrialCandidates trial;
  trial.set.query_id = std::move(query_id);
  trial.in_cluster = membership;
  for (std::size_t m = 0; m < spec.candidates; ++m) {
    std::vector<std::string> words;
    if (membership[m]) {
      words = base;
      for (auto& w : fresh_words(spec.member_noise_tokens, rng, used)) words.push_back(std::move(w));
    } else {
      words.assign(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(spec.outlier_shared_tokens));
      for (auto& w : fresh_words(spec.outlier_tokens, rng, used)) words.push_back(std::move(w));
    }
    trial.set.candidates.push_back({"c" + std::to_string(m), join(words)});
  }
  return trial;
}

double RankHistogram::frequency(std::size_t rank) const {
  if (trials == 0 || rank < 1 || rank > counts.size()) return 0.0;
  return static_cast<double>(counts[rank - 1]) / static_cast<double>(trials);
}

double RankHistogram::cumulative(std::size_t rank) const {
  double f = 0.0;
  for (std::size_t r = 1; r <= rank && r <= counts.size(); ++r) f += frequency(r);
  return f;
}

RankHistogram selection_trials(std::size_t n_trials, const ClusterSpec& spec, std::uint64_t seed) {
  spec.validate();
  RankHistogram hist;
  hist.counts.assign(spec.candidates, 0);
  hist.trials = n_trials;
  embed::ProviderSpec provider{"trials", std::string(embed::kBuiltinEndpoint), 64, "", spec.dim, spec.embed_seed};
  embed::BuiltinProvider backend(spec.dim, spec.embed_seed);
  for (std::size_t t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto trial = make_trial(spec, rng, "trial" + std::to_string(t));
    const auto embeddings = embed::embed_candidates(backend, provider, trial.set, {.normalize = true, .parallelism = 1});
    const auto result = integrate::select_output(trial.set, embeddings);
    std::size_t best = spec.candidates;
    for (std::size_t m = 0; m < spec.candidates; ++m) {
      if (trial.in_cluster[m]) best = std::min(best, result.ranks[m]);
    }
    ++hist.counts[best - 1];
  }
  return hist;
}

json to_json(const RankHistogram& h) {
  json j;
  j["trials"] = h.trials;
  j["counts"] = h.counts;
  json freq = json::array();
  for (std::size_t r = 1; r <= h.counts.size(); ++r) freq.push_back(h.frequency(r));
  j["frequency"] = std::move(freq);
  return j;
}

}  // namespace crest::harness
