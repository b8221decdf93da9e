#include "seqtag/synth.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "seqtag/errors.hpp"
#include "seqtag/rng.hpp"

namespace seqtag::synth {

namespace {

struct Count {
  const char* name;
  double count;
  std::size_t vocab;
};

// Label statistics of the reference corpus.
constexpr Count kOutsideCount{"O", 88791, 1500};
constexpr Count kStrongCounts[] = {
    {"geo", 37644, 300}, {"tim", 20333, 300}, {"org", 20143, 300}, {"per", 16990, 300}, {"gpe", 15869, 300}};
constexpr Count kWeakCounts[] = {{"art", 402, 60}, {"eve", 308, 60}, {"nat", 201, 60}};

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "tr", "sh"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

std::string pseudo_word(Rng& rng) {
  const std::size_t syllables = 2 + rng.below(3);
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += kOnsets[rng.below(std::size(kOnsets))];
    w += kVowels[rng.below(std::size(kVowels))];
  }
  if (rng.below(2)) w += kOnsets[rng.below(std::size(kOnsets))];
  return w;
}

std::vector<double> gaussian(Rng& rng, std::size_t dim, double scale) {
  std::vector<double> v(dim);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

Sentence draw_sentence(Rng& rng, const SynthSpec& spec, const std::vector<double>& cumulative,
                       const std::vector<std::vector<std::string>>& lexicons) {
  const std::size_t length = spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
  Sentence s;
  s.tokens.reserve(length);
  std::size_t previous = 0;
  for (std::size_t i = 0; i < length; ++i) {
    const double u = rng.uniform();
    std::size_t type = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                cumulative.begin());
    type = std::min(type, cumulative.size() - 1);
    while (spec.types[type].frequency <= 0.0) --type;  // guard against rounding at the top
    const auto& lex = lexicons[type];
    Token t;
    t.surface = lex[rng.below(lex.size())];
    const auto& name = spec.types[type].name;
    if (name == kOutside) {
      t.tag = name;
    } else {
      t.tag = (i > 0 && previous == type ? "I-" : "B-") + name;
    }
    previous = type;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

}  // namespace

SynthSpec SynthSpec::standard(double ratio) {
  if (!(ratio > 0.0)) throw ConfigError("Strong:Weak ratio must be positive");
  double strong = 0.0, weak = 0.0;
  for (const auto& c : kStrongCounts) strong += c.count;
  for (const auto& c : kWeakCounts) weak += c.count;
  const double weak_scale = strong / ratio / weak;
  const double total = kOutsideCount.count + strong + strong / ratio;
  SynthSpec spec;
  spec.types.push_back({kOutsideCount.name, kOutsideCount.count / total, kOutsideCount.vocab});
  for (const auto& c : kStrongCounts) spec.types.push_back({c.name, c.count / total, c.vocab});
  for (const auto& c : kWeakCounts) spec.types.push_back({c.name, c.count * weak_scale / total, c.vocab});
  return spec;
}

SynthSpec SynthSpec::from_config(const Config& config) {
  SynthSpec spec = standard(config.get_double("ratio", 50.0));
  spec.min_length = config.get_size("synth.min_length", spec.min_length);
  spec.max_length = config.get_size("synth.max_length", spec.max_length);
  spec.shared_fraction = config.get_double("synth.shared_fraction", spec.shared_fraction);
  spec.train_sentences = config.get_size("synth.train", spec.train_sentences);
  spec.val_sentences = config.get_size("synth.val", spec.val_sentences);
  spec.test_sentences = config.get_size("synth.test", spec.test_sentences);
  spec.emb_dim = config.get_size("emb_dim", spec.emb_dim);
  spec.emb_noise = config.get_double("synth.emb_noise", spec.emb_noise);
  spec.seed = config.get_u64("seed", spec.seed);
  for (auto& t : spec.types) {
    t.frequency = config.get_double("synth.freq." + t.name, t.frequency);
    t.vocab = config.get_size("synth.vocab." + t.name, t.vocab);
  }
  spec.validate();
  return spec;
}

void SynthSpec::validate() const {
  if (types.empty()) throw ConfigError("synthetic spec has no types");
  double sum = 0.0;
  bool has_outside = false;
  std::unordered_set<std::string> names;
  for (const auto& t : types) {
    if (!names.insert(t.name).second) throw ConfigError("type '" + t.name + "' listed twice");
    has_outside = has_outside || t.name == kOutside;
    if (!(t.frequency >= 0.0) || !std::isfinite(t.frequency)) {
      throw ConfigError("frequency of '" + t.name + "' must be a non-negative number");
    }
    if (t.frequency > 0.0 && t.vocab == 0) throw ConfigError("type '" + t.name + "' is used but has an empty lexicon");
    sum += t.frequency;
  }
  if (!has_outside) throw ConfigError("synthetic spec needs an O type");
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("type frequencies sum to " + std::to_string(sum) + ", not 1");
  if (min_length == 0 || min_length > max_length) throw ConfigError("sentence length range must satisfy 1 <= min <= max");
  if (!(shared_fraction >= 0.0 && shared_fraction < 1.0)) throw ConfigError("shared_fraction must lie in [0, 1)");
  if (emb_dim == 0) throw ConfigError("emb_dim must be positive");
  if (!(emb_noise >= 0.0)) throw ConfigError("emb_noise must be non-negative");
}

SynthCorpus generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // Lexicons: a pool shared by every type, then words owned by one type.
  std::unordered_set<std::string> used;
  auto fresh_word = [&](bool capitalized) {
    for (;;) {
      auto w = pseudo_word(rng);
      if (used.insert(w).second) {
        if (capitalized) w[0] = static_cast<char>(w[0] - 'a' + 'A');
        return w;
      }
    }
  };
  std::size_t pool_size = 0;
  for (const auto& t : spec.types) {
    pool_size = std::max(pool_size, static_cast<std::size_t>(std::lround(spec.shared_fraction * t.vocab)));
  }
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(fresh_word(false));

  std::vector<std::vector<std::string>> lexicons;
  std::vector<std::vector<std::string>> owned;
  for (const auto& t : spec.types) {
    const auto shared = std::min(pool.size(), static_cast<std::size_t>(std::lround(spec.shared_fraction * t.vocab)));
    std::vector<std::string> picks = pool;
    rng.shuffle(std::span<std::string>(picks));
    picks.resize(shared);
    std::vector<std::string> own;
    for (std::size_t i = shared; i < t.vocab; ++i) own.push_back(fresh_word(t.name != kOutside));
    auto lex = picks;
    lex.insert(lex.end(), own.begin(), own.end());
    lexicons.push_back(std::move(lex));
    owned.push_back(std::move(own));
  }

  // Word vectors cluster around one centroid per type; pool words sit near the
  // origin and carry no type signal.
  SynthCorpus out;
  out.embeddings = EmbeddingMatrix(spec.emb_dim);
  for (const auto& w : pool) out.embeddings.set(w, gaussian(rng, spec.emb_dim, spec.emb_noise));
  for (std::size_t k = 0; k < spec.types.size(); ++k) {
    const auto centroid = gaussian(rng, spec.emb_dim, 1.0);
    for (const auto& w : owned[k]) {
      auto v = gaussian(rng, spec.emb_dim, spec.emb_noise);
      for (std::size_t d = 0; d < v.size(); ++d) v[d] += centroid[d];
      out.embeddings.set(w, v);
    }
  }

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& t : spec.types) cumulative.push_back(acc += t.frequency);

  auto split = [&](std::size_t n, const char* name) {
    Corpus c;
    c.split_name = name;
    for (std::size_t i = 0; i < n; ++i) {
      c.sentences.push_back(draw_sentence(rng, spec, cumulative, lexicons));
      for (const auto& t : c.sentences.back().tokens) c.tags.add(t.tag);
    }
    return c;
  };
  out.train = split(spec.train_sentences, "train");
  out.val = split(spec.val_sentences, "val");
  out.test = split(spec.test_sentences, "test");
  return out;
}

void write(const std::filesystem::path& dir, const SynthCorpus& corpus, const std::string& header) {
  std::filesystem::create_directories(dir);
  save_conll(dir / "train.conll", corpus.train, header);
  save_conll(dir / "val.conll", corpus.val, header);
  save_conll(dir / "test.conll", corpus.test, header);
  std::ofstream emb(dir / "embeddings.txt");
  if (!emb) throw IoError("cannot write '" + (dir / "embeddings.txt").string() + "'");
  if (!header.empty()) emb << header << '\n';
  write_pretrained(emb, corpus.embeddings);
  if (!emb) throw IoError("failed writing '" + (dir / "embeddings.txt").string() + "'");
}

}  // namespace seqtag::synth
