#include "newsgate/classifier.hpp"

#include "newsgate/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace newsgate {

namespace {

const std::unordered_set<std::string_view>& stop_words() {
  static const std::unordered_set<std::string_view> words = {
      "a",      "about",  "above",   "after",  "again",   "against", "all",    "am",
      "an",     "and",    "any",     "are",    "as",      "at",      "be",     "because",
      "been",   "before", "being",   "below",  "between", "both",    "but",    "by",
      "can",    "could",  "did",     "do",     "does",    "doing",   "down",   "during",
      "each",   "few",    "for",     "from",   "further", "had",     "has",    "have",
      "having", "he",     "her",     "here",   "hers",    "herself", "him",    "himself",
      "his",    "how",    "i",       "if",     "in",      "into",    "is",     "it",
      "its",    "itself", "just",    "me",     "more",    "most",    "my",     "myself",
      "no",     "nor",    "not",     "now",    "of",      "off",     "on",     "once",
      "only",   "or",     "other",   "our",    "ours",    "out",     "over",   "own",
      "same",   "she",    "should",  "so",     "some",    "such",    "than",   "that",
      "the",    "their",  "theirs",  "them",   "then",    "there",   "these",  "they",
      "this",   "those",  "through", "to",     "too",     "under",   "until",  "up",
      "very",   "was",    "we",      "were",   "what",    "when",    "where",  "which",
      "while",  "who",    "whom",    "why",    "will",    "with",    "would",  "you",
      "your",   "yours",  "yourself"};
  return words;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_forms() {
  static const std::unordered_map<std::string_view, std::string_view> forms = {
      {"saw", "see"},     {"seen", "see"},     {"sees", "see"},     {"went", "go"},
      {"gone", "go"},     {"goes", "go"},      {"ran", "run"},      {"said", "say"},
      {"says", "say"},    {"told", "tell"},    {"made", "make"},    {"took", "take"},
      {"taken", "take"},  {"gave", "give"},    {"given", "give"},   {"came", "come"},
      {"knew", "know"},   {"known", "know"},   {"thought", "think"}, {"found", "find"},
      {"men", "man"},     {"women", "woman"},  {"children", "child"}, {"people", "person"},
      {"better", "good"}, {"best", "good"},    {"worse", "bad"},    {"worst", "bad"},
  };
  return forms;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

constexpr std::size_t kMinStem = 3;

// One rewrite step; returns false when no rule applies.
bool strip_once(std::string& w) {
  auto has_vowel = [](std::string_view s) { return std::any_of(s.begin(), s.end(), is_vowel); };
  auto undouble = [](std::string& s) {
    const auto n = s.size();
    if (n >= 2 && s[n - 1] == s[n - 2] && !is_vowel(s[n - 1]) && s[n - 1] != 'l' &&
        s[n - 1] != 's' && s[n - 1] != 'z') {
      s.pop_back();
    }
  };
  if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
    return true;
  }
  if (ends_with(w, "ies") && w.size() - 3 >= kMinStem - 1) {
    w.resize(w.size() - 3);
    w += 'y';
    return true;
  }
  for (std::string_view suffix : {"ing", "ed"}) {
    if (ends_with(w, suffix) && w.size() - suffix.size() >= kMinStem) {
      const std::string_view rest(w.data(), w.size() - suffix.size());
      if (!has_vowel(rest)) continue;
      w.resize(rest.size());
      undouble(w);
      return true;
    }
  }
  if (ends_with(w, "ly") && w.size() - 2 >= kMinStem) {
    w.resize(w.size() - 2);
    return true;
  }
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") &&
      w.size() - 1 >= kMinStem) {
    w.pop_back();
    return true;
  }
  return false;
}

std::uint32_t bucket_of(std::uint64_t h, std::uint32_t dims) {
  return static_cast<std::uint32_t>(h % dims);
}

double sign_of(std::uint64_t h) { return (h >> 63) != 0 ? -1.0 : 1.0; }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(std::span<const double> w, double b, const FeatureVector& x) {
  double z = b;
  for (const auto& [i, v] : x.terms) z += w[i] * v;
  z += w[x.dims] * x.stance;
  return z;
}

std::set<std::string> term_set(std::string_view title, std::string_view body) {
  std::set<std::string> terms;
  for (std::string_view text : {title, body}) {
    for (const auto& raw : tokenize(text)) {
      auto s = stem(raw);
      if (is_stop_word(raw) || is_stop_word(s)) continue;
      terms.insert(std::move(s));
    }
  }
  return terms;
}

std::string sanitize_field(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

[[noreturn]] void model_parse_fail(const std::string& what) {
  throw ProtocolError(ErrorCode::ParseError, "model: " + what);
}

}  // namespace

bool is_stop_word(std::string_view word) { return stop_words().count(word) != 0; }

std::string stem(std::string_view word) {
  std::string w(word);
  // Each step either hits the irregular table (whose targets are fixpoints)
  // or shortens the word, so this terminates.
  for (;;) {
    if (const auto it = irregular_forms().find(w); it != irregular_forms().end()) {
      w = std::string(it->second);
      continue;
    }
    if (!strip_once(w)) return w;
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 128 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void DocumentFrequency::add_document(std::string_view title, std::string_view body) {
  for (const auto& t : term_set(title, body)) ++counts_[t];
  ++documents_;
}

std::uint64_t DocumentFrequency::count(const std::string& term) const {
  const auto it = counts_.find(term);
  return it == counts_.end() ? 0 : it->second;
}

double DocumentFrequency::fraction(const std::string& term) const {
  if (documents_ == 0) return 0.0;
  return static_cast<double>(count(term)) / static_cast<double>(documents_);
}

double DocumentFrequency::idf(const std::string& term) const {
  return std::log((1.0 + static_cast<double>(documents_)) / (1.0 + static_cast<double>(count(term)))) + 1.0;
}

void DocumentFrequency::set(std::uint64_t documents, std::map<std::string, std::uint64_t> counts) {
  documents_ = documents;
  counts_ = std::move(counts);
}

Document preprocess(std::string_view title, std::string_view body, const DocumentFrequency& df,
                    double max_df) {
  auto run = [&](std::string_view text) {
    std::vector<std::string> out;
    for (const auto& raw : tokenize(text)) {
      auto s = stem(raw);
      if (is_stop_word(raw) || is_stop_word(s)) continue;
      if (df.fraction(s) > max_df) continue;
      out.push_back(std::move(s));
    }
    return out;
  };
  Document doc;
  doc.title = std::string(title);
  doc.body = std::string(body);
  doc.tokens_title = run(title);
  doc.tokens_body = run(body);
  return doc;
}

double stance_score(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string_view, double> ta, tb;
  for (const auto& t : a) ta[t] += 1.0;
  for (const auto& t : b) tb[t] += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, c] : ta) {
    na += c * c;
    if (const auto it = tb.find(t); it != tb.end()) dot += c * it->second;
  }
  for (const auto& [t, c] : tb) nb += c * c;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

double stance_score(const Document& doc) { return stance_score(doc.tokens_title, doc.tokens_body); }

std::uint64_t feature_hash(std::string_view term) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : term) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

FeatureVector featurize(const Document& doc, std::uint32_t dims, const DocumentFrequency& df) {
  FeatureVector x;
  x.dims = dims;
  x.stance = stance_score(doc);
  std::map<std::string_view, double> tf;
  for (const auto& t : doc.tokens_body) tf[t] += 1.0;
  std::map<std::uint32_t, double> buckets;
  for (const auto& [term, count] : tf) {
    const auto h = feature_hash(term);
    buckets[bucket_of(h, dims)] += sign_of(h) * count * df.idf(std::string(term));
  }
  double norm = 0.0;
  for (const auto& [i, v] : buckets) norm += v * v;
  norm = std::sqrt(norm);
  for (const auto& [i, v] : buckets) {
    if (v != 0.0) x.terms.emplace_back(i, v / norm);
  }
  return x;
}

double logistic_loss(std::span<const double> weights, double bias, const FeatureVector& x,
                     double label) {
  const double z = linear(weights, bias, x);
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - label * z;
}

LogisticGradient logistic_gradient(std::span<const double> weights, double bias,
                                   const FeatureVector& x, double label) {
  const double g = sigmoid(linear(weights, bias, x)) - label;
  LogisticGradient out;
  for (const auto& [i, v] : x.terms) out.weights.emplace_back(i, g * v);
  if (x.stance != 0.0) out.weights.emplace_back(x.dims, g * x.stance);
  out.bias = g;
  return out;
}

TrainedModel train(std::span<const LabeledDocument> corpus, const ClassifierConfig& config) {
  const auto fakes = std::count_if(corpus.begin(), corpus.end(),
                                   [](const auto& d) { return d.label == Truth::Fake; });
  if (fakes == 0 || fakes == static_cast<std::ptrdiff_t>(corpus.size())) {
    throw ProtocolError(ErrorCode::DegenerateCorpus, "training corpus needs both classes");
  }
  if (config.dims == 0) throw ProtocolError(ErrorCode::DimensionMismatch, "dims must be positive");

  TrainedModel model;
  model.dims = config.dims;
  model.max_df = config.max_df;
  model.train_seed = config.seed;
  for (const auto& d : corpus) model.df.add_document(d.title, d.body);

  std::vector<FeatureVector> xs;
  std::vector<double> ys;
  xs.reserve(corpus.size());
  for (const auto& d : corpus) {
    xs.push_back(featurize(preprocess(d.title, d.body, model.df, model.max_df), model.dims, model.df));
    ys.push_back(d.label == Truth::Authentic ? 1.0 : 0.0);
  }

  model.weights.assign(static_cast<std::size_t>(model.dims) + 1, 0.0);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t k : order) {
      const auto grad = logistic_gradient(model.weights, model.bias, xs[k], ys[k]);
      for (const auto& [i, g] : grad.weights) model.weights[i] -= config.learning_rate * g;
      model.bias -= config.learning_rate * grad.bias;
    }
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) loss += logistic_loss(model.weights, model.bias, xs[k], ys[k]);
  model.final_loss = loss / static_cast<double>(xs.size());
  return model;
}

double rating_from_probability(double p_real) {
  p_real = std::clamp(p_real, 0.0, 1.0);
  return p_real < 0.5 ? 0.0 : 5.0 * p_real;
}

Classification classify_features(const TrainedModel& model, const FeatureVector& x) {
  if (x.dims != model.dims || model.weights.size() != x.size()) {
    throw ProtocolError(ErrorCode::DimensionMismatch,
                        "features have " + std::to_string(x.size()) + " coordinates, model has " +
                            std::to_string(model.weights.size()));
  }
  for (const auto& [i, v] : x.terms) {
    if (i >= model.dims) throw ProtocolError(ErrorCode::DimensionMismatch, "bucket index out of range");
  }
  Classification c;
  c.p_real = sigmoid(linear(model.weights, model.bias, x));
  c.lambda = rating_from_probability(c.p_real);
  return c;
}

Classification classify_and_rate(const TrainedModel& model, std::string_view title,
                                 std::string_view body) {
  const auto doc = preprocess(title, body, model.df, model.max_df);
  return classify_features(model, featurize(doc, model.dims, model.df));
}

double accuracy(const TrainedModel& model, std::span<const LabeledDocument> docs) {
  if (docs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& d : docs) {
    const bool says_real = classify_and_rate(model, d.title, d.body).p_real >= 0.5;
    if (says_real == (d.label == Truth::Authentic)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(docs.size());
}

void save_model(const TrainedModel& model, std::ostream& out) {
  char buf[64];
  auto real = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "newsgate-model 1\n";
  out << "dims " << model.dims << '\n';
  out << "max_df " << real(model.max_df) << '\n';
  out << "seed " << model.train_seed << '\n';
  out << "bias " << real(model.bias) << '\n';
  out << "final_loss " << real(model.final_loss) << '\n';
  out << "df_documents " << model.df.documents() << '\n';
  for (const auto& [term, count] : model.df.counts()) out << "df " << term << ' ' << count << '\n';
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) out << "w " << i << ' ' << real(model.weights[i]) << '\n';
  }
}

TrainedModel load_model(std::istream& in) {
  TrainedModel model;
  std::string line;
  if (!std::getline(in, line) || line != "newsgate-model 1") model_parse_fail("missing header");
  bool have_dims = false;
  std::uint64_t df_documents = 0;
  std::map<std::string, std::uint64_t> df_counts;
  std::vector<std::pair<std::uint64_t, double>> weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    bool ok = true;
    if (key == "dims") {
      std::uint64_t d = 0;
      ok = static_cast<bool>(fields >> d) && d > 0 && d < (1ull << 31);
      model.dims = static_cast<std::uint32_t>(d);
      have_dims = ok;
    } else if (key == "max_df") {
      ok = static_cast<bool>(fields >> model.max_df);
    } else if (key == "seed") {
      ok = static_cast<bool>(fields >> model.train_seed);
    } else if (key == "bias") {
      ok = static_cast<bool>(fields >> model.bias);
    } else if (key == "final_loss") {
      ok = static_cast<bool>(fields >> model.final_loss);
    } else if (key == "df_documents") {
      ok = static_cast<bool>(fields >> df_documents);
    } else if (key == "df") {
      std::string term;
      std::uint64_t count = 0;
      ok = static_cast<bool>(fields >> term >> count);
      df_counts[term] = count;
    } else if (key == "w") {
      std::uint64_t index = 0;
      double w = 0.0;
      ok = static_cast<bool>(fields >> index >> w) && std::isfinite(w);
      weights.emplace_back(index, w);
    } else {
      model_parse_fail("unknown record '" + key + "'");
    }
    if (!ok) model_parse_fail("malformed line '" + line + "'");
  }
  if (!have_dims) model_parse_fail("missing dims");
  model.weights.assign(static_cast<std::size_t>(model.dims) + 1, 0.0);
  for (const auto& [index, w] : weights) {
    if (index >= model.weights.size()) {
      throw ProtocolError(ErrorCode::DimensionMismatch, "weight index " + std::to_string(index) +
                                                            " exceeds model dimension");
    }
    model.weights[index] = w;
  }
  model.df.set(df_documents, std::move(df_counts));
  return model;
}

std::vector<LabeledDocument> read_corpus(std::istream& in) {
  std::vector<LabeledDocument> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ProtocolError(ErrorCode::ParseError,
                          "corpus line " + std::to_string(line_no) + ": expected label, title, body");
    }
    const auto label = line.substr(0, t1);
    LabeledDocument d;
    if (label == "fake") {
      d.label = Truth::Fake;
    } else if (label == "real") {
      d.label = Truth::Authentic;
    } else {
      throw ProtocolError(ErrorCode::ParseError,
                          "corpus line " + std::to_string(line_no) + ": label must be fake or real");
    }
    d.title = line.substr(t1 + 1, t2 - t1 - 1);
    d.body = line.substr(t2 + 1);
    out.push_back(std::move(d));
  }
  return out;
}

void write_corpus(std::span<const LabeledDocument> docs, std::ostream& out) {
  for (const auto& d : docs) {
    out << (d.label == Truth::Fake ? "fake" : "real") << '\t' << sanitize_field(d.title) << '\t'
        << sanitize_field(d.body) << '\n';
  }
}

double ClassifierRatingProvider::rate(const Participant&, const ArticleView& article) {
  if (!model_) throw ProtocolError(ErrorCode::ProviderFailure, "classifier has no trained model");
  return classify_and_rate(*model_, article.title, article.body).lambda;
}

}  // namespace newsgate
