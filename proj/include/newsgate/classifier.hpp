#pragma once

#include "newsgate/selection.hpp"
#include "newsgate/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace newsgate {

// Text pipeline and linear fake/real classifier used by the machine analyzer:
//   lowercase + split on non-alphanumerics -> stem -> drop stop words ->
//   drop over-frequent terms -> hashed TF-IDF of the body + title/body stance
//   -> logistic regression.

struct ClassifierConfig {
  double max_df = 0.9;
  std::uint32_t dims = 1u << 16;  // hashed term buckets; the stance feature sits at index `dims`
  double learning_rate = 0.1;
  std::uint32_t epochs = 200;
  std::uint64_t seed = 0;
};

struct Document {
  std::string title;
  std::string body;
  std::vector<std::string> tokens_title;
  std::vector<std::string> tokens_body;
};

struct LabeledDocument {
  Truth label = Truth::Fake;
  std::string title;
  std::string body;
};

bool is_stop_word(std::string_view word);

/// Suffix-stripping stemmer with an irregular-form table (saw -> see, ...).
/// Applied to a fixpoint, so stem(stem(w)) == stem(w).
std::string stem(std::string_view word);

/// Lowercase ASCII alphanumeric runs; every other byte separates.
std::vector<std::string> tokenize(std::string_view text);

/// Per-term document counts over a corpus of (title, body) pairs. Terms are
/// stemmed, non-stop-word tokens.
class DocumentFrequency {
 public:
  void add_document(std::string_view title, std::string_view body);

  std::uint64_t documents() const { return documents_; }
  std::uint64_t count(const std::string& term) const;
  /// count / documents; 0 for an empty table.
  double fraction(const std::string& term) const;
  /// Smoothed inverse document frequency ln((1+N)/(1+df)) + 1.
  double idf(const std::string& term) const;

  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }
  void set(std::uint64_t documents, std::map<std::string, std::uint64_t> counts);

 private:
  std::uint64_t documents_ = 0;
  std::map<std::string, std::uint64_t> counts_;
};

/// Produces a Document whose token lists contain stems that are not stop
/// words and whose document frequency does not exceed max_df.
Document preprocess(std::string_view title, std::string_view body, const DocumentFrequency& df,
                    double max_df = 0.9);

/// Cosine similarity of the title and body term-frequency vectors; 0 if either
/// side is empty.
double stance_score(std::span<const std::string> a, std::span<const std::string> b);
double stance_score(const Document& doc);

/// FNV-1a 64-bit; bucket = hash % dims, sign from the top bit.
std::uint64_t feature_hash(std::string_view term);

/// Sparse view of a (dims + 1)-dimensional feature vector.
struct FeatureVector {
  std::uint32_t dims = 0;
  std::vector<std::pair<std::uint32_t, double>> terms;  // ascending bucket index, L2-normalized
  double stance = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(dims) + 1; }
  bool operator==(const FeatureVector&) const = default;
};

FeatureVector featurize(const Document& doc, std::uint32_t dims, const DocumentFrequency& df);

struct TrainedModel {
  std::uint32_t dims = 0;
  std::vector<double> weights;  // dims + 1 entries
  double bias = 0.0;
  DocumentFrequency df;
  double max_df = 0.9;
  std::uint64_t train_seed = 0;
  double final_loss = 0.0;
};

/// Label 1 means "real". Numerically stable log(1 + e^z) − y·z.
double logistic_loss(std::span<const double> weights, double bias, const FeatureVector& x,
                     double label);

struct LogisticGradient {
  std::vector<std::pair<std::uint32_t, double>> weights;  // nonzero coordinates only
  double bias = 0.0;
};
LogisticGradient logistic_gradient(std::span<const double> weights, double bias,
                                   const FeatureVector& x, double label);

/// SGD on logistic loss with a seeded per-epoch shuffle.
/// Throws DegenerateCorpus unless both classes are present.
TrainedModel train(std::span<const LabeledDocument> corpus, const ClassifierConfig& config);

struct Classification {
  double p_real = 0.0;
  double lambda = 0.0;
};

/// λ = 0 for a fake verdict (p < 0.5), otherwise 5·p.
double rating_from_probability(double p_real);

/// Throws DimensionMismatch.
Classification classify_features(const TrainedModel& model, const FeatureVector& x);
Classification classify_and_rate(const TrainedModel& model, std::string_view title,
                                 std::string_view body);

/// Fraction of documents whose verdict matches the label.
double accuracy(const TrainedModel& model, std::span<const LabeledDocument> docs);

/// Text model format: header, dims, max_df, seed, bias, final_loss, the
/// document-frequency table, then one `w <index> <weight>` line per nonzero
/// weight.
void save_model(const TrainedModel& model, std::ostream& out);
/// Throws ParseError or DimensionMismatch.
TrainedModel load_model(std::istream& in);

/// Corpus format: `label <TAB> title <TAB> body` per line, label fake|real.
std::vector<LabeledDocument> read_corpus(std::istream& in);
void write_corpus(std::span<const LabeledDocument> docs, std::ostream& out);

/// Machine analyzer backed by a trained model.
class ClassifierRatingProvider : public RatingProvider {
 public:
  explicit ClassifierRatingProvider(std::shared_ptr<const TrainedModel> model = nullptr)
      : model_(std::move(model)) {}

  void set_model(std::shared_ptr<const TrainedModel> model) { model_ = std::move(model); }
  bool has_model() const { return model_ != nullptr; }

  double rate(const Participant& analyzer, const ArticleView& article) override;

 private:
  std::shared_ptr<const TrainedModel> model_;
};

}  // namespace newsgate
