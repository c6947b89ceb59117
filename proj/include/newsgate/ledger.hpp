#pragma once

#include "newsgate/digest.hpp"
#include "newsgate/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace newsgate {

// Payload alternatives appear in the same order as TxKind, so a transaction's
// kind is simply the active variant index.

struct RegisterPayload {
  std::vector<std::string> roles;
  std::vector<std::string> area_tags;
  std::vector<std::string> domain_tags;
  double credibility = 0.5;
  bool operator==(const RegisterPayload&) const = default;
};

/// Carries the pseudonym commitment and a digest of the content; never the
/// reporter id.
struct SubmitPayload {
  Digest commitment{};
  std::vector<std::string> area_tags;
  std::vector<std::string> domain_tags;
  Digest content_digest{};
  bool operator==(const SubmitPayload&) const = default;
};

struct AnalyzerRatingPayload {
  double lambda = 0.0;
  double credibility = 0.0;
  bool operator==(const AnalyzerRatingPayload&) const = default;
};

struct AnalyzerGatePayload {
  double score_a = 0.0;
  bool proceed = false;
  bool operator==(const AnalyzerGatePayload&) const = default;
};

struct ValidatorBeliefPayload {
  bool believes = false;
  bool operator==(const ValidatorBeliefPayload&) const = default;
};

/// Final scores plus the identity reveal (reporter id and commitment nonce).
struct PublicationDecisionPayload {
  double score_r = 0.0;
  double score_a = 0.0;
  double score_v = 0.0;
  double score_total = 0.0;
  bool published = false;
  std::string revealed_reporter;
  Digest nonce{};
  bool operator==(const PublicationDecisionPayload&) const = default;
};

struct ResolutionPayload {
  Truth truth = Truth::Fake;
  bool operator==(const ResolutionPayload&) const = default;
};

struct CredibilityUpdatePayload {
  double old_credibility = 0.0;
  double new_credibility = 0.0;
  bool operator==(const CredibilityUpdatePayload&) const = default;
};

enum class TxKind : std::uint8_t {
  Register,
  Submit,
  AnalyzerRating,
  AnalyzerGate,
  ValidatorBelief,
  PublicationDecision,
  Resolution,
  CredibilityUpdate,
};

using Payload = std::variant<RegisterPayload, SubmitPayload, AnalyzerRatingPayload,
                             AnalyzerGatePayload, ValidatorBeliefPayload,
                             PublicationDecisionPayload, ResolutionPayload,
                             CredibilityUpdatePayload>;

std::string_view to_string(TxKind kind);
std::optional<TxKind> tx_kind_from_string(std::string_view name);

struct Transaction {
  std::uint64_t tx_id = 0;  // assigned by the ledger when sealed
  std::optional<std::string> article_id;
  std::optional<std::string> actor;
  Tick timestamp = 0;
  Payload payload;

  TxKind kind() const { return static_cast<TxKind>(payload.index()); }
  bool operator==(const Transaction&) const = default;
};

/// Pending transactions for one block.
using TxBatch = std::vector<Transaction>;

/// Range check for the payload of a transaction. Returns a description of
/// the first violation, or nullopt if the transaction is well formed.
std::optional<std::string> validate_transaction(const Transaction& tx);

/// Canonical byte encoding: fixed field order, length-prefixed strings,
/// little-endian integers, IEEE-754 bit patterns for reals.
std::vector<std::uint8_t> encode_transaction(const Transaction& tx);

/// The transaction's JSON object as it appears inside an export line.
std::string transaction_to_json(const Transaction& tx);

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  Digest txs_hash{};
  std::vector<Transaction> transactions;
  Digest block_hash{};
  bool operator==(const Block&) const = default;
};

Digest compute_txs_hash(const std::vector<Transaction>& txs);
Digest compute_block_hash(std::uint64_t height, const Digest& prev_hash, const Digest& txs_hash);

/// One export line (no trailing newline).
std::string block_to_line(const Block& block);
/// Strict inverse of block_to_line. Throws ProtocolError(ParseError).
Block block_from_line(std::string_view line);

struct TxFilter {
  std::optional<TxKind> kind;
  std::optional<std::string> article_id;
  std::optional<std::string> actor;

  bool matches(const Transaction& tx) const;
};

struct VerificationReport {
  bool ok = true;
  std::optional<std::uint64_t> first_corrupt_height;
  std::string reason;
  std::uint64_t blocks_checked = 0;
};

/// Append-only hash-chained block store.
///
/// One writer at a time; any number of readers between writes. Sealed blocks
/// are never modified.
class Ledger {
 public:
  /// Seals the genesis block (height 0, zero prev_hash) holding the given,
  /// possibly empty, transactions.
  explicit Ledger(std::vector<Transaction> genesis_transactions = {});

  /// Seals `transactions` into a new tip block. tx_id values are assigned
  /// here, continuing the ledger-wide sequence.
  /// Throws EmptyBatch or InvalidTransaction; the ledger is unchanged on error.
  Block append_block(std::vector<Transaction> transactions);

  VerificationReport verify_chain() const;

  std::vector<Transaction> query(const TxFilter& filter) const;

  Digest tip_hash() const { return blocks_.back().block_hash; }
  std::uint64_t tip_height() const { return blocks_.back().height; }
  std::uint64_t next_tx_id() const { return next_tx_id_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Line-delimited export, one block per line, each line newline-terminated.
  void export_jsonl(std::ostream& out) const;
  std::string export_jsonl() const;

  /// Parses an export without checking hashes; run verify_chain() afterwards.
  /// Throws ProtocolError(ParseError).
  static Ledger import_jsonl(std::string_view text);

 private:
  friend VerificationReport verify_export(std::string_view text);
  struct FromBlocks {};
  Ledger(FromBlocks, std::vector<Block> blocks);

  std::vector<Block> blocks_;
  std::uint64_t next_tx_id_ = 0;
};

/// Verifies an export as read from disk: every line must parse, must be the
/// canonical encoding of the block it decodes to, and the decoded chain must
/// pass verify_chain(). Never throws.
VerificationReport verify_export(std::string_view text);

}  // namespace newsgate
