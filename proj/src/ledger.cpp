#include "newsgate/ledger.hpp"

#include "newsgate/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace newsgate {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kKindNames[] = {
    "Register",        "Submit",              "AnalyzerRating", "AnalyzerGate",
    "ValidatorBelief", "PublicationDecision", "Resolution",     "CredibilityUpdate",
};

bool in_range(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

void encode_strings(ByteWriter& w, const std::vector<std::string>& items) {
  w.u32(static_cast<std::uint32_t>(items.size()));
  for (const auto& s : items) w.str(s);
}

void encode_optional(ByteWriter& w, const std::optional<std::string>& value) {
  w.u8(value ? 1 : 0);
  if (value) w.str(*value);
}

// --- JSON helpers -----------------------------------------------------------

[[noreturn]] void parse_fail(const std::string& what) {
  throw ProtocolError(ErrorCode::ParseError, what);
}

void expect_keys(const ojson& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) parse_fail(std::string(where) + ": expected object");
  if (j.size() != keys.size()) parse_fail(std::string(where) + ": unexpected field set");
  for (const char* k : keys) {
    if (!j.contains(k)) parse_fail(std::string(where) + ": missing field " + k);
  }
}

std::uint64_t get_uint(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) parse_fail(std::string(key) + ": expected unsigned integer");
  return v.get<std::uint64_t>();
}

double get_real(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) parse_fail(std::string(key) + ": expected number");
  return v.get<double>();
}

bool get_bool(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) parse_fail(std::string(key) + ": expected boolean");
  return v.get<bool>();
}

std::string get_string(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) parse_fail(std::string(key) + ": expected string");
  return v.get<std::string>();
}

std::optional<std::string> get_optional_string(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) parse_fail(std::string(key) + ": expected string or null");
  return v.get<std::string>();
}

std::vector<std::string> get_strings(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array()) parse_fail(std::string(key) + ": expected array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) parse_fail(std::string(key) + ": expected array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Digest get_digest(const ojson& j, const char* key) {
  auto d = digest_from_hex(get_string(j, key));
  if (!d) parse_fail(std::string(key) + ": expected 64 lowercase hex characters");
  return *d;
}

ojson hex(const Digest& d) { return to_hex(d); }

ojson payload_to_json(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> ojson {
        using P = std::decay_t<decltype(p)>;
        ojson j = ojson::object();
        if constexpr (std::is_same_v<P, RegisterPayload>) {
          j["roles"] = p.roles;
          j["area_tags"] = p.area_tags;
          j["domain_tags"] = p.domain_tags;
          j["credibility"] = p.credibility;
        } else if constexpr (std::is_same_v<P, SubmitPayload>) {
          j["commitment"] = hex(p.commitment);
          j["area_tags"] = p.area_tags;
          j["domain_tags"] = p.domain_tags;
          j["content_digest"] = hex(p.content_digest);
        } else if constexpr (std::is_same_v<P, AnalyzerRatingPayload>) {
          j["lambda"] = p.lambda;
          j["credibility"] = p.credibility;
        } else if constexpr (std::is_same_v<P, AnalyzerGatePayload>) {
          j["score_a"] = p.score_a;
          j["proceed"] = p.proceed;
        } else if constexpr (std::is_same_v<P, ValidatorBeliefPayload>) {
          j["believes"] = p.believes;
        } else if constexpr (std::is_same_v<P, PublicationDecisionPayload>) {
          j["score_r"] = p.score_r;
          j["score_a"] = p.score_a;
          j["score_v"] = p.score_v;
          j["score_total"] = p.score_total;
          j["published"] = p.published;
          j["revealed_reporter"] = p.revealed_reporter;
          j["nonce"] = hex(p.nonce);
        } else if constexpr (std::is_same_v<P, ResolutionPayload>) {
          j["truth"] = std::string(to_string(p.truth));
        } else if constexpr (std::is_same_v<P, CredibilityUpdatePayload>) {
          j["old"] = p.old_credibility;
          j["new"] = p.new_credibility;
        }
        return j;
      },
      payload);
}

Payload payload_from_json(TxKind kind, const ojson& j) {
  switch (kind) {
    case TxKind::Register:
      expect_keys(j, {"roles", "area_tags", "domain_tags", "credibility"}, "Register");
      return RegisterPayload{get_strings(j, "roles"), get_strings(j, "area_tags"),
                             get_strings(j, "domain_tags"), get_real(j, "credibility")};
    case TxKind::Submit:
      expect_keys(j, {"commitment", "area_tags", "domain_tags", "content_digest"}, "Submit");
      return SubmitPayload{get_digest(j, "commitment"), get_strings(j, "area_tags"),
                           get_strings(j, "domain_tags"), get_digest(j, "content_digest")};
    case TxKind::AnalyzerRating:
      expect_keys(j, {"lambda", "credibility"}, "AnalyzerRating");
      return AnalyzerRatingPayload{get_real(j, "lambda"), get_real(j, "credibility")};
    case TxKind::AnalyzerGate:
      expect_keys(j, {"score_a", "proceed"}, "AnalyzerGate");
      return AnalyzerGatePayload{get_real(j, "score_a"), get_bool(j, "proceed")};
    case TxKind::ValidatorBelief:
      expect_keys(j, {"believes"}, "ValidatorBelief");
      return ValidatorBeliefPayload{get_bool(j, "believes")};
    case TxKind::PublicationDecision:
      expect_keys(j,
                  {"score_r", "score_a", "score_v", "score_total", "published",
                   "revealed_reporter", "nonce"},
                  "PublicationDecision");
      return PublicationDecisionPayload{get_real(j, "score_r"),     get_real(j, "score_a"),
                                        get_real(j, "score_v"),     get_real(j, "score_total"),
                                        get_bool(j, "published"),   get_string(j, "revealed_reporter"),
                                        get_digest(j, "nonce")};
    case TxKind::Resolution: {
      expect_keys(j, {"truth"}, "Resolution");
      const auto text = get_string(j, "truth");
      if (text != "fake" && text != "authentic") parse_fail("truth: expected fake or authentic");
      return ResolutionPayload{text == "fake" ? Truth::Fake : Truth::Authentic};
    }
    case TxKind::CredibilityUpdate:
      expect_keys(j, {"old", "new"}, "CredibilityUpdate");
      return CredibilityUpdatePayload{get_real(j, "old"), get_real(j, "new")};
  }
  parse_fail("unknown kind");
}

ojson tx_to_json(const Transaction& tx) {
  ojson j = ojson::object();
  j["tx_id"] = tx.tx_id;
  j["kind"] = std::string(to_string(tx.kind()));
  j["article_id"] = tx.article_id ? ojson(*tx.article_id) : ojson(nullptr);
  j["actor"] = tx.actor ? ojson(*tx.actor) : ojson(nullptr);
  j["timestamp"] = tx.timestamp;
  j["payload"] = payload_to_json(tx.payload);
  return j;
}

Transaction tx_from_json(const ojson& j) {
  expect_keys(j, {"tx_id", "kind", "article_id", "actor", "timestamp", "payload"}, "transaction");
  Transaction tx;
  tx.tx_id = get_uint(j, "tx_id");
  const auto kind = tx_kind_from_string(get_string(j, "kind"));
  if (!kind) parse_fail("kind: unknown transaction kind");
  tx.article_id = get_optional_string(j, "article_id");
  tx.actor = get_optional_string(j, "actor");
  tx.timestamp = get_uint(j, "timestamp");
  tx.payload = payload_from_json(*kind, j.at("payload"));
  return tx;
}

Block seal(std::uint64_t height, const Digest& prev, std::vector<Transaction> txs) {
  Block b;
  b.height = height;
  b.prev_hash = prev;
  b.txs_hash = compute_txs_hash(txs);
  b.transactions = std::move(txs);
  b.block_hash = compute_block_hash(b.height, b.prev_hash, b.txs_hash);
  return b;
}

void validate_all(const std::vector<Transaction>& txs) {
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (auto problem = validate_transaction(txs[i])) {
      throw ProtocolError(ErrorCode::InvalidTransaction,
                          "transaction " + std::to_string(i) + " of batch: " + *problem);
    }
  }
}

}  // namespace

std::string_view to_string(TxKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<TxKind> tx_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<TxKind>(i);
  }
  return std::nullopt;
}

std::optional<std::string> validate_transaction(const Transaction& tx) {
  return std::visit(
      [](const auto& p) -> std::optional<std::string> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RegisterPayload>) {
          if (!in_range(p.credibility, 0.0, 1.0)) return "credibility outside [0,1]";
          if (p.roles.empty()) return "no roles";
        } else if constexpr (std::is_same_v<P, AnalyzerRatingPayload>) {
          if (!in_range(p.lambda, 0.0, 5.0)) return "rating outside [0,5]";
          if (!in_range(p.credibility, 0.0, 1.0)) return "credibility outside [0,1]";
        } else if constexpr (std::is_same_v<P, AnalyzerGatePayload>) {
          if (!in_range(p.score_a, 0.0, 5.0)) return "analyzer score outside [0,5]";
        } else if constexpr (std::is_same_v<P, PublicationDecisionPayload>) {
          if (!in_range(p.score_r, 0.0, 5.0) || !in_range(p.score_a, 0.0, 5.0) ||
              !in_range(p.score_v, 0.0, 5.0)) {
            return "component score outside [0,5]";
          }
          if (!in_range(p.score_total, 0.0, 1.0)) return "total score outside [0,1]";
        } else if constexpr (std::is_same_v<P, CredibilityUpdatePayload>) {
          if (!in_range(p.old_credibility, 0.0, 1.0) || !in_range(p.new_credibility, 0.0, 1.0)) {
            return "credibility outside [0,1]";
          }
        }
        return std::nullopt;
      },
      tx.payload);
}

std::vector<std::uint8_t> encode_transaction(const Transaction& tx) {
  ByteWriter w;
  w.u64(tx.tx_id);
  w.u8(static_cast<std::uint8_t>(tx.kind()));
  encode_optional(w, tx.article_id);
  encode_optional(w, tx.actor);
  w.u64(tx.timestamp);
  std::visit(
      [&w](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RegisterPayload>) {
          encode_strings(w, p.roles);
          encode_strings(w, p.area_tags);
          encode_strings(w, p.domain_tags);
          w.f64(p.credibility);
        } else if constexpr (std::is_same_v<P, SubmitPayload>) {
          w.bytes(p.commitment);
          encode_strings(w, p.area_tags);
          encode_strings(w, p.domain_tags);
          w.bytes(p.content_digest);
        } else if constexpr (std::is_same_v<P, AnalyzerRatingPayload>) {
          w.f64(p.lambda);
          w.f64(p.credibility);
        } else if constexpr (std::is_same_v<P, AnalyzerGatePayload>) {
          w.f64(p.score_a);
          w.u8(p.proceed ? 1 : 0);
        } else if constexpr (std::is_same_v<P, ValidatorBeliefPayload>) {
          w.u8(p.believes ? 1 : 0);
        } else if constexpr (std::is_same_v<P, PublicationDecisionPayload>) {
          w.f64(p.score_r);
          w.f64(p.score_a);
          w.f64(p.score_v);
          w.f64(p.score_total);
          w.u8(p.published ? 1 : 0);
          w.str(p.revealed_reporter);
          w.bytes(p.nonce);
        } else if constexpr (std::is_same_v<P, ResolutionPayload>) {
          w.u8(static_cast<std::uint8_t>(p.truth));
        } else if constexpr (std::is_same_v<P, CredibilityUpdatePayload>) {
          w.f64(p.old_credibility);
          w.f64(p.new_credibility);
        }
      },
      tx.payload);
  return w.take();
}

Digest compute_txs_hash(const std::vector<Transaction>& txs) {
  ByteWriter w;
  w.u64(txs.size());
  for (const auto& tx : txs) {
    const auto enc = encode_transaction(tx);
    w.u32(static_cast<std::uint32_t>(enc.size()));
    w.bytes(enc);
  }
  return sha256(w.data());
}

Digest compute_block_hash(std::uint64_t height, const Digest& prev_hash, const Digest& txs_hash) {
  ByteWriter w;
  w.u64(height);
  w.bytes(prev_hash);
  w.bytes(txs_hash);
  return sha256(w.data());
}

std::string transaction_to_json(const Transaction& tx) { return tx_to_json(tx).dump(); }

std::string block_to_line(const Block& block) {
  ojson j = ojson::object();
  j["height"] = block.height;
  j["prev_hash"] = hex(block.prev_hash);
  j["txs_hash"] = hex(block.txs_hash);
  ojson txs = ojson::array();
  for (const auto& tx : block.transactions) txs.push_back(tx_to_json(tx));
  j["transactions"] = std::move(txs);
  j["block_hash"] = hex(block.block_hash);
  return j.dump();
}

Block block_from_line(std::string_view line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(e.what());
  }
  expect_keys(j, {"height", "prev_hash", "txs_hash", "transactions", "block_hash"}, "block");
  Block b;
  b.height = get_uint(j, "height");
  b.prev_hash = get_digest(j, "prev_hash");
  b.txs_hash = get_digest(j, "txs_hash");
  const auto& txs = j.at("transactions");
  if (!txs.is_array()) parse_fail("transactions: expected array");
  for (const auto& t : txs) b.transactions.push_back(tx_from_json(t));
  b.block_hash = get_digest(j, "block_hash");
  return b;
}

bool TxFilter::matches(const Transaction& tx) const {
  if (kind && tx.kind() != *kind) return false;
  if (article_id && tx.article_id != article_id) return false;
  if (actor && tx.actor != actor) return false;
  return true;
}

Ledger::Ledger(std::vector<Transaction> genesis_transactions) {
  validate_all(genesis_transactions);
  for (auto& tx : genesis_transactions) tx.tx_id = next_tx_id_++;
  blocks_.push_back(seal(0, Digest{}, std::move(genesis_transactions)));
}

Ledger::Ledger(FromBlocks, std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) next_tx_id_ += b.transactions.size();
}

Block Ledger::append_block(std::vector<Transaction> transactions) {
  if (transactions.empty()) throw ProtocolError(ErrorCode::EmptyBatch, "append_block");
  validate_all(transactions);
  std::uint64_t id = next_tx_id_;
  for (auto& tx : transactions) tx.tx_id = id++;
  blocks_.push_back(seal(tip_height() + 1, tip_hash(), std::move(transactions)));
  next_tx_id_ = id;
  return blocks_.back();
}

VerificationReport Ledger::verify_chain() const {
  VerificationReport report;
  std::uint64_t expected_tx = 0;
  auto fail = [&report](std::uint64_t h, std::string why) {
    report.ok = false;
    report.first_corrupt_height = h;
    report.reason = std::move(why);
    return report;
  };
  for (std::size_t h = 0; h < blocks_.size(); ++h) {
    const Block& b = blocks_[h];
    if (b.height != h) return fail(h, "height does not match position");
    const Digest expected_prev = h == 0 ? Digest{} : blocks_[h - 1].block_hash;
    if (b.prev_hash != expected_prev) return fail(h, "prev_hash does not link to predecessor");
    if (h > 0 && b.transactions.empty()) return fail(h, "empty non-genesis block");
    for (const auto& tx : b.transactions) {
      if (tx.tx_id != expected_tx++) return fail(h, "tx_id sequence broken");
      if (auto problem = validate_transaction(tx)) return fail(h, *problem);
    }
    if (compute_txs_hash(b.transactions) != b.txs_hash) return fail(h, "txs_hash mismatch");
    if (compute_block_hash(b.height, b.prev_hash, b.txs_hash) != b.block_hash) {
      return fail(h, "block_hash mismatch");
    }
    report.blocks_checked = h + 1;
  }
  return report;
}

std::vector<Transaction> Ledger::query(const TxFilter& filter) const {
  std::vector<Transaction> out;
  for (const auto& b : blocks_) {
    for (const auto& tx : b.transactions) {
      if (filter.matches(tx)) out.push_back(tx);
    }
  }
  return out;
}

void Ledger::export_jsonl(std::ostream& out) const {
  for (const auto& b : blocks_) out << block_to_line(b) << '\n';
}

std::string Ledger::export_jsonl() const {
  std::ostringstream out;
  export_jsonl(out);
  return out.str();
}

namespace {

// Splits on '\n'. A well-formed export ends with a newline, so the final piece
// is empty; anything else there is reported as a trailing line.
std::vector<std::string_view> split_lines(std::string_view text, bool& trailing_garbage) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      trailing_garbage = start != text.size();
      if (trailing_garbage) lines.push_back(text.substr(start));
      return lines;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
}

}  // namespace

Ledger Ledger::import_jsonl(std::string_view text) {
  bool trailing = false;
  const auto lines = split_lines(text, trailing);
  if (trailing) parse_fail("export does not end with a newline");
  if (lines.empty()) parse_fail("empty export");
  std::vector<Block> blocks;
  blocks.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      blocks.push_back(block_from_line(lines[i]));
    } catch (const ProtocolError& e) {
      parse_fail("line " + std::to_string(i) + ": " + e.what());
    }
  }
  return Ledger(FromBlocks{}, std::move(blocks));
}

VerificationReport verify_export(std::string_view text) {
  bool trailing = false;
  const auto lines = split_lines(text, trailing);
  std::vector<Block> blocks;
  std::optional<std::uint64_t> bad_line;
  std::string bad_reason;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trailing && i + 1 == lines.size()) {
      bad_line = i;
      bad_reason = "missing final newline";
      break;
    }
    try {
      Block b = block_from_line(lines[i]);
      if (block_to_line(b) != lines[i]) {
        bad_line = i;
        bad_reason = "non-canonical encoding";
        break;
      }
      blocks.push_back(std::move(b));
    } catch (const std::exception& e) {
      bad_line = i;
      bad_reason = e.what();
      break;
    }
  }
  if (blocks.empty() && !bad_line) {
    return VerificationReport{false, 0, "empty export", 0};
  }
  VerificationReport report;
  if (!blocks.empty()) {
    report = Ledger(Ledger::FromBlocks{}, std::move(blocks)).verify_chain();
  }
  if (bad_line && (report.ok || *report.first_corrupt_height > *bad_line)) {
    report.ok = false;
    report.first_corrupt_height = bad_line;
    report.reason = bad_reason;
  }
  return report;
}

}  // namespace newsgate
