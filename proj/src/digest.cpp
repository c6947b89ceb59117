#include "newsgate/digest.hpp"

#include "newsgate/error.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>

namespace newsgate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::InvalidTransaction: return "InvalidTransaction";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidRoles: return "InvalidRoles";
    case ErrorCode::UnknownParticipant: return "UnknownParticipant";
    case ErrorCode::NotAReporter: return "NotAReporter";
    case ErrorCode::NonPositiveTheta: return "NonPositiveTheta";
    case ErrorCode::NoHistory: return "NoHistory";
    case ErrorCode::AlreadyResolved: return "AlreadyResolved";
    case ErrorCode::UnknownArticle: return "UnknownArticle";
    case ErrorCode::InvalidRating: return "InvalidRating";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::NoValidators: return "NoValidators";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidPanelSpec: return "InvalidPanelSpec";
    case ErrorCode::InsufficientJournalists: return "InsufficientJournalists";
    case ErrorCode::InsufficientMachineAnalyzers: return "InsufficientMachineAnalyzers";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::DegenerateCorpus: return "DegenerateCorpus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CommitmentMismatch: return "CommitmentMismatch";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::OverlappingVocabularies: return "OverlappingVocabularies";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("EVP_Digest(sha256) failed");
  }
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::optional<Digest> digest_from_hex(std::string_view hex) {
  Digest out{};
  if (hex.size() != out.size() * 2) return std::nullopt;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void ByteWriter::u32(std::uint32_t v) {
  for (int k = 0; k < 4; ++k) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int k = 0; k < 8; ++k) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

}  // namespace newsgate
