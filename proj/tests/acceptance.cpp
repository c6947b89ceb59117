// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "newsgate/classifier.hpp"
#include "newsgate/cli.hpp"
#include "newsgate/format.hpp"
#include "newsgate/ledger.hpp"
#include "newsgate/oracle.hpp"
#include "newsgate/scoring.hpp"
#include "newsgate/simharness.hpp"

#include "lifecycle_fuzz.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace newsgate;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int run_binary_verify(const fs::path& file) {
  const std::string cmd = std::string("\"") + NEWSGATE_BIN + "\" ledger verify \"" + file.string() + "\" > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome formula_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const auto checks = run_formula_oracle_suite(20240117, 1000, 1e-12);
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  std::string failed;
  for (const auto& c : checks) {
    worst = std::max(worst, c.max_abs_error);
    if (!c.passed()) failed += " " + c.name + " (" + c.first_failure + ")";
  }
  return {failed.empty() && elapsed < 1.0,
          std::to_string(checks.size()) + " checks, max abs error " + format_real(worst) + ", " +
              format_real(elapsed) + " s" + (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome range_closure() {
  const ScoringParams p;
  const std::vector<RatingRecord> top{{"a", 5.0, 1.0, "x"}, {"b", 5.0, 1.0, "x"}};
  const std::vector<RatingRecord> bottom{{"a", 0.0, 1.0, "x"}, {"b", 0.0, 0.0, "x"}};
  const double max = total_score(reporter_rating(5.0, 1.0), analyzer_rating(top), validator_belief(7, 7), p);
  const double min = total_score(reporter_rating(0.0, 1.0), analyzer_rating(bottom), validator_belief(0, 7), p);
  return {max == 1.0 && min == 0.0, "max " + format_real(max) + ", min " + format_real(min)};
}

std::string ledger_prefix(const std::string& jsonl, std::size_t blocks) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < blocks; ++i) pos = jsonl.find('\n', pos) + 1;
  return jsonl.substr(0, pos);
}

Outcome tamper_detection(const fs::path& work) {
  const auto start = std::chrono::steady_clock::now();
  // A small roster and panel keep the 32 blocks short.
  ScenarioConfig c;
  c.honest_reporters = 1;
  c.malicious_reporters = 1;
  c.journalists = 3;
  c.local_analyzers = 2;
  c.panel = PanelSpec{1, 1, 1};
  c.validator_cohorts = {{"default", 3, 0.8, 0.2}};
  c.max_validators = 3;
  c.bootstrap_articles = 12;
  c.article_count = 12;
  c.holdout_articles = 0;
  const auto run = run_scenario(c);
  const std::string clean = ledger_prefix(run.ledger_jsonl, 32);
  const fs::path clean_file = work / "clean.jsonl";
  spit(clean_file, clean);

  std::ostringstream sink;
  bool ok = verify_export(clean).ok && verify_export(clean).blocks_checked == 32 &&
            run_cli({"ledger", "verify", clean_file.string()}, sink, sink) == 0 &&
            run_binary_verify(clean_file) == 0;
  std::string first_miss;

  // Every byte, checked in process; the flipped bit rotates so digits,
  // letters and punctuation each meet low, case and high-bit flips.
  constexpr unsigned char kMasks[] = {0x01, 0x20, 0x80};
  std::size_t mutations = 0;
  std::string text = clean;
  for (std::size_t i = 0; i < text.size() && first_miss.empty(); ++i) {
    const unsigned char mask = kMasks[i % 3];
    text[i] = static_cast<char>(text[i] ^ mask);
    ++mutations;
    if (verify_export(text).ok) first_miss = "byte " + std::to_string(i) + " mask " + std::to_string(mask);
    text[i] = clean[i];
  }
  // Every 97th byte through the command path, every tenth of those through the binary.
  std::size_t via_cli = 0, via_binary = 0;
  const fs::path tampered = work / "tampered.jsonl";
  for (std::size_t i = 0; i < clean.size() && first_miss.empty(); i += 97) {
    text[i] = static_cast<char>(text[i] ^ 0x01);
    spit(tampered, text);
    ++via_cli;
    if (run_cli({"ledger", "verify", tampered.string()}, sink, sink) != 1) first_miss = "cli byte " + std::to_string(i);
    if (via_cli % 10 == 1) {
      ++via_binary;
      if (run_binary_verify(tampered) != 1) first_miss = "binary byte " + std::to_string(i);
    }
    text[i] = clean[i];
  }
  ok = ok && first_miss.empty();
  const double elapsed = seconds_since(start);
  return {ok && elapsed < 30.0,
          std::to_string(clean.size()) + " bytes, " + std::to_string(mutations) + " mutations in process, " +
              std::to_string(via_cli) + " via command, " + std::to_string(via_binary) + " via binary, " +
              format_real(elapsed) + " s" + (first_miss.empty() ? "" : ", undetected: " + first_miss)};
}

Outcome determinism(const fs::path& work) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig c;
  const auto a = run_scenario(c);
  write_outputs(a, work / "run_a");
  const auto b = run_scenario(c);
  write_outputs(b, work / "run_b");
  const bool same = slurp(work / "run_a" / "metrics.json") == slurp(work / "run_b" / "metrics.json") &&
                    a.tip_hash == b.tip_hash;
  const double elapsed = seconds_since(start);
  return {same && elapsed < 60.0, "tip " + to_hex(a.tip_hash).substr(0, 16) + ", " + format_real(elapsed) + " s"};
}

Outcome classifier() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  const auto docs = generate_corpus(CorpusParams::defaults(), 200, 0.5, rng);
  const std::span<const LabeledDocument> all(docs);
  ClassifierConfig cc;
  cc.seed = 7;
  const auto model = train(all.first(160), cc);
  const double acc = accuracy(model, all.subspan(160));
  const double grad = max_gradient_relative_error(31, 50);
  const double elapsed = seconds_since(start);
  return {acc >= 0.9 && grad < 1e-4 && elapsed < 10.0,
          "held-out accuracy " + format_real(acc) + ", gradient relative error " + format_real(grad) + ", " +
              format_real(elapsed) + " s"};
}

Outcome efficacy(const ScenarioResult& r, double elapsed) {
  const auto& m = r.metrics;
  const double bad = m.mean_final_credibility.at("malicious_reporters");
  const double good = m.mean_final_credibility.at("honest_reporters");
  return {m.fake_published_rate < 0.15 && m.authentic_rejected_rate < 0.15 && bad < good && elapsed < 120.0,
          "fake_published_rate " + format_real(m.fake_published_rate) + ", authentic_rejected_rate " +
              format_real(m.authentic_rejected_rate) + ", reporter credibility malicious " + format_real(bad) +
              " honest " + format_real(good) + ", " + format_real(elapsed) + " s"};
}

Outcome anonymity(const ScenarioResult& r) {
  const auto ledger = Ledger::import_jsonl(r.ledger_jsonl);
  const auto leaks = count_identity_leaks(ledger, r.reporter_of);
  return {leaks == 0, std::to_string(leaks) + " leaks over " + std::to_string(r.reporter_of.size()) +
                          " articles and " + std::to_string(ledger.next_tx_id()) + " transactions"};
}

Outcome state_machine_fuzz() {
  const auto start = std::chrono::steady_clock::now();
  const auto report = fuzz::run(20240117, 10000, 40);
  return {report.ok(), std::to_string(report.sequences) + " sequences, " + std::to_string(report.events) +
                           " events, " + std::to_string(report.declared_errors) + " declared errors, " +
                           format_real(seconds_since(start)) + " s" +
                           (report.ok() ? "" : ", first problem: " + report.first_problem)};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "newsgate_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  bool all = true;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << n << "] " << name << ": " << o.detail << std::endl;
  };

  report(1, "formula oracle", formula_oracle);
  report(2, "range closure", range_closure);
  report(3, "ledger tamper detection", [&] { return tamper_detection(work); });
  report(4, "determinism", [&] { return determinism(work); });
  report(5, "classifier", classifier);

  const auto start = std::chrono::steady_clock::now();
  std::optional<ScenarioResult> scenario;
  std::string scenario_error;
  try {
    scenario = run_scenario(ScenarioConfig{});
  } catch (const std::exception& e) {
    scenario_error = e.what();
  }
  const double scenario_seconds = seconds_since(start);
  report(6, "protocol efficacy", [&]() -> Outcome {
    if (!scenario) return {false, "scenario failed: " + scenario_error};
    return efficacy(*scenario, scenario_seconds);
  });
  report(7, "anonymity audit", [&]() -> Outcome {
    if (!scenario) return {false, "scenario failed: " + scenario_error};
    return anonymity(*scenario);
  });
  report(8, "state-machine fuzz", state_machine_fuzz);

  fs::remove_all(work);
  return all ? 0 : 1;
}
