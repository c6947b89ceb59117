#include "newsgate/cli.hpp"

#include "newsgate/classifier.hpp"
#include "newsgate/error.hpp"
#include "newsgate/format.hpp"
#include "newsgate/ledger.hpp"
#include "newsgate/oracle.hpp"
#include "newsgate/simharness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace newsgate {

namespace {

constexpr std::uint64_t kOracleSeed = 20240117;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed, std::ostream& out) {
  auto config = load_config(config_path);
  if (seed) config.seed = *seed;
  const auto result = run_scenario(config);
  write_outputs(result, out_dir);
  const auto& m = result.metrics;
  out << "articles " << m.article_count << " (bootstrap " << m.bootstrap_articles << ")\n"
      << "published " << m.published << ", rejected at analysis " << m.rejected_at_analysis
      << ", rejected fake " << m.rejected_fake << "\n"
      << "fake_published_rate " << format_real(m.fake_published_rate) << "\n"
      << "authentic_rejected_rate " << format_real(m.authentic_rejected_rate) << "\n"
      << "tip " << m.ledger_tip_hash << "\n";
  return 0;
}

int cmd_verify(const std::string& path, std::ostream& out) {
  const auto report = verify_export(read_file(path));
  if (report.ok) {
    out << "ok: " << report.blocks_checked << " blocks\n";
    return 0;
  }
  out << "tampered: ";
  if (report.first_corrupt_height) out << "block " << *report.first_corrupt_height << ": ";
  out << report.reason << "\n";
  return 1;
}

int cmd_classify(const std::string& model_path, const std::string& input_path, std::ostream& out) {
  std::ifstream model_in(model_path);
  if (!model_in) throw ProtocolError(ErrorCode::IoError, "cannot read " + model_path);
  const auto model = load_model(model_in);
  std::istringstream input(read_file(input_path));
  out << "p_real\tlambda\n";
  std::string line;
  while (std::getline(input, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Accepts `title<TAB>body`, a labeled corpus line, or a bare body.
    auto fields = split_tabs(line);
    if (fields.size() == 3) fields.erase(fields.begin());
    const std::string title = fields.size() >= 2 ? fields[0] : std::string();
    const std::string body = fields.size() >= 2 ? fields[1] : fields[0];
    const auto c = classify_and_rate(model, title, body);
    out << format_real(c.p_real) << '\t' << format_real(c.lambda) << '\n';
  }
  return 0;
}

int cmd_train(const std::string& corpus_path, const std::string& model_path, const ClassifierConfig& config,
              std::ostream& out) {
  std::istringstream in(read_file(corpus_path));
  const auto docs = read_corpus(in);
  const auto model = train(docs, config);
  std::ostringstream buf;
  save_model(model, buf);
  std::ofstream file(model_path, std::ios::binary | std::ios::trunc);
  if (!(file << buf.str())) throw ProtocolError(ErrorCode::IoError, "cannot write " + model_path);
  out << "trained on " << docs.size() << " documents, final loss " << format_real(model.final_loss) << "\n";
  return 0;
}

int cmd_corpus(std::uint32_t count, double fake_fraction, std::uint64_t seed, const std::string& path,
               std::ostream& out) {
  Rng rng(seed);
  const auto docs = generate_corpus(CorpusParams::defaults(), count, fake_fraction, rng);
  std::ostringstream buf;
  write_corpus(docs, buf);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!(file << buf.str())) throw ProtocolError(ErrorCode::IoError, "cannot write " + path);
  out << "wrote " << docs.size() << " documents\n";
  return 0;
}

int cmd_formulas(std::uint64_t seed, std::size_t cases, std::ostream& out) {
  bool ok = true;
  for (const auto& check : run_formula_oracle_suite(seed, cases, 1e-12)) {
    out << (check.passed() ? "PASS " : "FAIL ") << check.name << " cases=" << check.cases
        << " max_abs_error=" << format_real(check.max_abs_error);
    if (!check.passed()) out << " first_failure=\"" << check.first_failure << "\"";
    out << "\n";
    ok = ok && check.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudonymous news-rating protocol: simulation, ledger and classifier tools", "newsgate"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write metrics, trajectories and ledger");
  simulate->add_option("--config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Overrides the config seed");

  std::string ledger_file;
  auto* ledger = app.add_subcommand("ledger", "Ledger tools");
  ledger->require_subcommand(1);
  auto* verify = ledger->add_subcommand("verify", "Check a ledger.jsonl export");
  verify->add_option("file", ledger_file, "Ledger export")->required();

  std::string model_path, input_path;
  auto* classify = app.add_subcommand("classify", "Rate articles with a trained model");
  classify->add_option("--model", model_path, "Model file")->required();
  classify->add_option("--input", input_path, "Lines of title<TAB>body")->required();

  std::string corpus_path, train_out;
  ClassifierConfig train_config;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled corpus");
  train_cmd->add_option("--corpus", corpus_path, "Corpus file (label<TAB>title<TAB>body)")->required();
  train_cmd->add_option("--out", train_out, "Model file to write")->required();
  train_cmd->add_option("--epochs", train_config.epochs, "SGD epochs")->capture_default_str();
  train_cmd->add_option("--learning-rate", train_config.learning_rate, "SGD step size")->capture_default_str();
  train_cmd->add_option("--seed", train_config.seed, "Shuffle seed")->capture_default_str();

  std::uint32_t corpus_count = 200;
  double fake_fraction = 0.5;
  std::uint64_t corpus_seed = 1;
  std::string corpus_out;
  auto* corpus = app.add_subcommand("corpus", "Generate a synthetic labeled corpus");
  corpus->add_option("--count", corpus_count, "Documents")->capture_default_str();
  corpus->add_option("--fake-fraction", fake_fraction, "Share of fake documents")->capture_default_str();
  corpus->add_option("--seed", corpus_seed, "Generator seed")->capture_default_str();
  corpus->add_option("--out", corpus_out, "Corpus file to write")->required();

  std::uint64_t oracle_seed = kOracleSeed;
  std::size_t oracle_cases = 1000;
  auto* formulas = app.add_subcommand("formulas", "Formula checks");
  formulas->require_subcommand(1);
  auto* check = formulas->add_subcommand("check", "Compare the formulas with the reference evaluator");
  check->add_option("--seed", oracle_seed, "Input seed")->capture_default_str();
  check->add_option("--cases", oracle_cases, "Random cases per formula")->capture_default_str();

  std::vector<std::string> argv_storage{"newsgate"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, out_dir, seed, out);
    if (*verify) return cmd_verify(ledger_file, out);
    if (*classify) return cmd_classify(model_path, input_path, out);
    if (*train_cmd) return cmd_train(corpus_path, train_out, train_config, out);
    if (*corpus) return cmd_corpus(corpus_count, fake_fraction, corpus_seed, corpus_out, out);
    if (*check) return cmd_formulas(oracle_seed, oracle_cases, out);
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace newsgate
