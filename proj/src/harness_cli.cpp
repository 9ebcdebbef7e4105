#include "tokencom/harness/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tokencom/harness/report.hpp"
#include "tokencom/harness/sweep.hpp"

namespace tokencom::harness {

namespace {

void print_usage(std::ostream& os) {
  os << "usage: tokencom <subcommand> [--config <path|default>] [--seed <n>] [--out <dir>]\n"
        "subcommands:\n"
        "  gen-data            generate train/test splits into <out>/data\n"
        "  train               train the configured mode; writes <out>/ckpt\n"
        "  eval                evaluate a trained checkpoint at the configured SNR\n"
        "  sweep-snr           accuracy vs SNR for the configured modes and seeds\n"
        "  sweep-tokens        accuracy vs machine-token count (one training per K)\n"
        "  compression-report  per-mode transmitted bytes and ratios\n";
}

struct Args {
  std::string subcommand;
  std::string config = "default";
  std::string out = "out";
  std::optional<std::uint64_t> seed;
};

bool parse_args(int argc, char** argv, Args& args, std::string& err) {
  if (argc < 2) {
    err = "missing subcommand";
    return false;
  }
  args.subcommand = argv[1];
  for (int i = 2; i < argc; ++i) {
    const std::string flag = argv[i];
    auto need_value = [&](const char* name) -> const char* {
      if (i + 1 >= argc) {
        err = std::string("flag ") + name + " needs a value";
        return nullptr;
      }
      return argv[++i];
    };
    if (flag == "--config") {
      const char* v = need_value("--config");
      if (!v) return false;
      args.config = v;
    } else if (flag == "--seed") {
      const char* v = need_value("--seed");
      if (!v) return false;
      try {
        args.seed = std::stoull(v);
      } catch (...) {
        err = "bad --seed value '" + std::string(v) + "'";
        return false;
      }
    } else if (flag == "--out") {
      const char* v = need_value("--out");
      if (!v) return false;
      args.out = v;
    } else {
      err = "unknown flag '" + flag + "'";
      return false;
    }
  }
  return true;
}

scenes::Dataset load_dataset(const Paths& paths) {
  const auto train = paths.data_dir() / "train.txt";
  const auto test = paths.data_dir() / "test.txt";
  if (!std::filesystem::exists(train) || !std::filesystem::exists(test)) {
    throw std::runtime_error("dataset files missing under " + paths.data_dir().string() +
                             " (run gen-data first)");
  }
  scenes::Dataset ds;
  ds.train = scenes::read_records(train);
  ds.test = scenes::read_records(test);
  if (ds.train.empty() || ds.test.empty()) throw std::runtime_error("dataset files are empty");
  return ds;
}

void cmd_gen_data(const RunConfig& cfg, const Paths& paths) {
  scenes::Dataset ds = scenes::generate_dataset(cfg.seed, cfg.data);
  scenes::write_records(paths.data_dir() / "train.txt", ds.train);
  scenes::write_records(paths.data_dir() / "test.txt", ds.test);
  std::ofstream manifest(paths.data_dir() / "manifest.txt", std::ios::trunc);
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(cfg.config_hash()));
  manifest << "seed " << cfg.seed << "\n"
           << "config_hash " << hex << "\n"
           << "train_records " << ds.train.size() << "\n"
           << "test_records " << ds.test.size() << "\n";
  std::cout << "wrote " << ds.train.size() << " train / " << ds.test.size()
            << " test records to " << paths.data_dir().string() << "\n";
}

void cmd_train(const RunConfig& cfg, const Paths& paths, const scenes::Vocab& vocab) {
  auto data = load_dataset(paths);
  const auto ckpt = train_mode(cfg, paths, cfg.mode, cfg.k, cfg.seed, data, vocab);
  std::cout << "checkpoint: " << ckpt.string() << "\n";
}

void cmd_eval(const RunConfig& cfg, const Paths& paths, const scenes::Vocab& vocab) {
  auto data = load_dataset(paths);
  Agents ag = load_agents(cfg, paths, cfg.mode, cfg.k, cfg.seed);
  RunResult r = evaluate_mode(cfg, paths, cfg.mode, cfg.k, cfg.seed, cfg.snr_db, ag, data, vocab);
  const auto csv_path = paths.results_dir() / ("eval_" + std::string(to_string(cfg.mode)) + "_k" +
                                               std::to_string(cfg.k) + "_s" +
                                               std::to_string(cfg.seed) + ".csv");
  std::ofstream csv(csv_path, std::ios::trunc);
  csv << run_result_csv_header() << "\n" << run_result_csv_row(r) << "\n";
  std::cout << run_result_csv_header() << "\n" << run_result_csv_row(r) << "\n";

  if (cfg.mode == Mode::proposed) {
    // Embedding-sparsity check: share of token variance in the top L_t
    // principal components. Expected high on a specialized task; flagged,
    // not asserted.
    const double frac = top_variance_fraction(ag.sensor, vocab, data.test, cfg.k, cfg.l_t);
    const bool ok = frac >= 0.9;
    std::ofstream vr(paths.results_dir() / ("variance_s" + std::to_string(cfg.seed) + ".csv"),
                     std::ios::trunc);
    vr << "l_t,top_variance_fraction,flag\n"
       << cfg.l_t << "," << fmt_num(frac) << "," << (ok ? "ok" : "low") << "\n";
    if (!ok) {
      std::cerr << "warning: top-" << cfg.l_t << " principal components carry only "
                << fmt_num(100 * frac) << "% of machine-token variance\n";
    }
  }
}

void cmd_sweep_snr(const RunConfig& cfg, const Paths& paths, const scenes::Vocab& vocab) {
  auto data = load_dataset(paths);
  auto rows = sweep_snr(cfg, paths, data, vocab);
  std::cout << "sweep-snr: " << rows.size() << " rows -> "
            << (paths.results_dir() / "sweep_snr.csv").string() << "\n";
}

void cmd_sweep_tokens(const RunConfig& cfg, const Paths& paths, const scenes::Vocab& vocab) {
  auto data = load_dataset(paths);
  auto rows = sweep_tokens(cfg, paths, data, vocab);
  std::cout << "sweep-tokens: " << rows.size() << " rows -> "
            << (paths.results_dir() / "sweep_tokens.csv").string() << "\n";
}

void cmd_compression_report(const RunConfig& cfg, const Paths& paths) {
  auto data = load_dataset(paths);
  auto rep = compression_report(cfg, data);
  write_compression_csv(paths.results_dir() / "compression.csv", rep);
  std::cout << "compression report -> " << (paths.results_dir() / "compression.csv").string()
            << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  Args args;
  std::string err;
  if (!parse_args(argc, argv, args, err)) {
    std::cerr << "error: " << err << "\n";
    print_usage(std::cerr);
    return 2;
  }
  if (args.subcommand == "help" || args.subcommand == "--help" || args.subcommand == "-h") {
    print_usage(std::cout);
    return 0;
  }

  try {
    scenes::Vocab vocab;
    RunConfig cfg = load_config(args.config, vocab);
    if (args.seed) {
      cfg.seed = *args.seed;
      cfg.seeds = {*args.seed};
    }
    cfg.validate(vocab);
    Paths paths{std::filesystem::path(args.out)};
    paths.ensure();
    write_manifest(paths, cfg);

    if (args.subcommand == "gen-data") cmd_gen_data(cfg, paths);
    else if (args.subcommand == "train") cmd_train(cfg, paths, vocab);
    else if (args.subcommand == "eval") cmd_eval(cfg, paths, vocab);
    else if (args.subcommand == "sweep-snr") cmd_sweep_snr(cfg, paths, vocab);
    else if (args.subcommand == "sweep-tokens") cmd_sweep_tokens(cfg, paths, vocab);
    else if (args.subcommand == "compression-report") cmd_compression_report(cfg, paths);
    else {
      std::cerr << "error: unknown subcommand '" << args.subcommand << "'\n";
      print_usage(std::cerr);
      return 2;
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: " << msg << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tokencom::harness
