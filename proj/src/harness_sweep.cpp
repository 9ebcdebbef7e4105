#include "tokencom/harness/sweep.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include "tokencom/harness/report.hpp"

namespace tokencom::harness {

namespace {

// Sweep points are independent runs over disjoint state; two workers match
// the desk-scale core count. Results land in caller-owned slots, so output
// order never depends on scheduling.
void parallel_tasks(const std::vector<std::function<void()>>& tasks, int workers = 2) {
  if (tasks.size() <= 1 || workers <= 1) {
    for (const auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void ensure_bases_parallel(const RunConfig& cfg, const Paths& paths, const scenes::Dataset& data,
                           const scenes::Vocab& vocab, bool need_sensor) {
  std::vector<std::function<void()>> tasks;
  for (auto seed : cfg.seeds) {
    tasks.push_back([&, seed] { ensure_base(cfg, paths, data, vocab, "task", seed); });
    if (need_sensor) {
      tasks.push_back([&, seed] { ensure_base(cfg, paths, data, vocab, "sensor", seed); });
    }
  }
  parallel_tasks(tasks);
}

}  // namespace

std::vector<RunResult> sweep_snr(const RunConfig& cfg, const Paths& paths,
                                 const scenes::Dataset& data, const scenes::Vocab& vocab) {
  bool need_sensor = false;
  for (Mode m : cfg.sweep_modes)
    need_sensor = need_sensor || (m == Mode::proposed || m == Mode::bench4);
  ensure_bases_parallel(cfg, paths, data, vocab, need_sensor);

  // Train each (mode, seed) point, then evaluate the SNR grid on it.
  struct Point {
    Mode mode;
    std::uint64_t seed;
    std::vector<RunResult> rows;  // one per SNR
  };
  std::vector<Point> points;
  for (Mode m : cfg.sweep_modes)
    for (auto seed : cfg.seeds) points.push_back(Point{m, seed, {}});

  std::vector<std::function<void()>> tasks;
  for (auto& p : points) {
    tasks.push_back([&cfg, &paths, &data, &vocab, &p] {
      train_mode(cfg, paths, p.mode, cfg.k, p.seed, data, vocab);
      Agents ag = load_agents(cfg, paths, p.mode, cfg.k, p.seed);
      for (double snr : cfg.sweep_snr) {
        p.rows.push_back(
            evaluate_mode(cfg, paths, p.mode, cfg.k, p.seed, snr, ag, data, vocab));
      }
    });
  }
  parallel_tasks(tasks);

  // Fixed row order: mode, then SNR, then seed.
  std::vector<RunResult> rows;
  for (std::size_t mi = 0; mi < cfg.sweep_modes.size(); ++mi) {
    for (std::size_t si = 0; si < cfg.sweep_snr.size(); ++si) {
      for (std::size_t di = 0; di < cfg.seeds.size(); ++di) {
        rows.push_back(points[mi * cfg.seeds.size() + di].rows[si]);
      }
    }
  }

  std::ofstream csv(paths.results_dir() / "sweep_snr.csv", std::ios::trunc);
  csv << run_result_csv_header() << "\n";
  for (const auto& r : rows) csv << run_result_csv_row(r) << "\n";

  std::vector<Series> series;
  for (std::size_t mi = 0; mi < cfg.sweep_modes.size(); ++mi) {
    Series s;
    s.label = to_string(cfg.sweep_modes[mi]);
    for (std::size_t si = 0; si < cfg.sweep_snr.size(); ++si) {
      double acc = 0.0;
      for (std::size_t di = 0; di < cfg.seeds.size(); ++di) {
        acc += points[mi * cfg.seeds.size() + di].rows[si].accuracy;
      }
      s.x.push_back(cfg.sweep_snr[si]);
      s.y.push_back(acc / static_cast<double>(cfg.seeds.size()));
    }
    series.push_back(std::move(s));
  }
  write_line_chart(paths.results_dir() / "sweep_snr.svg", "accuracy vs transmission SNR",
                   "SNR (dB)", "accuracy", series);
  return rows;
}

std::vector<RunResult> sweep_tokens(const RunConfig& cfg, const Paths& paths,
                                    const scenes::Dataset& data, const scenes::Vocab& vocab) {
  ensure_bases_parallel(cfg, paths, data, vocab, /*need_sensor=*/true);

  const std::vector<double> snrs = {0.0, 15.0};
  struct Point {
    int k;
    std::uint64_t seed;
    std::vector<RunResult> rows;  // one per SNR
  };
  std::vector<Point> points;
  for (int k : cfg.sweep_tokens)
    for (auto seed : cfg.seeds) points.push_back(Point{k, seed, {}});

  std::vector<std::function<void()>> tasks;
  for (auto& p : points) {
    tasks.push_back([&cfg, &paths, &data, &vocab, &snrs, &p] {
      train_mode(cfg, paths, Mode::proposed, p.k, p.seed, data, vocab);
      Agents ag = load_agents(cfg, paths, Mode::proposed, p.k, p.seed);
      for (double snr : snrs) {
        p.rows.push_back(
            evaluate_mode(cfg, paths, Mode::proposed, p.k, p.seed, snr, ag, data, vocab));
      }
    });
  }
  parallel_tasks(tasks);

  std::vector<RunResult> rows;
  for (std::size_t ki = 0; ki < cfg.sweep_tokens.size(); ++ki) {
    for (std::size_t si = 0; si < snrs.size(); ++si) {
      for (std::size_t di = 0; di < cfg.seeds.size(); ++di) {
        rows.push_back(points[ki * cfg.seeds.size() + di].rows[si]);
      }
    }
  }

  std::ofstream csv(paths.results_dir() / "sweep_tokens.csv", std::ios::trunc);
  csv << run_result_csv_header() << "\n";
  for (const auto& r : rows) csv << run_result_csv_row(r) << "\n";

  std::vector<Series> series;
  for (std::size_t si = 0; si < snrs.size(); ++si) {
    Series s;
    s.label = fmt_num(snrs[si]) + " dB";
    for (std::size_t ki = 0; ki < cfg.sweep_tokens.size(); ++ki) {
      double acc = 0.0;
      for (std::size_t di = 0; di < cfg.seeds.size(); ++di) {
        acc += points[ki * cfg.seeds.size() + di].rows[si].accuracy;
      }
      s.x.push_back(cfg.sweep_tokens[ki]);
      s.y.push_back(acc / static_cast<double>(cfg.seeds.size()));
    }
    series.push_back(std::move(s));
  }
  write_line_chart(paths.results_dir() / "sweep_tokens.svg", "accuracy vs machine-token count",
                   "K (tokens)", "accuracy", series);
  return rows;
}

}  // namespace tokencom::harness
