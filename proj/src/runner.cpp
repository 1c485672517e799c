#include "swarmsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace swarmsim::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string opt_fmt(const std::optional<double>& v, const char* spec = "%.6f") {
  return v ? fmt(*v, spec) : std::string();
}

std::string queue_label(int queue) {
  return queue == 0 ? "table" : std::to_string(queue);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

std::string cell_name(const Cell& cell) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s-n%03d-q%s-%s-s%llu", cell.strategy.c_str(), cell.nodes,
                cell.queue == 0 ? "T" : std::to_string(cell.queue).c_str(), cell.env.c_str(),
                static_cast<unsigned long long>(cell.seed));
  return buf;
}

ScenarioConfig cell_config(ScenarioConfig base, const Cell& cell) {
  base.strategy = cell.strategy;
  base.node_count = cell.nodes;
  base.queue_capacity = cell.queue;
  base.environment = cell.env;
  base.seed = cell.seed;
  return base;
}

CellResult execute_cell(const ScenarioConfig& base, const Cell& cell,
                        const ArtifactOptions& opts) {
  const ScenarioConfig cfg = cell_config(base, cell);
  sim::Engine engine(cfg);

  const std::string name = cell_name(cell);
  std::ofstream msg_log;
  if (!opts.out_dir.empty() && opts.log_messages) {
    msg_log.open(fs::path(opts.out_dir) / "messages" / (name + ".log"));
    engine.set_message_sink([&msg_log](const MessageEnvelope& env) {
      msg_log << to_wire(env) << '\n';
    });
  }

  sim::RunResult result = engine.run();

  if (!opts.out_dir.empty()) {
    const fs::path out(opts.out_dir);
    write_file(out / "manifest" / (name + ".json"), cfg.to_manifest_json() + "\n");

    auto series = metrics::export_timeseries(engine.ledger(), opts.timeseries_bucket_s);
    for (const auto& [metric, points] : series) {
      std::ostringstream csv;
      csv << "time,value\n";
      for (const auto& p : points) {
        csv << fmt(p.t_s, "%g") << ',' << fmt(p.value) << '\n';
      }
      write_file(out / "timeseries" / metric / (name + ".csv"), csv.str());
    }

    if (opts.dump_pheromones && cfg.strategy == "aco") {
      const fs::path dir = out / "pheromones" / name;
      fs::create_directories(dir);
      for (NodeId i = 0; i < engine.node_count(); ++i) {
        std::ostringstream csv;
        csv << "neighbor,task_type,tau\n";
        for (const auto& [nb, type, tau] : engine.pheromone_rows(i)) {
          csv << node_name(nb) << ',' << to_string(type) << ',' << fmt(tau) << '\n';
        }
        write_file(dir / (node_name(i) + ".csv"), csv.str());
      }
    }

    if (!result.topology_snapshots.empty()) {
      const fs::path dir = out / "topology" / name;
      fs::create_directories(dir);
      for (const auto& [t_ms, text] : result.topology_snapshots) {
        write_file(dir / ("t" + std::to_string(t_ms / 1000) + ".txt"), text);
      }
    }
  }

  return CellResult{cell, result.summary, result.stats};
}

std::vector<Cell> expand_matrix(const std::vector<std::string>& strategies,
                                const std::vector<int>& node_counts,
                                const std::vector<int>& queues,
                                const std::vector<std::string>& envs,
                                const std::vector<std::uint64_t>& seeds) {
  std::vector<Cell> cells;
  for (const auto& s : strategies) {
    for (int n : node_counts) {
      for (int q : queues) {
        for (const auto& e : envs) {
          for (std::uint64_t seed : seeds) {
            cells.push_back({s, n, q, e, seed});
          }
        }
      }
    }
  }
  return cells;
}

std::vector<CellResult> run_cells(const ScenarioConfig& base, const std::vector<Cell>& cells,
                                  const ArtifactOptions& opts, int jobs) {
  if (!opts.out_dir.empty()) {
    const fs::path out(opts.out_dir);
    fs::create_directories(out / "manifest");
    for (const char* m : {"ld", "st", "hph", "am", "mpr", "hmr", "gr"}) {
      fs::create_directories(out / "timeseries" / m);
    }
    if (opts.log_messages) fs::create_directories(out / "messages");
  }

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || failed.load()) return;
      try {
        results[i] = execute_cell(base, cells[i], opts);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mu);
        failed = true;
        error = cell_name(cells[i]) + ": " + ex.what();
        return;
      }
    }
  };

  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed) throw std::runtime_error(error);
  return results;
}

std::string summary_csv_header() {
  return "strategy,nodes,queue,env,seed,LD,ST,HPH,AM,MPR,HMR,GR";
}

std::string summary_csv_row(const CellResult& r) {
  std::ostringstream out;
  out << r.cell.strategy << ',' << r.cell.nodes << ',' << queue_label(r.cell.queue) << ','
      << r.cell.env << ',' << r.cell.seed << ',' << fmt(r.summary.ld) << ','
      << opt_fmt(r.summary.st) << ',' << opt_fmt(r.summary.hph) << ',' << r.summary.am << ','
      << opt_fmt(r.summary.mpr) << ',' << opt_fmt(r.summary.hmr) << ','
      << opt_fmt(r.summary.gr);
  return out.str();
}

std::string counts_csv_header() {
  return "strategy,nodes,queue,env,seed,requests,hits,misses,returned,am_attributed,"
         "emitted,done_local,done_remote,lost,live_end";
}

std::string counts_csv_row(const CellResult& r) {
  std::ostringstream out;
  out << r.cell.strategy << ',' << r.cell.nodes << ',' << queue_label(r.cell.queue) << ','
      << r.cell.env << ',' << r.cell.seed << ',' << r.summary.requests << ','
      << r.summary.hits << ',' << r.summary.misses << ',' << r.summary.returned << ','
      << r.summary.am_attributed << ',' << r.stats.tasks_emitted << ','
      << r.stats.done_local << ',' << r.stats.done_remote << ',' << r.stats.tasks_lost << ','
      << r.stats.live_end;
  return out.str();
}

namespace {

struct Aggregate {
  double ld = 0.0;
  std::optional<double> st, hph, mpr, hmr, gr;
  double am = 0.0;
};

struct OptMean {
  double sum = 0.0;
  int n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> mean() const {
    return n > 0 ? std::optional<double>(sum / n) : std::nullopt;
  }
};

double mix_mean_queue_limit(const ScenarioConfig& base, int queue_override) {
  if (queue_override > 0) return queue_override;
  double wsum = 0.0, lsum = 0.0;
  for (std::size_t i = 0; i < catalog().size(); ++i) {
    wsum += base.mix_weights[i];
    lsum += base.mix_weights[i] * catalog()[i].queue_limit;
  }
  return wsum > 0.0 ? lsum / wsum : 0.0;
}

}  // namespace

std::string render_table(const std::vector<CellResult>& rows, const ScenarioConfig& base) {
  // section key: (env, queue); row key inside a section: (strategy, nodes)
  std::map<std::pair<std::string, int>,
           std::map<std::pair<std::string, int>, std::vector<const CellResult*>>>
      sections;
  for (const auto& r : rows) {
    sections[{r.cell.env, r.cell.queue}][{r.cell.strategy, r.cell.nodes}].push_back(&r);
  }

  std::ostringstream out;
  for (const auto& [section, groups] : sections) {
    const auto& [env, queue] = section;
    out << "environment=" << env << " queue=" << queue_label(queue) << "\n";

    std::map<std::pair<std::string, int>, Aggregate> agg;
    for (const auto& [key, cells] : groups) {
      Aggregate a;
      OptMean st, hph, mpr, hmr, gr;
      double ld = 0.0, am = 0.0;
      for (const CellResult* r : cells) {
        ld += r->summary.ld;
        am += static_cast<double>(r->summary.am);
        st.add(r->summary.st);
        hph.add(r->summary.hph);
        mpr.add(r->summary.mpr);
        hmr.add(r->summary.hmr);
        gr.add(r->summary.gr);
      }
      a.ld = ld / cells.size();
      a.am = am / cells.size();
      a.st = st.mean();
      a.hph = hph.mean();
      a.mpr = mpr.mean();
      a.hmr = hmr.mean();
      a.gr = gr.mean();
      agg[key] = a;
    }

    // best per (metric, node count) across strategies
    const double ld_target = 0.75 * mix_mean_queue_limit(base, queue);
    std::set<int> node_counts;
    for (const auto& [key, a] : agg) node_counts.insert(key.second);

    enum Metric { LD, ST, HPH, AM, MPR, HMR, GR, kMetricCount };
    std::map<int, std::array<std::pair<std::string, double>, kMetricCount>> best;
    for (int n : node_counts) {
      auto& slots = best[n];
      for (auto& s : slots) s = {"", 0.0};
      for (const auto& [key, a] : agg) {
        if (key.second != n) continue;
        auto consider = [&](Metric m, const std::optional<double>& v, bool lower_better,
                            bool target_mode = false) {
          if (!v) return;
          double score = target_mode ? std::fabs(*v - ld_target) : *v;
          auto& slot = slots[m];
          const bool better = slot.first.empty() ||
                              (lower_better || target_mode ? score < slot.second
                                                           : score > slot.second);
          if (better) slot = {key.first, target_mode ? score : *v};
        };
        consider(LD, a.ld, true, true);
        consider(ST, a.st, true);
        consider(HPH, a.hph, true);
        consider(AM, a.am, true);
        consider(MPR, a.mpr, true);
        consider(HMR, a.hmr, false);
        consider(GR, a.gr, false);
      }
    }

    out << "strategy   #nodes        LD        ST       HPH        AM       MPR       HMR        GR\n";
    auto col = [&](const std::optional<double>& v, const char* spec, bool starred) {
      std::string s = v ? fmt(*v, spec) : std::string("-");
      if (starred) s += '*';
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%10s", s.c_str());
      return std::string(buf);
    };
    for (const auto& [key, a] : agg) {
      const auto& slots = best[key.second];
      auto starred = [&](Metric m) { return slots[m].first == key.first; };
      char head[32];
      std::snprintf(head, sizeof(head), "%-10s %6d", key.first.c_str(), key.second);
      out << head << col(a.ld, "%.2f", starred(LD)) << col(a.st, "%.2f", starred(ST))
          << col(a.hph, "%.2f", starred(HPH)) << col(a.am, "%.0f", starred(AM))
          << col(a.mpr, "%.2f", starred(MPR)) << col(a.hmr, "%.2f", starred(HMR))
          << col(a.gr, "%.2f", starred(GR)) << "\n";
    }
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split_csv(s)) {
    if (what == "queue capacities" && item == "table") {
      out.push_back(0);
      continue;
    }
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError(what + ": bad value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_csv(s)) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("seeds: bad value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("seeds: empty list");
  return out;
}

int validate_or_die(const ScenarioConfig& cfg) {
  auto errors = cfg.validate();
  if (errors.empty()) return 0;
  for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
  return 2;
}

void write_summary_files(const std::string& out_dir, const std::vector<CellResult>& results) {
  if (out_dir.empty()) return;
  std::ostringstream summary, counts;
  summary << summary_csv_header() << '\n';
  counts << counts_csv_header() << '\n';
  for (const auto& r : results) {
    summary << summary_csv_row(r) << '\n';
    counts << counts_csv_row(r) << '\n';
  }
  write_file(fs::path(out_dir) / "summary.csv", summary.str());
  write_file(fs::path(out_dir) / "counts.csv", counts.str());
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"swarmsim: deterministic simulator for decentralized task offloading"};
  app.require_subcommand(1);

  std::string config_path;
  std::string strategy, env, nodes_list, queue_list, seed_list;
  double duration = -1.0;
  std::string out_dir = "out";
  bool log_messages = false, dump_pheromones = false;
  double bucket_s = 60.0;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto add_common = [&](CLI::App* cmd, bool lists) {
    cmd->add_option("--config", config_path, "config file (key = value lines or JSON)");
    cmd->add_option("--strategy", strategy,
                    lists ? "strategies, comma separated" : "random | aco | gossips");
    cmd->add_option("--nodes", nodes_list, lists ? "node counts, comma separated" : "node count");
    cmd->add_option("--queue-capacity", queue_list,
                    lists ? "queue capacities ('table' or ints), comma separated"
                          : "queue capacity ('table' or an int)");
    cmd->add_option("--env", env, lists ? "environments, comma separated" : "static | dynamic");
    cmd->add_option("--duration", duration, "virtual seconds");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_flag("--log-messages", log_messages, "write the wire-format message log");
    cmd->add_option("--timeseries-bucket", bucket_s, "time series bucket seconds");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run a single scenario");
  add_common(run_cmd, false);
  std::uint64_t run_seed = 0;
  bool seed_given = false;
  run_cmd->add_option("--seed", run_seed, "run seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run_cmd->add_flag("--dump-pheromones", dump_pheromones, "dump per-node pheromone tables");

  CLI::App* matrix_cmd = app.add_subcommand("matrix", "run an experiment sweep");
  add_common(matrix_cmd, true);
  matrix_cmd->add_option("--seeds", seed_list, "seeds, comma separated");
  matrix_cmd->add_option("--jobs", jobs, "parallel cells");

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config and echo it resolved");
  validate_cmd->add_option("--config", config_path, "config file");

  std::vector<std::string> argv_storage = args;
  std::vector<char*> argv;
  argv.push_back(const_cast<char*>("swarmsim"));
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ScenarioConfig base;
    if (!config_path.empty()) base = load_config_file(config_path);

    if (validate_cmd->parsed()) {
      const int rc = validate_or_die(base);
      if (rc == 0) std::cout << base.to_manifest_json() << "\n";
      return rc;
    }

    if (duration > 0.0) base.duration_s = duration;

    if (run_cmd->parsed()) {
      if (!strategy.empty()) base.strategy = strategy;
      if (!nodes_list.empty()) base.node_count = parse_int_list(nodes_list, "nodes").at(0);
      if (!queue_list.empty()) {
        base.queue_capacity = parse_int_list(queue_list, "queue capacities").at(0);
      }
      if (!env.empty()) base.environment = env;
      if (seed_given) base.seed = run_seed;
      const int rc = validate_or_die(base);
      if (rc != 0) return rc;

      Cell cell{base.strategy, base.node_count, base.queue_capacity, base.environment,
                base.seed};
      ArtifactOptions opts{out_dir, log_messages, dump_pheromones, bucket_s};
      auto results = run_cells(base, {cell}, opts, 1);
      write_summary_files(out_dir, results);
      std::cout << render_table(results, base);
      const auto& s = results[0].summary;
      std::cout << "requests=" << s.requests << " hits=" << s.hits << " misses=" << s.misses
                << " returned=" << s.returned << "\n";
      std::cout << "artifacts: " << out_dir << "/\n";
      return 0;
    }

    // matrix
    std::vector<std::string> strategies =
        strategy.empty() ? std::vector<std::string>{"random", "aco", "gossips"}
                         : split_csv(strategy);
    std::vector<int> node_counts =
        nodes_list.empty() ? std::vector<int>{10, 25, 50, 100}
                           : parse_int_list(nodes_list, "nodes");
    std::vector<int> queues = queue_list.empty()
                                  ? std::vector<int>{5, 10, 15}
                                  : parse_int_list(queue_list, "queue capacities");
    std::vector<std::string> envs =
        env.empty() ? std::vector<std::string>{"static", "dynamic"} : split_csv(env);
    std::vector<std::uint64_t> seeds = seed_list.empty()
                                           ? std::vector<std::uint64_t>{1, 2, 3, 4, 5}
                                           : parse_seed_list(seed_list);

    for (const auto& s : strategies) {
      ScenarioConfig probe = base;
      probe.strategy = s;
      const int rc = validate_or_die(probe);
      if (rc != 0) return rc;
    }
    for (const auto& e : envs) {
      if (e != "static" && e != "dynamic") {
        std::cerr << "config error: environment: must be static or dynamic (got '" << e
                  << "')\n";
        return 2;
      }
    }

    auto cells = expand_matrix(strategies, node_counts, queues, envs, seeds);
    ArtifactOptions opts{out_dir, log_messages, false, bucket_s};
    auto results = run_cells(base, cells, opts, jobs);
    write_summary_files(out_dir, results);
    std::cout << render_table(results, base);
    std::cout << cells.size() << " cells -> " << out_dir << "/summary.csv\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace swarmsim::cli
