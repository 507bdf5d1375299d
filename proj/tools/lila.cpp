// lila: check, graph, compile, run and bench LiLa programs.
// Exit codes: 0 success, 1 validation or run failure, 2 I/O or usage.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lila/bench/bench.hpp"
#include "lila/lang/program.hpp"
#include "lila/ldg/ldg.hpp"
#include "lila/runtime/engine.hpp"
#include "lila/synth/route_graph.hpp"

namespace fs = std::filesystem;
using namespace lila;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::atomic<bool> interrupted{false};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::map<std::string, std::string> parse_pairs(const std::vector<std::string>& items, const std::string& flag) {
  std::map<std::string, std::string> out;
  for (const auto& s : items) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError(flag, "expected key=value, got '" + s + "'");
    out[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return out;
}

void print_warnings(const Diagnostics& ds) {
  for (const auto& d : ds) {
    if (!d.is_error()) std::cerr << d << "\n";
  }
}

struct Source {
  std::string path;
  std::vector<std::string> binds;

  /// Parsed and validated; placeholders resolved when bound (all of them
  /// when `require_bindings`).
  lang::LilaProgram load(bool require_bindings) const {
    if (fs::path(path).extension() != ".lila") throw IoError(path + ": expected a .lila file");
    auto program = lang::parse(read_file(path));
    auto diags = lang::validate_program(program);
    print_warnings(diags);
    for (const auto& d : diags) {
      if (d.is_error()) throw Error(d);
    }
    auto bindings = parse_pairs(binds, "--bind");
    if (require_bindings || !bindings.empty()) {
      if (!require_bindings) {
        for (const auto& p : lang::placeholders(program)) bindings.emplace(p, "$" + p);
      }
      program = lang::resolve_config(std::move(program), bindings);
    }
    return program;
  }
};

synth::RouteGraph synthesize(const lang::LilaProgram& program) {
  auto rg = synth::compile(program);
  print_warnings(rg.warnings);
  return rg;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--sizes", "not a size list: " + text);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiLa compiler and runtime"};
  app.require_subcommand(1);

  Source src;
  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("file", src.path, "LiLa program (.lila)")->required();
    cmd->add_option("--bind", src.binds, "bind a $placeholder: key=value (repeatable)");
  };

  auto* check = app.add_subcommand("check", "parse and validate a program");
  add_source(check);

  auto* graph = app.add_subcommand("graph", "print the dependency graph or route graph as DOT");
  add_source(graph);
  bool want_ldg = false;
  bool want_rg = false;
  std::string out_path;
  auto* ldg_flag = graph->add_flag("--ldg", want_ldg, "LiLa dependency graph");
  graph->add_flag("--rg", want_rg, "synthesized route graph")->excludes(ldg_flag);
  graph->add_option("--out", out_path, "write to a file instead of stdout");

  auto* compile = app.add_subcommand("compile", "emit the route graph as JSON");
  add_source(compile);
  compile->add_option("--out", out_path, "write to a file instead of stdout");

  auto* run = app.add_subcommand("run", "execute a program; the report goes to stdout as JSON");
  add_source(run);
  std::string base_dir;
  if (const char* env = std::getenv("LILA_BASE_DIR")) base_dir = env;
  bool strict = false;
  bool sequential = false;
  bool split_arrays = false;
  std::string mode = "batch";
  double watch_seconds = 0;
  std::string dead_letters;
  std::string mock_out;
  std::vector<std::string> mock_in;
  run->add_option("--base-dir", base_dir, "directory file endpoints are resolved against (env LILA_BASE_DIR)");
  run->add_flag("--strict", strict, "exit 1 when any message errored");
  run->add_flag("--sequential", sequential, "single-threaded execution");
  run->add_flag("--split-arrays", split_arrays, "one message per element of a JSON array read from a file");
  run->add_option("--mode", mode, "batch or watch")->check(CLI::IsMember({"batch", "watch"}));
  run->add_option("--watch-seconds", watch_seconds, "stop watching after this long (0: until interrupted)");
  run->add_option("--dead-letters", dead_letters, "directory for dead-letter files");
  run->add_option("--mock-in", mock_in, "feed a mock source from a file: name=path (repeatable)");
  run->add_option("--mock-out", mock_out, "write mock sink payloads to <dir>/<name>.txt");

  auto* bench = app.add_subcommand("bench", "time a filter scenario against the imperative baseline");
  std::string scenario;
  std::string sizes_text;
  std::size_t reps = 5;
  std::size_t warmup = 2;
  std::string plot_path;
  bench->add_option("scenario", scenario, "message-filter or content-filter")->required();
  bench->add_option("--sizes", sizes_text, "comma-separated, strictly increasing");
  bench->add_option("--reps", reps, "timed repetitions (>= 5)");
  bench->add_option("--warmup", warmup, "warmup runs (>= 2)");
  bench->add_option("--out", out_path, "CSV report path (stdout if omitted)");
  bench->add_option("--plot", plot_path, "gnuplot data file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (check->parsed()) {
      auto program = src.load(false);
      ldg::build_ldg(program);
      synthesize(program);
      std::cerr << src.path << ": ok\n";
      return exit_ok;
    }
    if (graph->parsed()) {
      if (!want_ldg && !want_rg) throw CLI::ValidationError("graph", "pass --ldg or --rg");
      auto program = src.load(false);
      write_output(out_path, want_ldg ? ldg::export_ldg_dot(ldg::build_ldg(program))
                                      : synth::export_rg_dot(synthesize(program)));
      return exit_ok;
    }
    if (compile->parsed()) {
      write_output(out_path, synth::export_rg_json(synthesize(src.load(false))));
      return exit_ok;
    }
    if (run->parsed()) {
      auto rg = synthesize(src.load(true));
      runtime::RunOptions o;
      if (!base_dir.empty()) o.base_dir = base_dir;
      o.parallel = !sequential;
      o.split_arrays = split_arrays;
      if (!dead_letters.empty()) o.dead_letter_dir = dead_letters;
      for (const auto& [name, path] : parse_pairs(mock_in, "--mock-in")) o.mock_inputs[name] = {read_file(path)};
      if (mode == "watch") {
        o.mode = runtime::Mode::watch;
        std::signal(SIGINT, [](int) { interrupted = true; });
        auto start = std::chrono::steady_clock::now();
        o.stop = [&] {
          auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          return interrupted.load() || (watch_seconds > 0 && elapsed >= watch_seconds);
        };
      }
      auto report = runtime::run(rg, o);
      print_warnings(report.warnings);
      std::cout << report.to_json(rg);
      std::cerr << "wall time: " << report.wall_millis << " ms\n";
      if (!mock_out.empty()) {
        fs::create_directories(mock_out);
        std::map<std::string, std::string> files;
        for (const auto& s : report.sinks) {
          if (s.endpoint.scheme != runtime::Scheme::mock) continue;
          auto& text = files[s.endpoint.path];
          for (const auto& p : s.payloads) text += p + "\n";
        }
        for (const auto& [name, text] : files) write_output((fs::path(mock_out) / (name + ".txt")).string(), text);
      }
      for (const auto& d : report.dead_letters) std::cerr << "dead letter " << d.trace_id << ": " << d.error << "\n";
      return strict && report.errored > 0 ? exit_failed : exit_ok;
    }
    if (bench->parsed()) {
      bench::BenchScenario s;
      s.kind = bench::parse_scenario(scenario);
      if (sizes_text.empty()) {
        s.sizes = s.kind == bench::ScenarioKind::message_filter ? std::vector<std::size_t>{1000, 2000, 4000, 8000}
                                                                 : std::vector<std::size_t>{250, 500, 1000, 2000};
      } else {
        s.sizes = parse_sizes(sizes_text);
      }
      s.repetitions = reps;
      s.warmup = warmup;
      auto result = bench::run_bench(s);
      write_output(out_path, bench::emit_report({result}));
      if (!plot_path.empty()) write_output(plot_path, bench::emit_gnuplot({result}));
      std::cerr << "ilp ratios:";
      for (auto r : result.ilp_ratios()) std::cerr << ' ' << r;
      std::cerr << "\nbaseline ratios:";
      for (auto r : result.baseline_ratios()) std::cerr << ' ' << r;
      std::cerr << "\n";
      return exit_ok;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return exit_usage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    std::cerr << (src.path.empty() ? std::string() : src.path + ":") << e.diagnostic() << "\n";
    return exit_failed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failed;
  }
  return exit_usage;
}
