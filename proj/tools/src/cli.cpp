#include "lockshift_cli/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lockshift/frontend.hpp"
#include "lockshift/guardcheck.hpp"
#include "lockshift/pipeline.hpp"
#include "lockshift/transform.hpp"

namespace lockshift::cli {
namespace {

class Timer {
 public:
  explicit Timer(bool enabled) : enabled_(enabled) {}

  template <typename F>
  auto phase(const std::string &name, F &&f) {
    auto start = std::chrono::steady_clock::now();
    struct Record {
      Timer *self;
      std::string name;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
        self->phases_.emplace_back(name, ms.count());
      }
    } record{this, name, start};
    return f();
  }

  void report(std::ostream &err) const {
    if (!enabled_) return;
    double total = 0;
    for (const auto &[name, ms] : phases_) {
      err << "timing: " << std::left << std::setw(10) << name << std::right << std::fixed << std::setprecision(3)
          << std::setw(10) << ms << " ms\n";
      total += ms;
    }
    err << "timing: " << std::left << std::setw(10) << "total" << std::right << std::setw(10) << total << " ms\n";
  }

 private:
  bool enabled_;
  std::vector<std::pair<std::string, double>> phases_;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void emit(const std::optional<std::string> &path, const std::string &text, std::ostream &out) {
  if (path)
    write_file(*path, text);
  else
    out << text;
}

void report(const Diagnostics &diags, const std::string &file, std::ostream &err) {
  for (const auto &d : diags.items()) {
    const char *severity = d.severity == Severity::Note ? "note" : d.severity == Severity::Warning ? "warning" : "error";
    err << file << ':' << d.line << ": " << severity << ": [" << d.code << "] " << d.function << ": " << d.message
        << '\n';
  }
}

nlohmann::json sets_json(const LockSet &s) { return s.texts(); }

std::string flow_dump(const Program &program, const AnalysisResult &r) {
  nlohmann::json root = nlohmann::json::object();
  for (const FunctionDef *f : program.defined_functions()) {
    const FlowGraph &g = r.flow.graphs.at(f->name);
    const FunctionFlowFacts &facts = r.flow.facts.at(f->name);
    nlohmann::json lines = nlohmann::json::object();
    for (std::size_t n = 0; n < g.size(); ++n) {
      int node = static_cast<int>(n);
      std::string label = node == FlowGraph::kEntry ? "entry" : node == FlowGraph::kRet ? "ret" : stmt_label(*g.stmt(node));
      lines[std::to_string(g.line(node))].push_back({{"node", node},
                                                     {"stmt", label},
                                                     {"in_live", sets_json(facts.in_live[n])},
                                                     {"out_live", sets_json(facts.out_live[n])},
                                                     {"in_avail", sets_json(facts.in_avail[n])},
                                                     {"out_avail", sets_json(facts.out_avail[n])}});
    }
    root[f->name] = {{"mels", sets_json(facts.mels)}, {"mrls", sets_json(facts.mrls)}, {"lines", lines}};
  }
  return root.dump(2) + "\n";
}

void dumps(const RunConfig &config, const Program &program, const AnalysisResult &r) {
  if (config.dump_cfg) {
    std::filesystem::create_directories(*config.dump_cfg);
    for (const auto &[name, g] : r.flow.graphs)
      write_file((std::filesystem::path(*config.dump_cfg) / (name + ".dot")).string(), g.to_dot());
  }
  if (config.dump_callgraph) write_file(*config.dump_callgraph, r.callgraph.to_dot());
  if (config.dump_flow) write_file(*config.dump_flow, flow_dump(program, r));
}

int check_guarded(const Program &guarded, const std::string &file, std::ostream &err) {
  auto errors = check(guarded);
  for (const auto &e : errors) err << file << ':' << e.line << ": error: " << e.message() << '\n';
  return errors.empty() ? kOk : kRejected;
}

int run_checked(const RunConfig &config, std::ostream &out, std::ostream &err) {
  Timer timer(config.timings);
  const std::string source = read_file(config.input);

  if (config.mode == Mode::Check) {
    Program guarded = timer.phase("parse", [&] { return parse(source, Dialect::Guarded); });
    int code = timer.phase("check", [&] { return check_guarded(guarded, config.input, err); });
    timer.report(err);
    return code;
  }

  Program program = timer.phase("parse", [&] { return parse(source); });
  LockSummary summary;
  if (config.use_summary && config.mode != Mode::Analyze) {
    summary = read_summary(read_file(*config.use_summary));
  } else {
    AnalysisResult r = timer.phase("analyze", [&] { return analyze(program, {config.iteration_budget}); });
    report(r.diagnostics, config.input, err);
    dumps(config, program, r);
    summary = std::move(r.summary);
  }
  if (config.emit_summary) write_file(*config.emit_summary, write_summary(summary));

  if (config.mode == Mode::Analyze) {
    if (!config.emit_summary) emit(config.output, write_summary(summary), out);
    timer.report(err);
    return kOk;
  }

  Diagnostics diags;
  std::string text = timer.phase("transform", [&] { return print_guarded(transform(program, summary, &diags)); });
  report(diags, config.input, err);
  emit(config.output, text, out);
  int code = kOk;
  if (config.mode == Mode::Full) {
    code = timer.phase("check", [&] {
      Program guarded = parse(text, Dialect::Guarded);
      return check_guarded(guarded, config.output.value_or(config.input), err);
    });
  }
  timer.report(err);
  return code;
}

}  // namespace

int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
  try {
    return run_checked(config, out, err);
  } catch (const SourceError &e) {
    err << config.input << ':' << e.line() << ':' << e.column() << ": error: " << e.kind() << ": " << e.detail()
        << '\n';
  } catch (const std::exception &e) {
    err << config.input << ": error: " << e.what() << '\n';
  }
  return kDiagnostics;
}

std::optional<RunConfig> parse_command_line(int argc, const char *const *argv, std::ostream &out,
                                            std::ostream &err, int &exit_code) {
  RunConfig config;
  CLI::App app{"Infer lock summaries for Mini-C programs and rewrite them into the guarded dialect"};
  app.require_subcommand(0, 1);
  std::string check_file;
  app.add_option("--check", check_file, "Run the guard checker on a .gmc file");

  auto add_common = [&](CLI::App *sub, bool analysis) {
    sub->add_option("input", config.input, "Input file")->required();
    sub->add_flag("--timings", config.timings, "Print per-phase wall time");
    if (!analysis) return;
    sub->add_option("-o,--output", config.output, "Output file (default: standard output)");
    sub->add_option("--emit-summary", config.emit_summary, "Write the lock summary as JSON");
    sub->add_option("--dump-cfg", config.dump_cfg, "Directory for one DOT file per function");
    sub->add_option("--dump-callgraph", config.dump_callgraph, "DOT file for the call graphs");
    sub->add_option("--dump-flow", config.dump_flow, "JSON file with per-line In/Out lock sets");
    sub->add_option("--iteration-budget", config.iteration_budget, "Fixpoint rounds allowed per recursive SCC")
        ->check(CLI::PositiveNumber);
  };
  auto *analyze_cmd = app.add_subcommand("analyze", "Print the lock summary of a .mc program");
  auto *transform_cmd = app.add_subcommand("transform", "Rewrite a .mc program into the guarded dialect");
  auto *full_cmd = app.add_subcommand("full", "Analyze, transform and check a .mc program");
  auto *check_cmd = app.add_subcommand("check", "Check guard ownership in a .gmc program");
  add_common(analyze_cmd, true);
  add_common(transform_cmd, true);
  add_common(full_cmd, true);
  add_common(check_cmd, false);
  for (auto *sub : {transform_cmd, full_cmd})
    sub->add_option("--use-summary", config.use_summary, "Use this summary instead of analyzing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    exit_code = app.exit(e, out, err);
    return std::nullopt;
  }
  if (analyze_cmd->parsed()) config.mode = Mode::Analyze;
  else if (transform_cmd->parsed()) config.mode = Mode::Transform;
  else if (full_cmd->parsed()) config.mode = Mode::Full;
  else if (check_cmd->parsed()) config.mode = Mode::Check;
  else if (!check_file.empty()) {
    config.mode = Mode::Check;
    config.input = check_file;
  } else {
    err << app.help();
    exit_code = kDiagnostics;
    return std::nullopt;
  }
  return config;
}

}  // namespace lockshift::cli
