#include "flexgc/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "flexgc/interp.hpp"
#include "flexgc/ir_json.hpp"
#include "flexgc/miner.hpp"
#include "flexgc/report.hpp"

namespace flexgc {

namespace {

struct RunFlags {
  std::string program;
  int64_t gc_budget = 4096;
  int64_t step_budget = 1'000'000;
  std::string trace_out;
  std::string stats_out;
};

// Executes the program and appends one final collection over the globals,
// mirroring a measurement taken just before process exit.
struct RunResult {
  RunTrace trace;
  std::vector<GcStats> cycles;
  GcStats final_cycle;
  int64_t live = 0;
  int64_t arrays_live = 0;
  int64_t supply_cells = 0;
};

RunResult execute(const ProgramIndex& index, const RunFlags& flags,
                  TraceSink* sink) {
  InterpOptions opts;
  opts.gc_budget = flags.gc_budget;
  opts.step_budget = flags.step_budget;
  opts.trace_sink = sink;

  Interpreter interp(index, opts);
  RunResult result;
  result.trace = interp.run();
  result.cycles = result.trace.gc_cycles;
  result.final_cycle = interp.heap().collect(interp.roots(), interp.plans());
  result.cycles.push_back(result.final_cycle);

  Heap& heap = interp.heap();
  result.live = heap.live_count();
  heap.for_each_live([&](ObjRef ref) {
    switch (heap.kind(ref)) {
      case Heap::SlotKind::Fast:
        result.arrays_live += 1;
        result.supply_cells += heap.fast(ref).capacity() - heap.fast(ref).size();
        break;
      case Heap::SlotKind::Indexed:
        result.arrays_live += 1;
        result.supply_cells +=
            heap.indexed(ref).capacity() - heap.indexed(ref).size();
        break;
      case Heap::SlotKind::Ring:
        result.arrays_live += 1;
        result.supply_cells += heap.ring(ref).capacity() - heap.ring(ref).count();
        break;
      case Heap::SlotKind::Zeroed: {
        result.arrays_live += 1;
        const ZeroedArray& za = heap.zeroed(ref);
        if (za.length() > 0) {
          result.supply_cells += za.length() - 1 - za.gc_boundary();
        }
        break;
      }
      case Heap::SlotKind::Object:
        break;
    }
  });
  return result;
}

int report_outcome(const RunResult& result, std::ostream& err) {
  if (result.trace.fault) {
    err << "runtime fault: " << *result.trace.fault << "\n";
    return 1;
  }
  if (!result.trace.completed) {
    err << "step budget exhausted; trace is partial\n";
    return 1;
  }
  return 0;
}

int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  Program program = parse_program_file(flags.program);
  ProgramIndex index(program);

  std::ofstream trace_file;
  std::optional<TraceWriter> writer;
  if (!flags.trace_out.empty()) {
    trace_file.open(flags.trace_out);
    if (!trace_file) {
      err << "cannot open trace output: " << flags.trace_out << "\n";
      return 2;
    }
    writer.emplace(trace_file);
  }

  RunResult result = execute(index, flags, writer ? &*writer : nullptr);

  if (!flags.stats_out.empty()) {
    std::ofstream stats(flags.stats_out);
    if (!stats) {
      err << "cannot open stats output: " << flags.stats_out << "\n";
      return 2;
    }
    stats << gc_cycles_csv(result.cycles);
  }

  out << "steps=" << result.trace.steps << " gc_cycles=" << result.cycles.size()
      << " live=" << result.live << " arrays_live=" << result.arrays_live
      << " supply_cells=" << result.supply_cells
      << " null_derefs=" << result.trace.null_dereference_events.size() << "\n";
  return report_outcome(result, err);
}

int cmd_analyze(const std::string& program_path, const std::string& saturate,
                const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  Program program = parse_program_file(program_path);
  ProgramIndex index(program);
  FlowResult base = compute_type_sets(index);

  FlowResult final = base;
  std::string summary;
  if (saturate == "null") {
    final = saturate_null(index);
    summary = saturation_summary_csv(saturation_summary(base, final));
  } else if (saturate == "subtypes") {
    final = saturate_subtypes(index);
    summary = saturation_summary_csv(saturation_summary(base, final));
  } else if (saturate != "none") {
    err << "unknown saturation mode: " << saturate << "\n";
    return 2;
  }

  std::string json = flow_result_to_json(index, final);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      err << "cannot open output: " << out_path << "\n";
      return 2;
    }
    f << json;
  } else {
    out << json;
  }
  if (!summary.empty()) out << summary;
  return 0;
}

int cmd_mine(const std::string& trace_path, int64_t word_size, std::ostream& out,
             std::ostream& err) {
  std::ifstream in(trace_path);
  if (!in) {
    err << "cannot open trace: " << trace_path << "\n";
    return 2;
  }
  try {
    out << mine_trace(in, word_size).to_csv();
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_report(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  Program program = parse_program_file(flags.program);
  ProgramIndex index(program);
  RunResult result = execute(index, flags, nullptr);

  out << "# supply_histogram\n"
      << supply_histogram_csv(result.final_cycle.array_records)
      << "# typeset_histogram\n"
      << typeset_histogram_csv(compute_type_sets(index));
  return report_outcome(result, err);
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flexible-array runtime, type flow analyzer and trace miner"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "interpret a program");
  run->add_option("program", run_flags.program, "program document")->required();
  run->add_option("--gc-budget", run_flags.gc_budget,
                  "live entities before a collection runs");
  run->add_option("--step-budget", run_flags.step_budget, "statement limit");
  run->add_option("--trace-out", run_flags.trace_out, "allocation trace file");
  run->add_option("--stats-out", run_flags.stats_out, "GC stats CSV file");

  std::string analyze_program, saturate = "none", analyze_out;
  CLI::App* analyze = app.add_subcommand("analyze", "type flow analysis");
  analyze->add_option("program", analyze_program, "program document")->required();
  analyze->add_option("--saturate", saturate, "none, null or subtypes");
  analyze->add_option("--out", analyze_out, "flow result JSON file");

  std::string mine_trace_path;
  int64_t word_size = 8;
  CLI::App* mine = app.add_subcommand("mine", "classify an allocation trace");
  mine->add_option("trace", mine_trace_path, "trace file")->required();
  mine->add_option("--word-size", word_size, "pointer width in bytes");

  RunFlags report_flags;
  CLI::App* report = app.add_subcommand("report", "histogram tables");
  report->add_option("program", report_flags.program, "program document")
      ->required();
  report->add_option("--gc-budget", report_flags.gc_budget,
                     "live entities before a collection runs");
  report->add_option("--step-budget", report_flags.step_budget,
                     "statement limit");

  std::vector<const char*> argv;
  argv.push_back("flexgc");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, out, err);
    if (analyze->parsed()) {
      return cmd_analyze(analyze_program, saturate, analyze_out, out, err);
    }
    if (mine->parsed()) return cmd_mine(mine_trace_path, word_size, out, err);
    if (report->parsed()) return cmd_report(report_flags, out, err);
  } catch (const ValidateError& e) {
    err << "invalid program: " << e.what() << "\n";
    return 2;
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace flexgc
