// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cothink/config_json.hpp"
#include "cothink/engine/decode.hpp"
#include "cothink/engine/model_source.hpp"
#include "cothink/engine/remote_source.hpp"
#include "cothink/engine/scripted_source.hpp"
#include "cothink/errors.hpp"
#include "cothink/eval/sweep.hpp"
#include "cothink/eval/task.hpp"
#include "cothink/latency/roofline.hpp"
#include "cothink/model/checkpoint.hpp"
#include "cothink/remote/openai_client.hpp"
#include "cothink/sched/layout.hpp"
#include "cothink/verify/invariants.hpp"

namespace cothink::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Used for latency estimates when the config names no hardware.
const latency::HardwareProfile kDefaultHardware{1e12, 1e14, 16e9, 32e9, 0.0};

struct Flags {
  std::string config;
  std::optional<std::string> mode;
  std::optional<int> n;
  std::optional<int> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> source;
  std::optional<std::string> prompt_file;
  std::string out = "out";
  int jobs = 1;
  std::string filter;
  bool no_timestamp = false;
  bool mask_fault = false;
};

std::string read_file(const fs::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(what + " not found: " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// The parsed config document plus the directory relative paths resolve against.
struct Config {
  json doc = json::object();
  fs::path dir = ".";
  std::string name = "<defaults>";

  const json& section(const char* key) const {
    static const json empty = json::object();
    auto it = doc.find(key);
    return it == doc.end() || it->is_null() ? empty : *it;
  }
  fs::path resolve(const std::string& p) const { return fs::path(p).is_absolute() ? fs::path(p) : dir / p; }
};

Config load_config(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  c.name = path;
  c.dir = fs::path(path).parent_path();
  if (c.dir.empty()) c.dir = ".";
  try {
    c.doc = json::parse(read_file(path, "config file"));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (!c.doc.is_object()) throw ValidationError(path + ": expected a JSON object");
  require_known_keys(c.doc, {"model", "group", "sampler", "task", "hardware", "source", "bench"},
                     "config");
  return c;
}

struct RunSetup {
  sched::GroupConfig group;
  std::string header_template = "Thinker {n}: ";
  std::string answer_header = "Answer: ";
  int answer_budget = 32;
  engine::SamplerConfig sampler;
  std::optional<eval::Task> task;
  latency::HardwareProfile hardware = kDefaultHardware;
  bool default_hardware = true;
  std::string source_kind = "toy";
};

RunSetup parse_setup_impl(const Config& c, const Flags& f) {
  RunSetup s;
  const json& g = c.section("group");
  require_known_keys(g, {"mode", "n_agents", "budget", "header_template", "answer_header", "answer_budget"},
                     "group");
  s.group.mode = sched::parse_mode(json_get<std::string>(g, "mode", "gt-lockstep", "group"));
  s.group.n_agents = json_get(g, "n_agents", 1, "group");
  s.group.budget = json_get(g, "budget", 64, "group");
  s.header_template = json_get(g, "header_template", s.header_template, "group");
  s.answer_header = json_get(g, "answer_header", s.answer_header, "group");
  s.answer_budget = json_get(g, "answer_budget", s.answer_budget, "group");
  if (f.mode) s.group.mode = sched::parse_mode(*f.mode);
  if (f.n) s.group.n_agents = *f.n;
  if (f.budget) s.group.budget = *f.budget;
  if (s.answer_budget < 0) throw ValidationError("group.answer_budget: must be >= 0");

  s.sampler = c.section("sampler").get<engine::SamplerConfig>();
  if (f.seed) s.sampler.seed = *f.seed;
  s.sampler.validate();

  const json& t = c.section("task");
  if (t.is_string()) {
    s.task = eval::load_task(c.resolve(t.get<std::string>()));
  } else if (!t.empty()) {
    s.task = eval::task_from_json(t, c.dir, "task");
  }

  const json& h = c.section("hardware");
  if (h.is_string()) {
    const fs::path p = c.resolve(h.get<std::string>());
    json doc;
    try {
      doc = json::parse(read_file(p, "hardware file"));
    } catch (const json::parse_error& e) {
      throw ValidationError(p.string() + ": " + e.what());
    }
    s.hardware = latency::profile_from_json(doc, "hardware");
    s.default_hardware = false;
  } else if (!h.empty()) {
    s.hardware = latency::profile_from_json(h, "hardware");
    s.default_hardware = false;
  }

  s.source_kind = json_get<std::string>(c.section("source"), "kind", "toy", "source");
  if (f.source) s.source_kind = *f.source;
  if (s.source_kind != "toy" && s.source_kind != "scripted" && s.source_kind != "remote") {
    throw ValidationError("source.kind: unknown source '" + s.source_kind +
                          "' (expected toy, scripted or remote)");
  }
  return s;
}

RunSetup parse_setup(const Config& c, const Flags& f) {
  try {
    return parse_setup_impl(c, f);
  } catch (const ValidationError& e) {
    throw ValidationError(c.name + ": " + e.what());
  }
}

// Token sources and whatever they borrow, kept alive for the whole command.
class Sources {
 public:
  Sources(const Config& c, const RunSetup& s) : setup_(s) {
    const json& src = c.section("source");
    require_known_keys(src, {"kind", "script", "policy", "remote", "chunk", "template", "judge"}, "source");
    if (s.source_kind == "toy") {
      model::ModelConfig mc = c.section("model").get<model::ModelConfig>();
      const json& m = c.section("model");
      if (m.contains("checkpoint")) {
        const fs::path p = c.resolve(json_get<std::string>(m, "checkpoint", "", "model"));
        if (!fs::exists(p)) throw ValidationError("model checkpoint not found: " + p.string());
        model_ = std::make_unique<model::Model>(model::load_checkpoint(p));
      } else {
        mc.validate();
        model_ = std::make_unique<model::Model>(model::Model::init(mc));
      }
    } else if (s.source_kind == "scripted") {
      if (src.contains("script")) {
        script_ = src["script"];
      } else {
        policy_ = eval::parse_policy(json_get<std::string>(src, "policy", "partition", "source"));
        if (!s.task) throw ValidationError("source: a scripted policy needs a task section");
      }
    } else {
      remote::ClientConfig cc =
          remote::client_config_from_json(src.value("remote", json::object()), "source.remote");
      cc = remote::apply_environment(cc);
      cc.validate();
      client_ = std::make_unique<remote::OpenAIClient>(cc);
      remote_.chunk = json_get(src, "chunk", remote_.chunk, "source");
      const fs::path tpl = src.contains("template")
                               ? c.resolve(json_get<std::string>(src, "template", "", "source"))
                               : fs::path(COTHINK_PROMPT_DIR) / "collaborative.txt";
      remote_.instruction_template = read_file(tpl, "prompt template");
      remote_.validate();
      if (json_get(src, "judge", false, "source")) judge_ = std::make_unique<eval::RemoteJudge>(*client_);
    }
  }

  std::unique_ptr<engine::TokenSource> make(const sched::GroupConfig& cfg, std::uint64_t seed) const {
    if (model_) return std::make_unique<engine::ModelSource>(*model_);
    if (client_) return std::make_unique<engine::RemoteSource>(*client_, remote_);
    if (script_) {
      try {
        return std::make_unique<engine::ScriptedSource>(engine::ScriptedSource::from_json(*script_));
      } catch (const json::exception& e) {
        throw ValidationError(std::string("source.script: ") + e.what());
      }
    }
    return std::make_unique<engine::ScriptedSource>(
        eval::scripted_policy(*policy_, *setup_.task, cfg.n_agents, cfg.budget, seed));
  }

  eval::Judge* judge() const { return judge_.get(); }

 private:
  const RunSetup& setup_;
  std::unique_ptr<model::Model> model_;
  std::unique_ptr<remote::OpenAIClient> client_;
  engine::RemoteSourceConfig remote_;
  std::unique_ptr<eval::RemoteJudge> judge_;
  std::optional<json> script_;
  std::optional<eval::Policy> policy_;
};

std::unique_ptr<Sources> make_sources(const Config& c, const RunSetup& s) {
  try {
    return std::make_unique<Sources>(c, s);
  } catch (const ValidationError& e) {
    throw ValidationError(c.name + ": " + e.what());
  }
}

std::optional<std::string> timestamp(const Flags& f) {
  if (f.no_timestamp) return std::nullopt;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

fs::path prepare_out(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ValidationError("output directory not writable: " + out);
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  o << text;
  if (!o) throw RuntimeFailure("cannot write " + path.string());
}

int cmd_run(const Flags& f, std::ostream& out) {
  const Config c = load_config(f.config);
  RunSetup s = parse_setup(c, f);
  std::string prompt_text = s.task ? s.task->prompt : "List as many distinct ideas as you can.";
  if (f.prompt_file) prompt_text = read_file(*f.prompt_file, "prompt file");
  if (prompt_text.empty()) throw ValidationError("task.prompt: empty prompt");

  const engine::SessionPrompt prompt = engine::make_session_prompt(
      prompt_text, s.header_template, s.group.n_agents, s.answer_header);
  s.group.prompt_len = prompt.prompt_len();
  s.group.agent_prompt_len = prompt.header_len();
  s.group.validate();
  const fs::path dir = prepare_out(f.out);

  const auto sources = make_sources(c, s);
  auto source = sources->make(s.group, s.sampler.seed);
  engine::Sampler sampler(s.sampler);
  engine::Transcript t = engine::run_think_phase(s.group, *source, prompt, sampler);
  engine::run_answer_phase(t, *source, sampler, s.answer_budget);
  t.created = timestamp(f);
  const fs::path path = dir / "transcript.jsonl";
  write_file(path, engine::transcript_to_jsonl(t));

  const auto lengths = t.lengths();
  out << "mode " << sched::mode_short_name(s.group.mode) << "  N=" << s.group.n_agents
      << "  K=" << s.group.budget << "  source " << t.source << '\n';
  for (std::size_t a = 0; a < lengths.size(); ++a) {
    out << "thinker " << a + 1 << ": " << lengths[a] << " tokens\n";
  }
  const int lat = t.latency();
  char secs[64];
  std::snprintf(secs, sizeof secs, "%.6g", latency::total_latency(s.group, s.hardware, lat));
  out << "per-thinker latency: " << lat << " tokens, estimated " << secs << " s"
      << (s.default_hardware ? " (default hardware profile)" : "") << '\n';
  out << "thought events: " << t.events.size() << "\n";
  out << "transcript: " << path.string() << '\n';
  return kOk;
}

int cmd_bench(const Flags& f, std::ostream& out) {
  const Config c = load_config(f.config);
  RunSetup s = parse_setup(c, f);
  if (!s.task) throw ValidationError("bench: config has no task section");

  const json& b = c.section("bench");
  require_known_keys(b, {"modes", "n_agents", "runs", "summary_steps"}, "bench");
  eval::SweepSpec spec;
  spec.task = *s.task;
  for (const auto& m : json_get(b, "modes", std::vector<std::string>{"gt-lockstep"}, "bench")) {
    spec.modes.push_back(sched::parse_mode(m));
  }
  spec.n_agents = json_get(b, "n_agents", std::vector<int>{s.group.n_agents}, "bench");
  if (f.mode) spec.modes = {s.group.mode};
  if (f.n) spec.n_agents = {s.group.n_agents};
  spec.budget = s.group.budget;
  spec.runs = json_get(b, "runs", 1, "bench");
  spec.sampler = s.sampler;
  spec.header_template = s.header_template;
  spec.answer_header = s.answer_header;
  spec.hardware = s.hardware;
  spec.jobs = f.jobs;
  if (f.jobs < 1) throw ValidationError("--jobs: must be >= 1");

  std::vector<int> steps = json_get(b, "summary_steps", std::vector<int>{}, "bench");
  if (steps.empty()) {
    for (int k : {spec.budget / 4, spec.budget / 2, spec.budget}) {
      if (k > 0 && (steps.empty() || steps.back() != k)) steps.push_back(k);
    }
  }
  for (int k : steps) {
    if (k < 0 || k > spec.budget) throw ValidationError("bench.summary_steps: step out of [0, budget]");
  }
  const fs::path dir = prepare_out(f.out);

  const auto sources = make_sources(c, s);
  spec.judge = sources->judge();
  const std::uint64_t seed = s.sampler.seed;
  spec.make_source = [&sources, seed](const sched::GroupConfig& cfg, int run) {
    return sources->make(cfg, seed + static_cast<std::uint64_t>(run));
  };
  const auto curves = eval::sweep(spec);
  const fs::path csv = dir / "curves.csv";
  write_file(csv, eval::curves_to_csv(curves, timestamp(f)));
  const std::string table = eval::summary_table(curves, steps);
  write_file(dir / "summary.txt", table);
  out << table << "curves: " << csv.string() << '\n';
  return kOk;
}

// Flips one visibility bit of every interleaved mask with two or more
// agents. Exercises the failure path of the oracle check.
sched::AttentionMask faulty_mask(const sched::GroupConfig& c, int steps, std::span<const int> len) {
  sched::AttentionMask m = sched::build_mask(c, steps, len);
  if (c.mode == sched::Mode::kGroupInterleaved && c.n_agents >= 2 && m.size() >= 2) {
    const std::size_t r = m.size() - 1;
    m.bits.set(r, 0, !m.bits.get(r, 0));
  }
  return m;
}

int cmd_verify(const Flags& f, std::ostream& out) {
  const Config c = load_config(f.config);
  verify::SuiteOptions opts;
  opts.filter = f.filter;
  opts.model = c.section("model").get<model::ModelConfig>();
  opts.model.validate();
  if (f.seed) opts.seed = *f.seed;
  if (f.mask_fault) opts.mask_builder = faulty_mask;
  const auto results = verify::run_suite(opts);
  if (results.empty()) throw ValidationError("--filter '" + f.filter + "' matches no check");
  int failed = 0;
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-32s %10lld cases %8.3f s", r.outcome.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.outcome.cases, r.seconds);
    out << line;
    if (!r.outcome.passed) {
      out << "  " << r.outcome.detail;
      ++failed;
    }
    out << '\n';
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kOk : kInvariant;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concurrent-reasoning decode engine: run, bench, verify"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* sub) {
    sub->add_option("-c,--config", f.config, "JSON config file");
    sub->add_option("--seed", f.seed, "Sampler seed");
  };
  auto generation = [&f](CLI::App* sub) {
    sub->add_option("--mode", f.mode, "cot | is | gt-lockstep | gt-interleaved");
    sub->add_option("--n", f.n, "Number of thinkers");
    sub->add_option("--budget", f.budget, "Thought tokens per thinker");
    sub->add_option("--source", f.source, "toy | scripted | remote");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_flag("--no-timestamp", f.no_timestamp, "Omit the creation time from outputs");
  };

  CLI::App* run = app.add_subcommand("run", "Generate one transcript");
  common(run);
  generation(run);
  run->add_option("--prompt", f.prompt_file, "File holding the question text");

  CLI::App* bench = app.add_subcommand("bench", "Sweep modes and group sizes, write coverage curves");
  common(bench);
  generation(bench);
  bench->add_option("--jobs", f.jobs, "Cells evaluated in parallel");

  CLI::App* ver = app.add_subcommand("verify", "Run the invariant suite");
  common(ver);
  ver->add_option("--filter", f.filter, "Run checks whose name contains this string");
  ver->add_flag("--inject-mask-fault", f.mask_fault)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (run->parsed()) return cmd_run(f, out);
    if (bench->parsed()) return cmd_bench(f, out);
    return cmd_verify(f, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const RuntimeFailure& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace cothink::cli
