// mad: simulate / debate / analyze / report command-line front end.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mad/backend.hpp"
#include "mad/dataset.hpp"
#include "mad/debate.hpp"
#include "mad/errors.hpp"
#include "mad/metrics.hpp"
#include "mad/report.hpp"
#include "mad/sim.hpp"
#include "mad/transcript_io.hpp"

namespace {

using nlohmann::ordered_json;

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

mad::Topology make_topology(const std::string& preset, int agents) {
  if (preset == "single-peer") return mad::Topology::single_peer(agents);
  if (preset == "full") return mad::Topology::fully_connected(agents);
  throw mad::ConfigError("unknown topology preset: " + preset + " (use single-peer or full)");
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw mad::DataError("cannot open output file: " + out_path);
  out << text;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
  int agents = 2;
  std::string topology = "single-peer";
  int rounds = 1;
  int k = 2;
  std::string alpha;  // comma list; empty = uniform (1,...,1)
  double w_self = 1.0;
  double w_peer = 1.0;
  bool anonymized = false;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateFlags& flags) {
  if (flags.anonymized && flags.w_self != flags.w_peer)
    throw mad::UsageError(
        "--anonymized forces symmetric identity weights (anonymization makes self and peer "
        "indistinguishable, so w-self must equal w-peer); drop one of the unequal weight flags");

  std::vector<double> alpha = flags.alpha.empty()
                                  ? std::vector<double>(static_cast<std::size_t>(flags.k), 1.0)
                                  : parse_double_list(flags.alpha);
  const int k = static_cast<int>(alpha.size());
  mad::AnswerSpace space = mad::AnswerSpace::letters(k);

  mad::IdentityWeightProfile weights;
  weights.self_weight = flags.w_self;
  weights.peer_weights[0] = flags.w_peer;  // template peer weight, broadcast per topology

  mad::SimConfig config{space,
                        make_topology(flags.topology, flags.agents),
                        flags.rounds,
                        {mad::BeliefState(alpha)},
                        {weights},
                        flags.anonymized,
                        flags.trials,
                        flags.seed};
  config.validate();

  ordered_json snapshot;
  snapshot["command"] = "simulate";
  snapshot["agents"] = flags.agents;
  snapshot["topology"] = flags.topology;
  snapshot["rounds"] = flags.rounds;
  snapshot["alpha"] = alpha;
  snapshot["w_self"] = flags.w_self;
  snapshot["w_peer"] = flags.w_peer;
  snapshot["anonymized"] = flags.anonymized;
  snapshot["trials"] = flags.trials;
  snapshot["seed"] = flags.seed;
  const std::string digest = mad::config_digest(snapshot);

  mad::SimTranscript transcript = mad::run_simulation(config);

  const std::string mode = flags.anonymized ? "anonymized" : "standard";
  std::vector<mad::TranscriptRecord> records;
  records.reserve(static_cast<std::size_t>(flags.trials));
  for (int trial = 0; trial < flags.trials; ++trial) {
    mad::TranscriptRecord r;
    r.question_id = "sim";
    r.run_id = "trial-" + std::to_string(trial);
    r.config_digest = digest;
    r.timestamp_ms = 0;  // deterministic output: identical commands give identical bytes
    const auto& grid = transcript.answers[static_cast<std::size_t>(trial)];
    for (const auto& round : grid) {
      std::vector<mad::TurnRecord> turns;
      for (int a : round) turns.push_back({space.label(a), "sampled", "", mode});
      r.rounds.push_back(std::move(turns));
    }
    std::vector<int> final_round = grid.back();
    r.final_answer = space.label(mad::majority_vote(final_round));
    records.push_back(std::move(r));
  }

  mad::RunMeta meta;
  meta.config_digest = digest;
  meta.n_agents = flags.agents;
  meta.rounds = flags.rounds;
  meta.topology_preset = flags.topology;
  meta.prompt_mode = mode;
  meta.seed = flags.seed;
  meta.extra = snapshot;
  mad::write_transcripts(meta, records, flags.out);

  std::cout << "simulate: " << flags.trials << " trials, " << flags.rounds << " rounds, seed "
            << flags.seed << " -> " << flags.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// debate

struct DebateFlags {
  std::string dataset;
  std::string format = "mcq-json";
  std::string backend = "mock";
  std::string endpoint;
  std::string model;
  std::string token_env;
  int agents = 2;
  std::string topology = "single-peer";
  int rounds = 1;
  bool anonymize = false;
  std::string personas = "homogeneous";
  std::string persona = "Assistant";
  std::uint64_t seed = 0;
  int concurrency = 4;
  std::string out;
  std::string raw_dir;
  std::string mock_alpha = "1,1,1,1";
  double mock_w_self = 1.0;
  double mock_w_peer = 1.0;
};

int cmd_debate(const DebateFlags& flags) {
  std::vector<mad::QuestionRecord> questions =
      mad::load_dataset(flags.dataset, mad::dataset_format_from_string(flags.format));

  mad::BackendConfig backend_config;
  if (flags.backend == "http") {
    backend_config.kind = mad::BackendConfig::Kind::http_openai_compatible;
    backend_config.endpoint = flags.endpoint;
    backend_config.model = flags.model;
    backend_config.auth_env = flags.token_env;
  } else if (flags.backend == "mock") {
    backend_config.kind = mad::BackendConfig::Kind::mock_dcm;
    backend_config.mock_alpha = parse_double_list(flags.mock_alpha);
    backend_config.mock_w_self = flags.mock_w_self;
    backend_config.mock_w_peer = flags.mock_w_peer;
    backend_config.mock_seed = flags.seed;
  } else {
    throw mad::UsageError("unknown backend kind: " + flags.backend + " (use mock or http)");
  }
  backend_config.validate();

  mad::DebateRunConfig run;
  run.n_agents = flags.agents;
  run.topology = make_topology(flags.topology, flags.agents);
  run.rounds = flags.rounds;
  run.mode.variant = flags.anonymize ? mad::PromptVariant::anonymized : mad::PromptVariant::standard;
  run.persona_assignment = flags.personas == "heterogeneous" ? mad::PersonaAssignment::heterogeneous
                                                             : mad::PersonaAssignment::homogeneous;
  run.persona_set = run.persona_assignment == mad::PersonaAssignment::heterogeneous
                        ? mad::default_persona_ids()
                        : std::vector<std::string>{flags.persona};
  run.seed = flags.seed;
  run.concurrency = flags.concurrency;
  run.validate();

  ordered_json snapshot;
  snapshot["command"] = "debate";
  snapshot["dataset"] = flags.dataset;
  snapshot["format"] = flags.format;
  snapshot["backend"] = flags.backend;
  snapshot["model"] = flags.model;
  snapshot["agents"] = flags.agents;
  snapshot["topology"] = flags.topology;
  snapshot["rounds"] = flags.rounds;
  snapshot["mode"] = mad::to_string(run.mode.variant);
  snapshot["personas"] = flags.personas;
  snapshot["persona"] = flags.persona;
  snapshot["seed"] = flags.seed;
  if (flags.backend == "mock") {
    snapshot["mock_alpha"] = backend_config.mock_alpha;
    snapshot["mock_w_self"] = flags.mock_w_self;
    snapshot["mock_w_peer"] = flags.mock_w_peer;
  }
  const std::string digest = mad::config_digest(snapshot);

  // Resume: skip question ids already present in the output file.
  std::set<std::string> done;
  bool resuming = false;
  if (std::filesystem::exists(flags.out)) {
    mad::TranscriptFile existing = mad::read_transcripts(flags.out);
    if (existing.meta && existing.meta->config_digest != digest)
      throw mad::UsageError("output file " + flags.out +
                            " was produced by a different configuration; refusing to append");
    for (const auto& r : existing.records) done.insert(r.question_id);
    resuming = existing.meta.has_value();
  }

  std::string raw_dir = flags.raw_dir.empty() ? flags.out + ".raw" : flags.raw_dir;
  mad::ContentStore store(raw_dir);
  std::unique_ptr<mad::ChatBackend> backend = mad::make_backend(backend_config);

  if (!resuming) {
    mad::RunMeta meta;
    meta.config_digest = digest;
    meta.n_agents = flags.agents;
    meta.rounds = flags.rounds;
    meta.topology_preset = flags.topology;
    meta.prompt_mode = mad::to_string(run.mode.variant);
    meta.seed = flags.seed;
    meta.extra = snapshot;
    mad::write_transcripts(meta, {}, flags.out);
  }

  const std::string mode = mad::to_string(run.mode.variant);
  int ran = 0, partial = 0;
  for (const auto& q : questions) {
    if (done.count(q.id) > 0) continue;
    mad::QuestionDebate debate = mad::run_debate_question(run, q, *backend);

    mad::TranscriptRecord r;
    r.question_id = q.id;
    r.run_id = "run-0";
    r.config_digest = digest;
    r.gold = q.gold;
    r.final_answer = debate.final_answer.value_or("");
    r.timestamp_ms = now_ms();
    for (const auto& round : debate.rounds) {
      std::vector<mad::TurnRecord> turns;
      for (const auto& turn : round) {
        mad::TurnRecord t;
        t.answer = turn.answer_label.value_or("");
        t.parse_status = turn.parse_status;
        t.raw_ref = turn.raw_text.empty() ? "" : store.put(turn.raw_text);
        t.prompt_mode = mode;
        turns.push_back(std::move(t));
      }
      r.rounds.push_back(std::move(turns));
    }
    mad::append_transcripts({r}, flags.out);
    ++ran;
    if (debate.partial) ++partial;
  }

  std::cout << "debate: " << ran << " questions run (" << done.size() << " already present, "
            << partial << " partial) -> " << flags.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeFlags {
  std::string transcripts;
  std::string paired;  // anonymized-run transcripts for IBC
  int round = -1;      // default: final round
  bool multi_peer = false;
  int stratum_nd = -1;
  int stratum_na = -1;
  bool per_round = false;
  std::string format = "markdown";
  std::string out;
};

mad::BiasReport analyze_file(const mad::TranscriptFile& file, const AnalyzeFlags& flags,
                             int round) {
  if (!file.meta) throw mad::DataError("transcript file has no run meta line; cannot recover topology");
  mad::Topology topology = file.meta->topology();
  mad::AnswerGrid grid = mad::answer_grid(file.records);
  mad::StratumFilter stratum;
  if (flags.stratum_nd >= 0) stratum.n_d = flags.stratum_nd;
  if (flags.stratum_na >= 0) stratum.n_a = flags.stratum_na;

  mad::BiasReport report = flags.multi_peer
                               ? mad::multi_peer_estimators(grid, round, topology, stratum)
                               : mad::estimate_conformity_obstinacy(grid, round, topology);
  if (flags.per_round) {
    for (int t = 1; t <= file.meta->rounds; ++t)
      report.per_round[t] = flags.multi_peer
                                ? mad::multi_peer_estimators(grid, t, topology, stratum)
                                : mad::estimate_conformity_obstinacy(grid, t, topology);
  }
  return report;
}

int cmd_analyze(const AnalyzeFlags& flags) {
  mad::TranscriptFile vanilla = mad::read_transcripts(flags.transcripts);
  if (!vanilla.meta) throw mad::DataError("transcript file has no run meta line");
  int round = flags.round > 0 ? flags.round : vanilla.meta->rounds;

  mad::AnalysisTable table;
  table.rows.push_back({"vanilla", analyze_file(vanilla, flags, round)});

  if (!flags.paired.empty()) {
    mad::TranscriptFile anon = mad::read_transcripts(flags.paired);
    if (!anon.meta) throw mad::DataError("paired transcript file has no run meta line");
    if (anon.meta->n_agents != vanilla.meta->n_agents ||
        anon.meta->topology_preset != vanilla.meta->topology_preset)
      throw mad::UsageError("paired runs must share topology to compute IBC");
    std::set<std::string> ids_a, ids_b;
    for (const auto& r : vanilla.records) ids_a.insert(r.question_id);
    for (const auto& r : anon.records) ids_b.insert(r.question_id);
    if (ids_a != ids_b) throw mad::UsageError("paired runs must cover the same question set");

    table.rows.push_back({"anonymized", analyze_file(anon, flags, round)});
    table.ibc = mad::identity_bias_coefficient(table.rows[0].report.delta,
                                               table.rows[1].report.delta);
    if (flags.per_round) {
      for (int t = 1; t <= vanilla.meta->rounds; ++t)
        table.per_round_ibc[t] = mad::identity_bias_coefficient(
            table.rows[0].report.per_round[t].delta, table.rows[1].report.per_round[t].delta);
    }
  }

  write_output(flags.out, mad::render_table(table, mad::table_format_from_string(flags.format)));
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportFlags {
  std::vector<std::string> transcripts;
  std::string format = "markdown";
  std::string out;
};

int cmd_report(const ReportFlags& flags) {
  std::map<std::string, mad::AccuracySummary> by_run;
  for (const auto& path : flags.transcripts) {
    mad::TranscriptFile file = mad::read_transcripts(path);
    by_run[path] = mad::majority_accuracy(file.records);
  }
  write_output(flags.out, mad::render_accuracy(by_run, mad::table_format_from_string(flags.format)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent debate simulator, orchestrator and bias metrics"};
  app.require_subcommand(1);

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the belief-update debate simulator");
  simulate->add_option("--agents", sim.agents, "Number of agents");
  simulate->add_option("--topology", sim.topology, "single-peer | full");
  simulate->add_option("--rounds", sim.rounds, "Debate rounds T");
  simulate->add_option("--k", sim.k, "Answer options (uniform init)");
  simulate->add_option("--alpha", sim.alpha, "Initial belief, comma-separated (overrides --k)");
  simulate->add_option("--w-self", sim.w_self, "Self identity weight");
  simulate->add_option("--w-peer", sim.w_peer, "Peer identity weight");
  simulate->add_flag("--anonymized", sim.anonymized, "Symmetric identity weights");
  simulate->add_option("--trials", sim.trials, "Independent trials");
  simulate->add_option("--seed", sim.seed, "Root seed");
  simulate->add_option("--out", sim.out, "Output transcript JSONL")->required();

  DebateFlags deb;
  CLI::App* debate = app.add_subcommand("debate", "Run an LLM (or mock) debate over a dataset");
  debate->add_option("--dataset", deb.dataset, "Dataset file")->required();
  debate->add_option("--format", deb.format, "mcq-json | gsm8k-lines");
  debate->add_option("--backend", deb.backend, "mock | http");
  debate->add_option("--endpoint", deb.endpoint, "Chat-completions endpoint (http backend)");
  debate->add_option("--model", deb.model, "Model name (http backend)");
  debate->add_option("--token-env", deb.token_env, "Env var holding the bearer token");
  debate->add_option("--agents", deb.agents, "Number of agents");
  debate->add_option("--topology", deb.topology, "single-peer | full");
  debate->add_option("--rounds", deb.rounds, "Debate rounds T");
  debate->add_flag("--anonymize", deb.anonymize, "Anonymized debate prompts");
  debate->add_option("--personas", deb.personas, "homogeneous | heterogeneous");
  debate->add_option("--persona", deb.persona, "Persona id for homogeneous mode");
  debate->add_option("--seed", deb.seed, "Root seed");
  debate->add_option("--concurrency", deb.concurrency, "Concurrent requests per round");
  debate->add_option("--out", deb.out, "Output transcript JSONL")->required();
  debate->add_option("--raw-dir", deb.raw_dir, "Raw completion content store (default: <out>.raw)");
  debate->add_option("--mock-alpha", deb.mock_alpha, "Mock backend belief template");
  debate->add_option("--mock-w-self", deb.mock_w_self, "Mock backend self weight");
  debate->add_option("--mock-w-peer", deb.mock_w_peer, "Mock backend peer weight");

  AnalyzeFlags ana;
  CLI::App* analyze = app.add_subcommand("analyze", "Conformity/Obstinacy/Delta (and IBC) tables");
  analyze->add_option("--transcripts", ana.transcripts, "Transcript JSONL (vanilla run)")->required();
  analyze->add_option("--paired", ana.paired, "Anonymized-run transcripts for IBC");
  analyze->add_option("--round", ana.round, "Round t to evaluate (default: final)");
  analyze->add_flag("--multi-peer", ana.multi_peer, "Multi-peer estimators");
  analyze->add_option("--nd", ana.stratum_nd, "Condition on n_D disagreeing peers");
  analyze->add_option("--na", ana.stratum_na, "Condition on n_A agreeing peers");
  analyze->add_flag("--per-round", ana.per_round, "Emit per-round metrics");
  analyze->add_option("--format", ana.format, "csv | markdown");
  analyze->add_option("--out", ana.out, "Output file (default: stdout)");

  ReportFlags rep;
  CLI::App* report = app.add_subcommand("report", "Majority-vote accuracy against gold labels");
  report->add_option("--transcripts", rep.transcripts, "Transcript JSONL files")->required();
  report->add_option("--format", rep.format, "csv | markdown");
  report->add_option("--out", rep.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(sim);
    if (debate->parsed()) return cmd_debate(deb);
    if (analyze->parsed()) return cmd_analyze(ana);
    if (report->parsed()) return cmd_report(rep);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const mad::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const mad::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
