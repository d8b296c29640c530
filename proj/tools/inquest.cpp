// inquest: play, benchmark and synthesize yes/no identification dialogues.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "inquest/inquest.hpp"

namespace {

using namespace inquest;

struct Globals {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string format = "text";
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + path);
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::InvalidConfig, path + " is not valid JSON");
  return j;
}

// Config file values, then task and seed from the command line.
SessionConfig session_config(const Globals& g, const std::string& task, std::optional<std::int64_t> window_start) {
  json j = g.config_path.empty() ? json::object() : read_json_file(g.config_path);
  j.erase("service");
  j["task"] = task_kind_from_string(task);
  j["seed"] = g.seed;
  if (window_start) j["window_start"] = *window_start;
  auto config = j.get<SessionConfig>();
  config.validate();
  return config;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path);
  out << text;
}

std::string transcript(const EpisodeRecord& r) {
  std::string out = "target: " + r.target_id + "\n";
  for (std::size_t i = 0; i < r.turns.turns.size(); ++i) {
    const auto& t = r.turns.turns[i];
    char line[64];
    std::snprintf(line, sizeof line, "%2zu. [%+.4f] ", i + 1, r.step_scores[i]);
    out += line + question_text(t.question) + " -> " + std::string(to_string(t.answer)) + "\n";
    if (t.feedback_text) out += "      " + *t.feedback_text + "\n";
  }
  out += std::string("success: ") + (r.success ? "yes" : "no") + "  turns: " + std::to_string(r.turn_count) +
         "  reward: " + format_number(r.trajectory_reward, 4) + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yes/no target identification: oracle, environments, benchmarks, dialogue synthesis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  std::string task = "guess-who";
  std::string policy = "oracle";
  std::optional<std::int64_t> window_start;
  const auto tasks = CLI::IsMember({"guess-number", "guess-who", "image"});

  auto* simulate = app.add_subcommand("simulate", "Play one episode and print the transcript and reward");
  std::string target;
  simulate->add_option("--task", task)->check(tasks);
  simulate->add_option("--policy", policy)->check(CLI::IsMember({"oracle", "random"}));
  simulate->add_option("--target", target, "Target id (default: drawn from the seed)");
  simulate->add_option("--window-start", window_start, "Guess Number window start");

  auto* benchmark = app.add_subcommand("benchmark", "Batch over targets x seeds and report SR / MT / ranks");
  bool all_targets = false;
  std::vector<std::string> targets;
  std::size_t seeds = 1;
  std::size_t workers = 1;
  std::string episodes_out;
  std::vector<std::size_t> ks{1, 5, 10};
  benchmark->add_option("--task", task)->check(tasks);
  benchmark->add_option("--policy", policy)->check(CLI::IsMember({"oracle", "random"}));
  benchmark->add_flag("--all-targets", all_targets, "Every candidate is a target (default)");
  benchmark->add_option("--targets", targets, "Explicit target ids")->excludes("--all-targets");
  benchmark->add_option("--seeds", seeds, "Number of seeds, from --seed upward")->check(CLI::PositiveNumber);
  benchmark->add_option("--workers", workers)->check(CLI::PositiveNumber);
  benchmark->add_option("--window-start", window_start);
  benchmark->add_option("--episodes-out", episodes_out, "Per-episode JSONL sidecar");
  benchmark->add_option("--ks", ks, "Recall cutoffs for image tasks");

  auto* synth = app.add_subcommand("synth", "Export synthetic oracle dialogues as JSONL training instances");
  std::string synth_task = "guess-who";
  SynthConfig synth_config;
  std::string out_path = "-";
  bool dialogues_only = false;
  bool retain = false;
  std::string board = "resample";
  std::string annotations;
  synth->add_option("--task", synth_task)->check(CLI::IsMember({"guess-number", "guess-who", "attributes"}));
  synth->add_option("--count", synth_config.count)->check(CLI::PositiveNumber);
  synth->add_option("--tau", synth_config.tau);
  synth->add_option("--t-max", synth_config.t_max);
  synth->add_option("--guess-threshold", synth_config.guess_threshold);
  synth->add_option("--board", board)->check(CLI::IsMember({"resample", "fixed"}));
  synth->add_option("--paraphraser", synth_config.paraphraser_endpoint, "Paraphrase endpoint URL");
  synth->add_option("--workers", synth_config.workers)->check(CLI::PositiveNumber);
  synth->add_option("--annotations", annotations, "Binary annotations JSONL (attributes task)");
  synth->add_flag("--dialogues", dialogues_only, "One record per dialogue instead of per turn");
  synth->add_flag("--retain-random-rounds", retain, "Truncate each dialogue to a random prefix");
  synth->add_option("--out", out_path, "Output path, '-' for stdout");

  auto* inspect = app.add_subcommand("inspect-eig", "Print the EIG table after a question/answer history");
  std::string history_path;
  std::size_t top = 20;
  inspect->add_option("--task", task)->check(CLI::IsMember({"guess-number", "guess-who"}));
  inspect->add_option("--history", history_path, "JSON array of {question, answer}");
  inspect->add_option("--window-start", window_start);
  inspect->add_option("--top", top);

  auto* ne = app.add_subcommand("ne-report", "Normalized entropy per attribute");
  std::string dataset = "guess-who";
  ne->add_option("--dataset", dataset, "'guess-who' or a candidates JSONL path");

  auto* serve = app.add_subcommand("serve", "Run the session service");
  std::optional<std::string> host;
  std::optional<int> port;
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  CLI11_PARSE(app, argc, argv);
  const bool as_json = g.format == "json";

  try {
    if (*simulate) {
      const auto config = session_config(g, task, window_start);
      auto world = std::make_shared<const World>(make_world(config));
      if (target.empty()) {
        auto rng = make_rng(derive_seed(g.seed, fnv1a("target")));
        target = pick(world->candidates, rng).id;
      }
      auto p = policy_factory(policy)();
      const auto record = run_episode(config, world, *p, target, g.seed);
      if (as_json) {
        print_json(record);
      } else {
        std::cout << transcript(record);
      }
    } else if (*benchmark) {
      const auto config = session_config(g, task, window_start);
      BenchmarkPlan plan;
      plan.targets = targets;
      plan.seeds.clear();
      for (std::size_t i = 0; i < seeds; ++i) plan.seeds.push_back(g.seed + i);
      plan.workers = workers;
      const auto records = run_benchmark(config, make_world(config), policy_factory(policy), plan);
      if (!episodes_out.empty()) write_text(episodes_out, to_jsonl(records));
      const auto report = compute_report(records, ks);
      if (as_json) {
        print_json(report);
      } else {
        std::cout << report_text(report);
      }
    } else if (*synth) {
      synth_config.seed = g.seed;
      synth_config.board = board == "fixed" ? BoardKind::Fixed : BoardKind::Resample;
      if (!synth_config.paraphraser_endpoint.empty()) synth_config.paraphraser = ParaphraserKind::ExternalClient;
      std::string out;
      if (synth_task == "attributes") {
        const auto images = annotations.empty() ? synthetic_image_dataset(100, 7).images : load_annotations(annotations);
        auto rng = make_rng(g.seed);
        for (const auto& d : synth_attribute_dialogues(images, AttributeDialogueConfig::defaults(), rng)) {
          out += json(d).dump() + "\n";
        }
      } else {
        auto dialogues = synth_task == "guess-number" ? synth_guess_number(synth_config) : synth_guess_who(synth_config);
        if (retain) {
          for (auto& d : dialogues) {
            auto rng = make_rng(derive_seed(g.seed ^ fnv1a("retain"), d.id));
            d = retain_random_rounds(std::move(d), rng);
          }
        }
        if (dialogues_only) {
          for (const auto& d : dialogues) out += json(d).dump() + "\n";
        } else {
          out = instances_jsonl(dialogues);
        }
      }
      write_text(out_path, out);
    } else if (*inspect) {
      const auto config = session_config(g, task, window_start);
      const auto world = make_world(config);
      std::vector<std::string> ids;
      for (const auto& c : world.candidates) ids.push_back(c.id);
      const QuestionParser parser(world.schema, ids);
      std::vector<Candidate> survivors = world.candidates;
      if (!history_path.empty()) {
        for (const auto& turn : read_json_file(history_path)) {
          const auto text = turn.at("question").get<std::string>();
          const auto q = parser.parse(text);
          if (!q) throw Error(ErrorKind::UnparseableQuestion, "cannot parse '" + text + "'");
          survivors = tabular_filter(survivors, *q, answer_from_string(turn.at("answer").get<std::string>()));
        }
      }
      PolicyView view{world.task, survivors, &world.schema, nullptr};
      const auto table = eig_all(survivors, question_pool(view, {}));
      if (as_json) {
        json rows = json::array();
        for (const auto& s : table) rows.push_back({{"question", question_text(s.question)}, {"eig", s.eig}});
        print_json({{"candidate_count", survivors.size()}, {"questions", rows}});
      } else {
        std::cout << "candidates: " << survivors.size() << "\n";
        for (std::size_t i = 0; i < std::min(top, table.size()); ++i) {
          std::cout << format_number(table[i].eig, 4) << "  " << question_text(table[i].question) << "\n";
        }
      }
    } else if (*ne) {
      const auto data = dataset == "guess-who" ? guess_who_dataset() : load_candidates(dataset);
      const auto report = ne_report(data.candidates, data.schema);
      if (as_json) {
        json j = json::object();
        for (const auto& [name, value] : report) j[name] = value;
        print_json(j);
      } else {
        for (const auto& [name, value] : report) std::cout << name << "\t" << format_number(value, 4) << "\n";
      }
    } else if (*serve) {
      auto config = load_service_config(g.config_path);
      if (host) config.host = *host;
      if (port) config.port = *port;
      if (app.get_option("--seed")->count() > 0) config.seed = g.seed;
      Service service(config);
      std::cerr << "listening on " << config.host << ":" << config.port << "\n";
      if (!service.listen()) throw Error(ErrorKind::InvalidConfig, "cannot bind " + config.host);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
