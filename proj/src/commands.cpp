#include "ssm/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <unistd.h>

#include "ssm/conllu.hpp"
#include "ssm/dataset.hpp"
#include "ssm/em.hpp"
#include "ssm/llm_client.hpp"
#include "ssm/model.hpp"
#include "ssm/nle.hpp"
#include "ssm/prompt.hpp"
#include "ssm/report.hpp"
#include "ssm/subphrase.hpp"

namespace ssm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

OutputLock::OutputLock(const fs::path& dir) : path_(dir / ".ssm.lock") {
  fs::create_directories(dir);
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (!f) {
    throw Error("output directory " + dir.string() + " is locked by another run (remove " + path_.string() +
                " if no run is active)");
  }
  std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
  std::fclose(f);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

fs::path dataset_path(const RunConfig& c) {
  return c.paths.dataset.empty() ? c.paths.out / "dataset.jsonl" : c.paths.dataset;
}

fs::path checkpoint_path(const RunConfig& c) {
  return c.paths.checkpoint.empty() ? c.paths.out / "model.json" : c.paths.checkpoint;
}

namespace {

void require_file(const fs::path& path, const std::string& key) {
  if (path.empty()) throw Error("no path configured for " + key);
  if (!fs::is_regular_file(path)) throw Error(key + " not found: " + path.string());
}

void require_dir(const fs::path& path, const std::string& key) {
  if (!fs::is_directory(path)) throw Error(key + " not found: " + path.string());
}

corpus::Lexicons lexicons(const RunConfig& c) {
  if (c.paths.lexicons.empty()) return corpus::Lexicons::bundled();
  require_dir(c.paths.lexicons, "paths.lexicons");
  return corpus::Lexicons::load(c.paths.lexicons);
}

nle::TemplateSet templates(const RunConfig& c) {
  if (c.paths.templates.empty()) return nle::TemplateSet::defaults();
  require_file(c.paths.templates, "paths.templates");
  return nle::TemplateSet::load(c.paths.templates);
}

std::vector<EmbeddedExample> load_examples(const RunConfig& c) {
  const auto path = dataset_path(c);
  require_file(path, "dataset");
  auto examples = load_dataset(path);
  if (examples.empty()) throw Error("dataset " + path.string() + " has no examples");
  return examples;
}

void log_filter_stats(const corpus::FilterStats& stats) {
  std::ostringstream msg;
  msg << "retained " << stats.retained << " of " << stats.total << " pairs (" << stats.inadmissible
      << " inadmissible, " << stats.oov_dropped << " without known subject/verb words)";
  log_info(msg.str());
}

}  // namespace

void build_dataset(const RunConfig& c) {
  require_file(c.paths.parses, "paths.parses");
  require_file(c.paths.pairs, "paths.pairs");
  require_file(c.paths.embeddings, "paths.embeddings");
  const auto lex = lexicons(c);
  const auto parses = corpus::parse_conllu(read_file(c.paths.parses), c.paths.parses.string());
  const auto pairs = corpus::load_pairs(c.paths.pairs);
  const auto table = corpus::load_embedding_table(c.paths.embeddings);
  log_info("loaded " + std::to_string(parses.size()) + " parses, " + std::to_string(pairs.size()) + " pairs, " +
           std::to_string(table.size()) + " word vectors");
  const auto data = corpus::build_dataset(pairs, parses, table, lex, c.em.threads);
  log_filter_stats(data.stats);
  fs::create_directories(c.paths.out);
  write_file_atomic(dataset_path(c), serialize_dataset(data.examples));
  write_file_atomic(c.paths.out / "filter_stats.json", data.stats.to_json());
}

void train(const RunConfig& c) {
  em::validate(c.em);
  const auto structure = StructureSpec::resolve(c.structure);
  const auto examples = load_examples(c);
  const auto dim = static_cast<std::size_t>(examples.front().premise.at(Slot::subject).vector.size());

  const auto ckpt_dir = c.paths.out / "checkpoints";
  fs::create_directories(ckpt_dir);
  for (const auto& entry : fs::directory_iterator(ckpt_dir)) {
    if (entry.path().filename().string().starts_with("iter_")) fs::remove(entry.path());
  }

  auto model = SurrogateModel::initialise(structure, dim, c.em.train, c.seed);
  log_info("training " + structure.name + " structure (" + std::to_string(structure.pairs.size()) + " pairs) on " +
           std::to_string(examples.size()) + " examples");
  const auto trace = em::train(examples, model, c.em, [&](const SurrogateModel& m, const em::IterationTrace& it) {
    char name[32];
    std::snprintf(name, sizeof name, "iter_%02zu.json", it.iteration);
    save_model(m, ckpt_dir / name);
  });
  save_model(model, checkpoint_path(c));
  write_file_atomic(c.paths.out / "em_trace.csv", trace.to_csv());
}

void predict(const RunConfig& c) {
  const auto ckpt = checkpoint_path(c);
  require_file(ckpt, "checkpoint");
  const auto model = load_model(ckpt);
  const auto tpl = templates(c);
  const auto examples = load_examples(c);

  std::vector<std::string> lines(examples.size());
  parallel_for(examples.size(), c.em.threads, [&](std::size_t i) {
    const auto& ex = examples[i];
    const auto dist = model.predict(ex);
    const auto expl = nle::explain(ex, model, tpl);
    json j;
    j["id"] = ex.id;
    j["label"] = std::string(to_string(expl.label));
    j["nle"] = expl.nle;
    j["probabilities"] = {{"contradiction", dist[RelationState::contradiction]},
                          {"entailment", dist[RelationState::entailment]},
                          {"neutral", dist[RelationState::neutral]}};
    json pairs = json::array();
    for (const auto& rp : expl.responsible_pairs) {
      pairs.push_back({{"pair", to_string(rp.pair)}, {"state", std::string(to_string(rp.state))}});
    }
    j["responsible_pairs"] = pairs;
    lines[i] = j.dump() + "\n";
  });
  std::string out;
  for (const auto& l : lines) out += l;
  fs::create_directories(c.paths.out);
  write_file_atomic(c.paths.out / "ssm_predictions.jsonl", out);
  log_info("wrote " + std::to_string(examples.size()) + " predictions");
}

void query_llm(const RunConfig& c) {
  require_file(c.paths.pairs, "paths.pairs");
  const auto examples = load_examples(c);
  const auto pairs = corpus::load_pairs(c.paths.pairs);
  std::map<std::string, const corpus::PairRecord*> by_id;
  for (const auto& p : pairs) by_id.emplace(p.id, &p);

  std::set<std::string> query_ids;
  for (const auto& ex : examples) query_ids.insert(ex.id);
  const auto shot_file = c.paths.shots.empty() ? c.paths.pairs : c.paths.shots;
  if (!c.paths.shots.empty()) require_file(shot_file, "paths.shots");
  const auto shot_records = c.paths.shots.empty() ? pairs : corpus::load_pairs(shot_file);
  std::vector<llm::Shot> pool;
  for (const auto& p : shot_records) {
    if (query_ids.count(p.id) || !p.gold_nle || p.gold_nle->empty()) continue;
    pool.push_back({p.premise, p.hypothesis, p.label, *p.gold_nle});
  }

  // one shot set for the whole run
  const auto shots = llm::sample_shots(pool, c.shots_per_class, derive_seed(c.seed, 0x5407));
  std::vector<std::string> prompts;
  for (const auto& ex : examples) {
    const auto it = by_id.find(ex.id);
    if (it == by_id.end()) throw Error("dataset id '" + ex.id + "' is not in " + c.paths.pairs.string());
    llm::PromptSpec spec;
    spec.shots = shots;
    spec.query = {it->second->premise, it->second->hypothesis};
    prompts.push_back(llm::build_prompt(spec));
  }

  std::unique_ptr<llm::Transport> transport;
  if (!c.paths.replay.empty()) {
    require_file(c.paths.replay, "paths.replay");
    transport = std::make_unique<llm::ReplayTransport>(c.paths.replay);
  } else {
    transport = std::make_unique<llm::HttpTransport>();
  }
  fs::create_directories(c.paths.out);
  llm::ResponseCache cache(c.paths.cache);
  llm::RequestLog request_log(c.paths.out / "llm_requests.jsonl");
  llm::QueryOptions options;
  options.cache_only = c.cache_only;
  options.log = &request_log;
  const auto records = llm::query_all(c.endpoint, prompts, cache, *transport, options);

  std::vector<eval::PredictionRecord> preds;
  std::string failures;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    preds.push_back({examples[i].id, r.label, r.nle.value_or("")});
    if (!r.label) failures += json({{"id", examples[i].id}, {"key", r.key}, {"raw", r.raw}}).dump() + "\n";
  }
  write_file_atomic(c.paths.out / "llm_predictions.jsonl", eval::serialize_predictions(preds));
  write_file_atomic(c.paths.out / "llm_failures.jsonl", failures);
  const auto failed = static_cast<std::size_t>(std::count(failures.begin(), failures.end(), '\n'));
  log_info("wrote " + std::to_string(preds.size()) + " LLM predictions (" + std::to_string(failed) +
           " unparseable responses)");
}

void evaluate(const RunConfig& c, const EvaluateOptions& o) {
  eval::ReportInputs in;
  auto surrogates = o.surrogates;
  if (surrogates.empty()) surrogates.emplace_back("ssm", c.paths.out / "ssm_predictions.jsonl");
  for (const auto& [name, path] : surrogates) {
    require_file(path, "predictions of " + name);
    in.surrogates.push_back({name, eval::load_predictions(path)});
  }
  const auto llm_path = o.llm.value_or(c.paths.out / "llm_predictions.jsonl");
  require_file(llm_path, "LLM predictions");
  in.llm = {"llm", eval::load_predictions(llm_path)};
  const auto gold_path = o.gold.value_or(dataset_path(c));
  require_file(gold_path, "gold labels");
  in.gold = eval::load_gold(gold_path);
  require_file(c.paths.embeddings, "paths.embeddings");
  const auto table = corpus::load_embedding_table(c.paths.embeddings);
  in.table = &table;
  if (o.ratings) {
    require_file(*o.ratings, "ratings");
    in.ratings = eval::parse_rating_csv(read_file(*o.ratings), o.ratings->string());
  }
  const auto report = eval::build_report(in);
  fs::create_directories(c.paths.out);
  write_file_atomic(c.paths.out / "report.json", report.to_json());
  write_file_atomic(c.paths.out / "report.txt", report.to_text());
  std::cerr << report.to_text();
}

fs::path demo_config_path() { return fs::path(SSM_DATA_DIR) / "fixture" / "demo.toml"; }

void demo(const RunConfig& base) {
  const auto start = std::chrono::steady_clock::now();
  auto c = base;
  log_info("[demo] building dataset");
  build_dataset(c);
  c.paths.dataset = dataset_path(base);

  EvaluateOptions eval_opts;
  for (const char* name : {"large", "small"}) {
    auto sub = c;
    sub.structure = name;
    sub.paths.out = base.paths.out / name;
    sub.paths.checkpoint.clear();
    log_info(std::string("[demo] training ") + name + " surrogate");
    train(sub);
    predict(sub);
    eval_opts.surrogates.emplace_back(std::string("ssm_") + name, sub.paths.out / "ssm_predictions.jsonl");
  }

  // work on a copy so the bundled cache is never modified
  if (!c.paths.cache.empty()) {
    require_file(c.paths.cache, "paths.cache");
    const auto copy = base.paths.out / "llm_cache.jsonl";
    if (fs::absolute(copy) != fs::absolute(c.paths.cache)) {
      fs::copy_file(c.paths.cache, copy, fs::copy_options::overwrite_existing);
      c.paths.cache = copy;
    }
  }
  log_info("[demo] querying LLM (cache and replay only)");
  if (c.paths.replay.empty()) c.cache_only = true;
  query_llm(c);

  log_info("[demo] evaluating");
  evaluate(c, eval_opts);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log_info("[demo] finished in " + format_fixed(secs, 1) + " s; outputs in " + base.paths.out.string());
}

namespace {

int report_error(const std::string& command, const std::string& kind, const std::string& message, int code) {
  json j = {{"error", {{"command", command}, {"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << std::endl;
  return code;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Statistical surrogate models for LLM natural language inference"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> structure;
  std::optional<std::string> out;
  bool cache_only = false;
  bool quiet = false;
  bool verbose = false;
  app.add_option("--config", config_path, "TOML-style run configuration");
  app.add_option("--seed", seed, "seed for every stochastic step");
  app.add_option("--structure", structure, "large, small or a structure JSON file");
  app.add_flag("--cache-only", cache_only, "never contact the LLM endpoint");
  app.add_option("--out", out, "output directory");
  app.add_flag("-q,--quiet", quiet, "only print warnings and errors");
  app.add_flag("-v,--verbose", verbose, "print debug messages");

  app.add_subcommand("build-dataset", "extract and embed slots, write dataset.jsonl");
  auto* cmd_train = app.add_subcommand("train", "run EM, write model.json, checkpoints and em_trace.csv");
  auto* cmd_predict = app.add_subcommand("predict", "write ssm_predictions.jsonl with labels and explanations");
  std::optional<std::string> checkpoint;
  cmd_predict->add_option("--checkpoint", checkpoint, "model file (default <out>/model.json)");
  auto* cmd_query = app.add_subcommand("query-llm", "few-shot prompt the LLM, write llm_predictions.jsonl");
  std::optional<std::string> replay;
  cmd_query->add_option("--replay", replay, "answer from canned responses instead of HTTP");
  auto* cmd_eval = app.add_subcommand("evaluate", "compare predictions, write report.json and report.txt");
  std::vector<std::string> ssm_files;
  std::optional<std::string> llm_file, gold_file, ratings_file;
  cmd_eval->add_option("--ssm", ssm_files, "NAME=PATH of surrogate predictions (repeatable)");
  cmd_eval->add_option("--llm", llm_file, "LLM predictions (default <out>/llm_predictions.jsonl)");
  cmd_eval->add_option("--gold", gold_file, "gold labels (default: the dataset)");
  cmd_eval->add_option("--ratings", ratings_file, "rating CSV for Fleiss' kappa");
  app.add_subcommand("demo", "end-to-end run on the bundled fixture corpus, offline");
  std::optional<std::string> dataset;
  for (auto* sub : {cmd_train, cmd_predict, cmd_query, cmd_eval}) {
    sub->add_option("--dataset", dataset, "dataset.jsonl (default <out>/dataset.jsonl)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  set_log_level(quiet ? LogLevel::warn : verbose ? LogLevel::debug : LogLevel::info);

  std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig c;
    if (config_path) {
      c = RunConfig::load(*config_path);
    } else if (command == "demo") {
      c = RunConfig::load(demo_config_path());
      if (!out) c.paths.out = "demo_out";
    }
    if (seed) c.seed = *seed;
    if (structure) c.structure = *structure;
    if (cache_only) c.cache_only = true;
    if (out) c.paths.out = *out;
    if (dataset) c.paths.dataset = *dataset;
    if (checkpoint) c.paths.checkpoint = *checkpoint;
    if (replay) c.paths.replay = *replay;
    c.propagate_seed();

    OutputLock lock(c.paths.out);
    if (command == "build-dataset") {
      build_dataset(c);
    } else if (command == "train") {
      train(c);
    } else if (command == "predict") {
      predict(c);
    } else if (command == "query-llm") {
      query_llm(c);
    } else if (command == "evaluate") {
      EvaluateOptions o;
      for (const auto& spec : ssm_files) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) o.surrogates.emplace_back("ssm", spec);
        else o.surrogates.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
      }
      if (llm_file) o.llm = *llm_file;
      if (gold_file) o.gold = *gold_file;
      if (ratings_file) o.ratings = *ratings_file;
      evaluate(c, o);
    } else if (command == "demo") {
      demo(c);
    }
  } catch (const FormatError& e) {
    return report_error(command, "format", e.what(), 1);
  } catch (const llm::NetworkError& e) {
    return report_error(command, "network", e.what(), 1);
  } catch (const Error& e) {
    return report_error(command, "error", e.what(), 1);
  } catch (const fs::filesystem_error& e) {
    return report_error(command, "filesystem", e.what(), 1);
  } catch (const std::exception& e) {
    return report_error(command, "internal", e.what(), 3);
  }
  return 0;
}

}  // namespace ssm::cli
