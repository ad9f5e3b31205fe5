#include "gendet/evalkit/experiment.h"

#include <fstream>
#include <set>

#include "gendet/common/error.h"

namespace gendet::evalkit {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void RejectUnknownKeys(const json& doc, std::initializer_list<const char*> known,
                       const std::string& where) {
  Require(doc.is_object(), where + " must be an object");
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    Require(ok, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
std::vector<T> OneOrMany(const json& doc) {
  if (doc.is_array()) return doc.get<std::vector<T>>();
  return {doc.get<T>()};
}

std::vector<GridCell> GridFromJson(const json& doc) {
  std::vector<GridCell> grid;
  auto expand = [&](const json& entry) {
    RejectUnknownKeys(entry, {"preprocess", "arch"}, "grid entry");
    for (const auto& p : OneOrMany<std::string>(entry.at("preprocess"))) {
      for (const auto& a : OneOrMany<std::string>(entry.at("arch"))) {
        grid.push_back({imageops::ParsePreprocessMethod(p), nnet::ParseArch(a)});
      }
    }
  };
  if (doc.is_array()) {
    for (const auto& entry : doc) expand(entry);
  } else {
    expand(doc);
  }
  return grid;
}

ordered_json HistoryJson(const nnet::TrainHistory& history) {
  ordered_json epochs = ordered_json::array();
  for (const auto& e : history.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss},
                      {"val_accuracy", e.val_accuracy}});
  }
  return {{"best_epoch", history.best_epoch},
          {"stopped_early", history.stopped_early},
          {"epochs", epochs}};
}

void WriteText(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  out.close();
  if (!out) Fail(ErrorKind::kDataError, "cannot write " + file.string());
}

}  // namespace

void ExperimentConfig::Validate() const {
  Require(!scenarios.empty(), "experiment has no scenarios");
  Require(!grid.empty(), "experiment grid is empty");
  Require(!seeds.empty(), "experiment has no seeds");
  Require(std::set<uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size(),
          "experiment seeds must be distinct");
  Require(jobs >= 1, "jobs must be >= 1");
  Require(!max_train_per_class || *max_train_per_class >= 1,
          "max_train_per_class must be >= 1");
  Require(!formats.empty(), "no report formats");
  std::set<std::string> names;
  for (const auto& s : scenarios) {
    Require(names.insert(s.name).second, "duplicate scenario name '" + s.name + "'");
    Require(s.name.find_first_of("/\\") == std::string::npos && s.name != "." &&
                s.name != ".." && s.name != "run_log",
            "scenario name '" + s.name + "' cannot be used as a file name");
  }
  (void)train.For(nnet::Arch::kMiniXception);
  (void)train.For(nnet::Arch::kForensicTransfer);
}

ExperimentConfig ExperimentFromJson(const json& doc, const fs::path& base_dir) {
  RejectUnknownKeys(doc,
                    {"registry", "scenarios", "grid", "seeds", "input_size", "train",
                     "max_train_per_class", "out", "jobs", "formats"},
                    "experiment config");
  ExperimentConfig cfg;
  cfg.registry = base_dir / doc.at("registry").get<std::string>();
  for (const auto& s : doc.at("scenarios")) {
    RejectUnknownKeys(s, {"name", "tag", "train", "test", "perturbation", "average"}, "scenario");
    cfg.scenarios.push_back(ScenarioFromJson(s));
  }
  cfg.grid = GridFromJson(doc.at("grid"));
  if (doc.contains("seeds")) cfg.seeds = doc.at("seeds").get<std::vector<uint64_t>>();
  cfg.input_size = doc.value("input_size", cfg.input_size);
  if (doc.contains("train")) {
    const auto& t = doc.at("train");
    RejectUnknownKeys(t, {"learning_rate", "momentum", "weight_decay", "batch_size", "patience",
                          "max_epochs"},
                      "train overrides");
    if (t.contains("learning_rate")) cfg.train.learning_rate = t.at("learning_rate").get<double>();
    if (t.contains("momentum")) cfg.train.momentum = t.at("momentum").get<double>();
    if (t.contains("weight_decay")) cfg.train.weight_decay = t.at("weight_decay").get<double>();
    if (t.contains("batch_size")) cfg.train.batch_size = t.at("batch_size").get<int>();
    if (t.contains("patience")) cfg.train.patience = t.at("patience").get<int>();
    if (t.contains("max_epochs")) cfg.train.max_epochs = t.at("max_epochs").get<int>();
  }
  if (doc.contains("max_train_per_class")) {
    cfg.max_train_per_class = doc.at("max_train_per_class").get<int>();
  }
  if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
  cfg.out_dir = base_dir / cfg.out_dir;
  cfg.jobs = doc.value("jobs", cfg.jobs);
  if (doc.contains("formats")) {
    cfg.formats.clear();
    for (const auto& f : doc.at("formats")) cfg.formats.push_back(ParseReportFormat(f.get<std::string>()));
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadExperiment(const fs::path& file) {
  std::ifstream in(file);
  if (!in) Fail(ErrorKind::kInvalidArgument, "cannot open config " + file.string());
  json doc;
  try {
    doc = json::parse(in);
    return ExperimentFromJson(doc, file.parent_path());
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidArgument, "config " + file.string() + ": " + e.what());
  }
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const datahub::Registry& registry,
                               ImageSource& images,
                               const std::function<void(const std::string&)>& log) {
  config.Validate();
  for (const auto& s : config.scenarios) ValidateScenario(s, registry);

  RunOptions options;
  options.grid = config.grid;
  options.seeds = config.seeds;
  options.input_size = config.input_size;
  options.train = config.train;
  options.max_train_per_class = config.max_train_per_class;
  options.jobs = config.jobs;
  options.log = log;

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) Fail(ErrorKind::kDataError, "cannot create " + config.out_dir.string());

  EnsembleCache cache;
  ExperimentResult result;
  ordered_json run_log = {{"seeds", config.seeds}, {"scenarios", ordered_json::array()}};
  for (const auto& scenario : config.scenarios) {
    if (log) log("scenario " + scenario.name + " (" + std::string(ToString(scenario.tag)) + ")");
    EvalReport report = RunScenario(scenario, registry, images, options, &cache);
    for (auto format : config.formats) {
      const fs::path file =
          config.out_dir / (scenario.name + (format == ReportFormat::kCsv ? ".csv" : ".md"));
      WriteText(file, RenderReport(report, format));
      result.files.push_back(file);
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
      ordered_json seeds = ordered_json::array();
      for (size_t s = 0; s < row.seeds.size(); ++s) {
        ordered_json entry = {{"seed", row.seeds[s]}, {"accuracy", row.per_seed[s]}};
        entry["history"] = HistoryJson(row.histories[s]);
        seeds.push_back(entry);
      }
      rows.push_back({{"preprocess", imageops::ToString(row.preprocess)},
                      {"arch", nnet::ToString(row.arch)},
                      {"mean", row.cells},
                      {"seeds", seeds}});
    }
    run_log["scenarios"].push_back(
        {{"scenario", ToJson(scenario)}, {"columns", report.columns}, {"rows", rows}});
    result.reports.push_back(std::move(report));
  }
  const fs::path log_file = config.out_dir / "run_log.json";
  WriteText(log_file, run_log.dump(2) + "\n");
  result.files.push_back(log_file);
  return result;
}

}  // namespace gendet::evalkit
