#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>

#include "commands.h"
#include "gendet/common/error.h"
#include "gendet/datahub/registry.h"
#include "gendet/evalkit/experiment.h"
#include "gendet/evalkit/metrics.h"
#include "gendet/evalkit/runner.h"
#include "gendet/imageops/perturb.h"
#include "gendet/nnet/checkpoint.h"
#include "gendet/nnet/train.h"

namespace gendet::cli {

namespace {

struct TrainOptions {
  std::string registry;
  std::vector<std::string> train_sets;
  std::string arch = "X";
  std::string preprocess = "None";
  int input_size = 32;
  uint64_t seed = 1;
  std::string out;
  evalkit::TrainOverrides overrides;
  std::optional<int> max_train_per_class;
};

void RunTrain(const TrainOptions& o) {
  const auto registry = datahub::Registry::Load(o.registry);
  evalkit::DiskImageSource source;
  const auto data =
      evalkit::LoadTrainingImages(registry, o.train_sets, source, o.max_train_per_class);
  const auto arch = nnet::ParseArch(o.arch);
  auto model = nnet::DetectorModel::Build(arch, imageops::ParsePreprocessMethod(o.preprocess),
                                          o.input_size, o.seed);
  const auto train = evalkit::PrepareSamples(model, data.train);
  const auto val = evalkit::PrepareSamples(model, data.val);
  auto cfg = o.overrides.For(arch);
  cfg.seed = o.seed;
  std::cerr << nnet::ToString(arch) << "/" << o.preprocess << ": " << model.ParameterCount()
            << " parameters, " << train.size() << " train, " << val.size() << " val\n";
  const auto history = nnet::Train(model, train, val, cfg, [](const nnet::EpochRecord& r) {
    std::fprintf(stderr, "epoch %d  loss %.5f  val %.4f\n", r.epoch, r.train_loss,
                 r.val_accuracy);
  });
  nnet::SaveCheckpoint(o.out, model);
  std::cout << "best epoch " << history.best_epoch << " of " << history.epochs.size()
            << (history.stopped_early ? " (stopped early)" : "") << ", saved " << o.out << "\n";
}

struct EvalOptions {
  std::string checkpoint;
  std::string registry;
  std::vector<std::string> test_sets;
  std::string preset;
};

void RunEval(const EvalOptions& o) {
  auto model = nnet::LoadCheckpoint(o.checkpoint);
  const auto registry = datahub::Registry::Load(o.registry);
  std::optional<imageops::PerturbationSpec> perturbation;
  if (!o.preset.empty()) perturbation = imageops::PresetByTag(o.preset);
  evalkit::DiskImageSource source;
  for (const auto& id : o.test_sets) {
    const auto& m = registry.Get(id);
    nnet::SampleSet set(model.SampleShape());
    for (const auto& e : m.entries) {
      if (e.split != datahub::Split::kTest) continue;
      auto img = source.Load(m, e);
      if (perturbation) img = imageops::ApplyPerturbation(img, *perturbation);
      set.Add(model.PrepareInput(img), nnet::ClassIndex(m.label));
    }
    const double acc = evalkit::AccuracyPerDataset(model, set, m.label);
    std::printf("%s\t%s\t%zu\t%.1f\n", id.c_str(), std::string(datahub::ToString(m.label)).c_str(),
                set.size(), evalkit::RoundHalfUp1(acc));
  }
}

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<int> jobs;
  std::vector<uint64_t> seeds;
};

void RunRun(const RunOptions& o) {
  auto cfg = evalkit::LoadExperiment(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  cfg.Validate();
  const auto registry = datahub::Registry::Load(cfg.registry);
  evalkit::DiskImageSource source;
  const auto result = evalkit::RunExperiment(cfg, registry, source, [](const std::string& msg) {
    std::cerr << msg << "\n";
  });
  for (const auto& f : result.files) std::cout << f.string() << "\n";
}

void AddTrainOverrides(CLI::App* cmd, evalkit::TrainOverrides& o) {
  cmd->add_option("--lr", o.learning_rate, "learning rate");
  cmd->add_option("--momentum", o.momentum, "SGD momentum");
  cmd->add_option("--weight-decay", o.weight_decay, "weight decay");
  cmd->add_option("--batch-size", o.batch_size, "batch size (default 32 X, 64 FT)");
  cmd->add_option("--patience", o.patience, "early-stopping patience in epochs");
  cmd->add_option("--max-epochs", o.max_epochs, "epoch limit");
}

}  // namespace

void AddModelCommands(CLI::App& app) {
  auto train = std::make_shared<TrainOptions>();
  auto* cmd = app.add_subcommand("train", "Train one detector and save a checkpoint");
  cmd->add_option("--registry", train->registry, "registry file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--train", train->train_sets, "manifest ids (real and fake)")
      ->required()
      ->delimiter(',');
  cmd->add_option("--arch", train->arch, "X or FT")->capture_default_str();
  cmd->add_option("--preprocess", train->preprocess, "None, Res1, Res3, Cooc or HSV")
      ->capture_default_str();
  cmd->add_option("--input-size", train->input_size, "32, 64 or 128")->capture_default_str();
  cmd->add_option("--seed", train->seed, "initialisation and shuffling seed")->capture_default_str();
  cmd->add_option("--max-train-per-class", train->max_train_per_class, "cap on training images");
  cmd->add_option("--out", train->out, "checkpoint file")->required();
  AddTrainOverrides(cmd, train->overrides);
  cmd->callback([train] { RunTrain(*train); });

  auto eval = std::make_shared<EvalOptions>();
  cmd = app.add_subcommand("eval", "Per-dataset accuracy of a checkpoint on test splits");
  cmd->add_option("--checkpoint", eval->checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--registry", eval->registry, "registry file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--test", eval->test_sets, "manifest ids")->required()->delimiter(',');
  cmd->add_option("--preset", eval->preset, "perturb test images first: " + PresetList());
  cmd->callback([eval] { RunEval(*eval); });

  auto run = std::make_shared<RunOptions>();
  cmd = app.add_subcommand("run", "Run every scenario of an experiment config");
  cmd->add_option("--config", run->config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", run->out, "report directory (overrides the config)");
  cmd->add_option("--jobs", run->jobs, "training threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seeds", run->seeds, "comma-separated seeds")->delimiter(',');
  cmd->callback([run] { RunRun(*run); });
}

}  // namespace gendet::cli
