#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "commands.h"
#include "gendet/common/error.h"
#include "gendet/datahub/registry.h"
#include "gendet/datahub/synth.h"
#include "gendet/imageops/image_io.h"
#include "gendet/imageops/perturb.h"

namespace gendet::cli {

namespace fs = std::filesystem;
using datahub::DatasetManifest;

namespace {

void PrintRows(const std::vector<DatasetManifest>& manifests) {
  std::cout << datahub::FormatRegistryTable(datahub::DescribeRegistry(manifests));
}

struct SynthOptions {
  std::string kind;
  int count = 0;
  int size = 32;
  uint64_t seed = 0;
  std::optional<int> period;
  std::optional<double> amplitude;
  std::string id;
  std::string out;
  bool force = false;
};

void RunSynth(const SynthOptions& o) {
  auto spec = datahub::SynthGenSpec::Defaults(datahub::ParseSynthKind(o.kind), o.seed, o.size,
                                              o.count);
  if (o.period) spec.artifact_period = *o.period;
  if (o.amplitude) spec.artifact_amplitude = *o.amplitude;
  spec.Validate();
  const fs::path out = o.out;
  PrepareOutputDir(out, o.force);
  auto data = datahub::SynthGenerate(spec, o.id.empty() ? std::nullopt
                                                        : std::optional<std::string>(o.id));
  for (size_t i = 0; i < data.images.size(); ++i) {
    imageops::WritePng(out / data.manifest.entries[i].path, data.images[i]);
  }
  datahub::SaveManifest(out / "manifest.json", data.manifest);
  data.manifest.base_dir = out;
  PrintRows({data.manifest});
}

struct PerturbOptions {
  std::string manifest;
  std::string out;
  std::string preset;
  std::optional<int> blur;
  double sigma = 1.0;
  std::optional<int> quality;
  std::string id;
  bool force = false;
};

void RunPerturb(const PerturbOptions& o) {
  imageops::PerturbationSpec spec;
  if (!o.preset.empty()) {
    spec = imageops::PresetByTag(o.preset);
  } else if (o.blur) {
    spec = imageops::PerturbationSpec::Blur(*o.blur, o.sigma);
  } else if (o.quality) {
    spec = imageops::PerturbationSpec::Jpeg(*o.quality);
  } else {
    Fail(ErrorKind::kInvalidArgument, "one of --preset, --blur or --jpeg-qf is required");
  }
  spec.Validate();
  const DatasetManifest source = datahub::LoadManifest(o.manifest);
  const fs::path out = o.out;
  PrepareOutputDir(out, o.force);

  DatasetManifest derived = source;
  derived.id = o.id.empty() ? source.id + "-" + spec.Tag() : o.id;
  derived.derived_from = source.id;
  derived.perturbation = spec.Tag();
  derived.base_dir = out;
  std::set<std::string> written;
  double mse_sum = 0.0;
  for (auto& entry : derived.entries) {
    const auto original = imageops::ReadImage(source.Resolve(entry.path));
    const auto perturbed = imageops::QuantizeTo8Bit(imageops::ApplyPerturbation(original, spec));
    entry.path = fs::path(entry.path).replace_extension(".png").generic_string();
    if (!written.insert(entry.path).second) {
      Fail(ErrorKind::kDataError, "two inputs map to output " + entry.path);
    }
    const fs::path target = out / entry.path;
    fs::create_directories(target.parent_path());
    imageops::WritePng(target, perturbed);
    mse_sum += imageops::MeanSquaredError(original, perturbed);
  }
  datahub::SaveManifest(out / "manifest.json", derived);
  PrintRows({derived});
  std::cout << spec.Tag() << ": " << derived.entries.size() << " images, mean MSE "
            << (derived.entries.empty() ? 0.0 : mse_sum / derived.entries.size()) << "\n";
}

struct IngestOptions {
  std::string dir;
  std::string label;
  std::string id;
  std::string source_data;
  std::string source_model;
  std::optional<double> psi;
  uint64_t seed = 0;
  bool allow_corrupt = false;
  std::string out;
};

void RunIngest(const IngestOptions& o) {
  datahub::Provenance prov;
  prov.id = o.id;
  prov.source_data = o.source_data;
  if (!o.source_model.empty()) prov.source_model = o.source_model;
  prov.psi = o.psi;
  auto manifest = datahub::IngestDirectory(o.dir, datahub::ParseLabel(o.label), prov,
                                           {o.seed, o.allow_corrupt});
  const fs::path target = o.out.empty() ? fs::path(o.dir) / "manifest.json" : fs::path(o.out);
  if (!o.out.empty()) {
    // Entry paths are relative to the manifest file's directory.
    const fs::path rel = fs::relative(fs::absolute(o.dir), fs::absolute(target).parent_path());
    for (auto& e : manifest.entries) e.path = (rel / e.path).lexically_normal().generic_string();
  }
  datahub::SaveManifest(target, manifest);
  PrintRows({datahub::LoadManifest(target)});
}

void RunRegister(const std::string& registry_file, const std::vector<std::string>& manifests) {
  const fs::path reg = registry_file;
  nlohmann::json doc = {{"manifests", nlohmann::json::array()}};
  if (fs::exists(reg)) {
    std::ifstream in(reg);
    doc = nlohmann::json::parse(in);
  }
  const fs::path base = fs::absolute(reg).parent_path();
  for (const auto& m : manifests) {
    datahub::LoadManifest(m);
    doc["manifests"].push_back(fs::relative(fs::absolute(m), base).generic_string());
  }
  fs::path tmp = reg;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << doc.dump(2) << "\n";
    if (!out) Fail(ErrorKind::kDataError, "cannot write " + tmp.string());
  }
  std::vector<DatasetManifest> loaded;
  try {
    loaded = datahub::Registry::Load(tmp).Manifests();
  } catch (...) {
    fs::remove(tmp);
    throw;
  }
  fs::rename(tmp, reg);
  PrintRows(loaded);
}

}  // namespace

void AddDataCommands(CLI::App& app) {
  auto synth = std::make_shared<SynthOptions>();
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic corpus as PNGs plus manifest");
  cmd->add_option("--kind", synth->kind, "real, fakeA, fakeB or fakeC")
      ->required()
      ->check(CLI::IsMember({"real", "fakeA", "fakeB", "fakeC"}));
  cmd->add_option("--count", synth->count, "number of images")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--size", synth->size, "square image size")->capture_default_str();
  cmd->add_option("--seed", synth->seed, "generator seed")->capture_default_str();
  cmd->add_option("--period", synth->period, "artefact period in pixels (fake kinds)");
  cmd->add_option("--amplitude", synth->amplitude, "artefact amplitude (fake kinds)");
  cmd->add_option("--id", synth->id, "manifest id (default synth-<kind>-s<seed>)");
  cmd->add_option("--out", synth->out, "output directory")->required();
  cmd->add_flag("--force", synth->force, "write into a non-empty directory");
  cmd->callback([synth] { RunSynth(*synth); });

  auto perturb = std::make_shared<PerturbOptions>();
  cmd = app.add_subcommand("perturb", "Blur or JPEG-compress every image of a manifest");
  cmd->footer("Presets: " + PresetList());
  cmd->add_option("--manifest", perturb->manifest, "input manifest")->required();
  cmd->add_option("--out", perturb->out, "output directory")->required();
  auto* preset = cmd->add_option("--preset", perturb->preset, "one of: " + PresetList());
  auto* blur = cmd->add_option("--blur", perturb->blur, "Gaussian blur with this odd kernel size");
  cmd->add_option("--sigma", perturb->sigma, "blur standard deviation")->capture_default_str();
  auto* jpeg = cmd->add_option("--jpeg-qf", perturb->quality, "JPEG quality factor 1-100");
  preset->excludes(blur)->excludes(jpeg);
  blur->excludes(jpeg);
  cmd->add_option("--id", perturb->id, "manifest id (default <input id>-<tag>)");
  cmd->add_flag("--force", perturb->force, "write into a non-empty directory");
  cmd->callback([perturb] { RunPerturb(*perturb); });

  auto ingest = std::make_shared<IngestOptions>();
  cmd = app.add_subcommand("ingest", "Build a manifest for a directory of PNG/JPEG images");
  cmd->add_option("--dir", ingest->dir, "image directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--label", ingest->label, "real or fake")
      ->required()
      ->check(CLI::IsMember({"real", "fake"}));
  cmd->add_option("--id", ingest->id, "manifest id")->required();
  cmd->add_option("--source-data", ingest->source_data, "training data source")->required();
  cmd->add_option("--source-model", ingest->source_model, "generating model (fake sets)");
  cmd->add_option("--psi", ingest->psi, "truncation psi in [0, 1]");
  cmd->add_option("--seed", ingest->seed, "split seed")->capture_default_str();
  cmd->add_flag("--allow-corrupt", ingest->allow_corrupt, "skip undecodable files");
  cmd->add_option("--out", ingest->out, "manifest file (default <dir>/manifest.json)");
  cmd->callback([ingest] { RunIngest(*ingest); });

  auto reg_file = std::make_shared<std::string>();
  auto reg_manifests = std::make_shared<std::vector<std::string>>();
  cmd = app.add_subcommand("register", "Add manifests to a registry file");
  cmd->add_option("--registry", *reg_file, "registry file (created if missing)")->required();
  cmd->add_option("manifests", *reg_manifests, "manifest files")->required()->check(CLI::ExistingFile);
  cmd->callback([reg_file, reg_manifests] { RunRegister(*reg_file, *reg_manifests); });

  auto desc_registry = std::make_shared<std::string>();
  auto desc_manifests = std::make_shared<std::vector<std::string>>();
  cmd = app.add_subcommand("describe", "Summarise manifests: provenance and split counts");
  auto* r = cmd->add_option("--registry", *desc_registry, "registry file")->check(CLI::ExistingFile);
  auto* m = cmd->add_option("--manifest", *desc_manifests, "manifest file")->check(CLI::ExistingFile);
  r->excludes(m);
  cmd->callback([desc_registry, desc_manifests] {
    if (!desc_registry->empty()) {
      PrintRows(datahub::Registry::Load(*desc_registry).Manifests());
      return;
    }
    if (desc_manifests->empty()) {
      Fail(ErrorKind::kInvalidArgument, "describe needs --registry or --manifest");
    }
    std::vector<DatasetManifest> list;
    for (const auto& f : *desc_manifests) list.push_back(datahub::LoadManifest(f));
    PrintRows(list);
  });
}

}  // namespace gendet::cli
