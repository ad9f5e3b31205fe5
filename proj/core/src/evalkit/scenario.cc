#include "gendet/evalkit/scenario.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <utility>

#include "gendet/common/error.h"

namespace gendet::evalkit {

namespace {

using datahub::DatasetManifest;
using datahub::Label;
using Source = std::pair<std::string, std::string>;  // (model, data)

Source SourceOf(const DatasetManifest& m) {
  return {m.source_model.value_or(""), m.source_data};
}

[[noreturn]] void Invalid(const Scenario& s, const std::string& what) {
  Fail(ErrorKind::kInvalidArgument,
       std::string(ToString(s.tag)) + " scenario '" + s.name + "': " + what);
}

void RequireUnique(const Scenario& s, const std::vector<std::string>& ids, const char* what) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) Invalid(s, std::string("duplicate ") + what + " set " + id);
  }
}

std::string Normalized(const DatasetManifest& m, const std::string& path) {
  return std::filesystem::absolute(m.Resolve(path)).lexically_normal().string();
}

}  // namespace

std::string_view ToString(ScenarioTag tag) {
  switch (tag) {
    case ScenarioTag::kDefault: return "Default";
    case ScenarioTag::kCrossModel: return "CrossModel";
    case ScenarioTag::kCrossData: return "CrossData";
    case ScenarioTag::kPostProcessing: return "PostProcessing";
    case ScenarioTag::kInTheWild: return "InTheWild";
  }
  return "?";
}

ScenarioTag ParseScenarioTag(std::string_view text) {
  for (auto tag : {ScenarioTag::kDefault, ScenarioTag::kCrossModel, ScenarioTag::kCrossData,
                   ScenarioTag::kPostProcessing, ScenarioTag::kInTheWild}) {
    if (ToString(tag) == text) return tag;
  }
  Fail(ErrorKind::kInvalidArgument, "unknown scenario tag '" + std::string(text) + "'");
}

void CheckLeaks(const Scenario& scenario, const datahub::Registry& registry) {
  std::map<std::string, std::string> training;  // path -> manifest id
  for (const auto& id : scenario.train_sets) {
    const auto& m = registry.Get(id);
    for (const auto& e : m.entries) {
      if (e.split != datahub::Split::kTest) training.emplace(Normalized(m, e.path), id);
    }
  }
  for (const auto& id : scenario.test_sets) {
    const auto& m = registry.Get(id);
    for (const auto& e : m.entries) {
      if (e.split != datahub::Split::kTest) continue;
      auto it = training.find(Normalized(m, e.path));
      if (it != training.end()) {
        Fail(ErrorKind::kDataError, "train/test leak: " + it->first + " is in train set " +
                                        it->second + " and test set " + id);
      }
    }
  }
}

void ValidateScenario(const Scenario& s, const datahub::Registry& registry) {
  if (s.name.empty()) Invalid(s, "missing name");
  if (s.train_sets.empty()) Invalid(s, "no train sets");
  if (s.test_sets.empty()) Invalid(s, "no test sets");
  RequireUnique(s, s.train_sets, "train");
  RequireUnique(s, s.test_sets, "test");

  std::set<Source> real_train, fake_train;
  std::set<std::string> fake_models, fake_datas, real_datas;
  for (const auto& id : s.train_sets) {
    const auto& m = registry.Get(id);
    if (m.label == Label::kReal) {
      real_train.insert(SourceOf(m));
      real_datas.insert(m.source_data);
    } else {
      fake_train.insert(SourceOf(m));
      fake_models.insert(m.source_model.value_or(""));
      fake_datas.insert(m.source_data);
    }
  }
  if (real_train.empty() || fake_train.empty()) {
    Invalid(s, "train sets need at least one real and one fake manifest");
  }

  std::vector<const DatasetManifest*> fake_tests, real_tests;
  for (const auto& id : s.test_sets) {
    const auto& m = registry.Get(id);
    (m.label == Label::kReal ? real_tests : fake_tests).push_back(&m);
  }

  if (s.perturbation) {
    if (s.tag != ScenarioTag::kPostProcessing) Invalid(s, "only PostProcessing takes a perturbation");
    s.perturbation->Validate();
  }
  if (!s.average_sets.empty()) {
    if (s.tag != ScenarioTag::kInTheWild) Invalid(s, "an Avg column is only defined for InTheWild");
    for (const auto& id : s.average_sets) {
      if (std::find(s.test_sets.begin(), s.test_sets.end(), id) == s.test_sets.end()) {
        Invalid(s, "average set " + id + " is not a test set");
      }
    }
  }

  switch (s.tag) {
    case ScenarioTag::kDefault:
      for (const auto& id : s.test_sets) {
        const auto& m = registry.Get(id);
        const auto& pool = m.label == Label::kReal ? real_train : fake_train;
        if (!pool.contains(SourceOf(m))) {
          Invalid(s, "test set " + id + " does not share a source with any train set");
        }
      }
      break;
    case ScenarioTag::kCrossModel:
      if (fake_tests.empty()) Invalid(s, "needs a fake test set");
      for (const auto* m : fake_tests) {
        if (fake_models.contains(m->source_model.value_or(""))) {
          Invalid(s, "test set " + m->id + " comes from a training model");
        }
        if (!fake_datas.contains(m->source_data)) {
          Invalid(s, "test set " + m->id + " uses different source data");
        }
      }
      for (const auto* m : real_tests) {
        if (!real_datas.contains(m->source_data)) {
          Invalid(s, "real test set " + m->id + " is not the training real source");
        }
      }
      break;
    case ScenarioTag::kCrossData:
      if (fake_tests.empty()) Invalid(s, "needs a fake test set");
      for (const auto* m : fake_tests) {
        if (!fake_models.contains(m->source_model.value_or(""))) {
          Invalid(s, "test set " + m->id + " comes from an unseen model");
        }
        if (fake_datas.contains(m->source_data)) {
          Invalid(s, "test set " + m->id + " uses the training source data");
        }
      }
      break;
    case ScenarioTag::kPostProcessing:
      if (!s.perturbation) Invalid(s, "missing perturbation");
      break;
    case ScenarioTag::kInTheWild: {
      if (fake_train.size() < 2) Invalid(s, "needs at least two fake train sources");
      const bool unseen = std::any_of(fake_tests.begin(), fake_tests.end(), [&](auto* m) {
        return !fake_train.contains(SourceOf(*m));
      });
      if (!unseen) Invalid(s, "needs a fake test source not seen in training");
      break;
    }
  }
  CheckLeaks(s, registry);
}

imageops::PerturbationSpec PerturbationFromJson(const nlohmann::json& doc) {
  if (doc.is_string()) return imageops::PresetByTag(doc.get<std::string>());
  const std::string kind = doc.at("kind").get<std::string>();
  imageops::PerturbationSpec spec;
  if (kind == "blur") {
    spec = imageops::PerturbationSpec::Blur(doc.at("kernel").get<int>(),
                                            doc.value("sigma", 1.0));
  } else if (kind == "jpeg") {
    spec = imageops::PerturbationSpec::Jpeg(doc.at("quality").get<int>());
  } else {
    Fail(ErrorKind::kInvalidArgument, "unknown perturbation kind '" + kind + "'");
  }
  spec.Validate();
  return spec;
}

nlohmann::ordered_json ToJson(const imageops::PerturbationSpec& spec) {
  nlohmann::ordered_json doc;
  if (spec.kind == imageops::PerturbationSpec::Kind::kGaussianBlur) {
    doc["kind"] = "blur";
    doc["kernel"] = spec.kernel;
    doc["sigma"] = spec.sigma;
  } else {
    doc["kind"] = "jpeg";
    doc["quality"] = spec.quality;
  }
  return doc;
}

Scenario ScenarioFromJson(const nlohmann::json& doc) {
  Scenario s;
  s.tag = ParseScenarioTag(doc.at("tag").get<std::string>());
  s.name = doc.value("name", std::string(ToString(s.tag)));
  s.train_sets = doc.at("train").get<std::vector<std::string>>();
  s.test_sets = doc.at("test").get<std::vector<std::string>>();
  if (doc.contains("perturbation") && !doc.at("perturbation").is_null()) {
    s.perturbation = PerturbationFromJson(doc.at("perturbation"));
  }
  if (doc.contains("average")) s.average_sets = doc.at("average").get<std::vector<std::string>>();
  return s;
}

nlohmann::ordered_json ToJson(const Scenario& s) {
  nlohmann::ordered_json doc;
  doc["name"] = s.name;
  doc["tag"] = ToString(s.tag);
  doc["train"] = s.train_sets;
  doc["test"] = s.test_sets;
  if (s.perturbation) doc["perturbation"] = ToJson(*s.perturbation);
  if (!s.average_sets.empty()) doc["average"] = s.average_sets;
  return doc;
}

}  // namespace gendet::evalkit
