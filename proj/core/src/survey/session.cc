#include "gendet/survey/session.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "gendet/common/error.h"
#include "gendet/imageops/image_io.h"
#include "gendet/imageops/transforms.h"

namespace gendet::survey {

std::string_view ToString(Group group) {
  return group == Group::kControl ? "control" : "feedback";
}

std::string_view ToString(AnswerScale answer) {
  switch (answer) {
    case AnswerScale::kCertainlyFake: return "certainly_fake";
    case AnswerScale::kProbablyFake: return "probably_fake";
    case AnswerScale::kDontKnow: return "dont_know";
    case AnswerScale::kProbablyReal: return "probably_real";
    case AnswerScale::kCertainlyReal: return "certainly_real";
  }
  return "?";
}

std::string_view ToString(Experience experience) {
  return experience == Experience::kLittle ? "little" : "much";
}

Group ParseGroup(std::string_view text) {
  if (text == "control") return Group::kControl;
  if (text == "feedback") return Group::kFeedback;
  Fail(ErrorKind::kInvalidArgument, "unknown group '" + std::string(text) + "'");
}

AnswerScale ParseAnswer(std::string_view text) {
  for (auto a : {AnswerScale::kCertainlyFake, AnswerScale::kProbablyFake, AnswerScale::kDontKnow,
                 AnswerScale::kProbablyReal, AnswerScale::kCertainlyReal}) {
    if (ToString(a) == text) return a;
  }
  Fail(ErrorKind::kInvalidArgument, "unknown answer '" + std::string(text) + "'");
}

Experience GroupAiExperience(int level) {
  Require(level >= 0 && level <= 4, "AI experience level must be 0-4, got " + std::to_string(level));
  return level <= 2 ? Experience::kLittle : Experience::kMuch;
}

void ImagePool::Add(PoolImage image) {
  for (const auto& existing : images_) {
    Require(existing.id != image.id, "duplicate pool image " + image.id);
  }
  images_.push_back(std::move(image));
  pixels_.emplace_back();
}

void ImagePool::Add(PoolImage image, imageops::ImageTensor pixels) {
  Add(std::move(image));
  pixels_.back() = std::move(pixels);
}

ImagePool ImagePool::FromManifests(const std::vector<datahub::DatasetManifest>& manifests,
                                   const std::optional<std::filesystem::path>& allow_list) {
  std::optional<std::set<std::string>> allowed;
  if (allow_list) {
    std::ifstream in(*allow_list);
    if (!in) Fail(ErrorKind::kDataError, "cannot read allow-list " + allow_list->string());
    allowed.emplace();
    std::string line;
    while (std::getline(in, line)) {
      line.erase(0, line.find_first_not_of(" \t"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (!line.empty() && line[0] != '#') allowed->insert(line);
    }
  }
  ImagePool pool;
  for (const auto& m : manifests) {
    for (const auto& e : m.entries) {
      std::string id = m.id + "/" + e.path;
      if (allowed && !allowed->contains(id)) continue;
      pool.Add({std::move(id), m.label, m.Resolve(e.path)});
    }
  }
  return pool;
}

size_t ImagePool::Count(Label truth) const {
  return std::count_if(images_.begin(), images_.end(),
                       [&](const PoolImage& p) { return p.truth == truth; });
}

const PoolImage& ImagePool::Get(const std::string& id) const {
  for (const auto& p : images_) {
    if (p.id == id) return p;
  }
  Fail(ErrorKind::kNotFound, "no pool image " + id);
}

imageops::ImageTensor ImagePool::Render(const std::string& id, int size) const {
  size_t i = 0;
  while (i < images_.size() && images_[i].id != id) ++i;
  if (i == images_.size()) Fail(ErrorKind::kNotFound, "no pool image " + id);
  const imageops::ImageTensor source =
      pixels_[i] ? *pixels_[i] : imageops::ReadImage(images_[i].file);
  const int side = std::min(source.height(), source.width());
  const int y0 = (source.height() - side) / 2, x0 = (source.width() - side) / 2;
  imageops::ImageTensor square(source.channels(), side, side, source.space());
  for (int c = 0; c < source.channels(); ++c) {
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) square.at(c, y, x) = source.at(c, y0 + y, x0 + x);
    }
  }
  return imageops::Resize(square, size, size);
}

std::vector<Trial> BuildTrials(const ImagePool& pool, Rng& rng) {
  constexpr size_t kNeed = kResolutions.size() * kPerClassPerResolution;
  std::vector<size_t> real, fake;
  for (size_t i = 0; i < pool.images().size(); ++i) {
    (pool.images()[i].truth == Label::kReal ? real : fake).push_back(i);
  }
  if (real.size() < kNeed || fake.size() < kNeed) {
    Fail(ErrorKind::kDataError, "insufficient pool: need " + std::to_string(kNeed) +
                                    " real and fake images, have " + std::to_string(real.size()) +
                                    " real and " + std::to_string(fake.size()) + " fake");
  }
  rng.Shuffle(std::span<size_t>(real));
  rng.Shuffle(std::span<size_t>(fake));
  std::vector<Trial> trials;
  for (size_t r = 0; r < kResolutions.size(); ++r) {
    for (const auto* cls : {&real, &fake}) {
      for (int k = 0; k < kPerClassPerResolution; ++k) {
        const auto& img = pool.images()[(*cls)[r * kPerClassPerResolution + k]];
        trials.push_back({0, img.id, img.truth, kResolutions[r]});
      }
    }
  }
  rng.Shuffle(std::span<Trial>(trials));
  for (size_t i = 0; i < trials.size(); ++i) trials[i].index = static_cast<int>(i);
  return trials;
}

int SurveySession::answered() const {
  int n = 0;
  while (n < static_cast<int>(answers.size()) && answers[n]) ++n;
  return n;
}

void SurveySession::CheckInvariants() const {
  Require(trials.size() == static_cast<size_t>(kTrialsPerSession), "session must have 18 trials");
  Require(answers.size() == trials.size(), "one answer slot per trial");
  std::set<std::string> ids;
  std::map<std::pair<int, Label>, int> counts;
  for (size_t i = 0; i < trials.size(); ++i) {
    Require(trials[i].index == static_cast<int>(i), "trial indices must be 0-17 in order");
    Require(ids.insert(trials[i].image_id).second, "image repeated within a session");
    Require(std::find(kResolutions.begin(), kResolutions.end(), trials[i].resolution) !=
                kResolutions.end(),
            "unsupported resolution");
    ++counts[{trials[i].resolution, trials[i].truth}];
  }
  for (int res : kResolutions) {
    for (Label l : {Label::kReal, Label::kFake}) {
      Require(counts[{res, l}] == kPerClassPerResolution,
              "each resolution needs 3 real and 3 fake trials");
    }
  }
  const int n = answered();
  for (size_t i = n; i < answers.size(); ++i) Require(!answers[i], "answers must be a prefix");
  if (meta && meta->ai_experience) GroupAiExperience(*meta->ai_experience);
}

bool IsCorrect(AnswerScale answer, Label truth) {
  if (truth == Label::kReal) {
    return answer == AnswerScale::kProbablyReal || answer == AnswerScale::kCertainlyReal;
  }
  return answer == AnswerScale::kProbablyFake || answer == AnswerScale::kCertainlyFake;
}

std::string FeedbackMessage(bool correct, Label truth) {
  const std::string t(datahub::ToString(truth));
  return correct ? "Correct, the image was indeed " + t : "Incorrect, the image was " + t;
}

Score ScoreSession(const SurveySession& session) {
  if (!session.completed()) {
    Fail(ErrorKind::kConflict, "session " + session.id + " is incomplete");
  }
  Score score;
  for (size_t i = 0; i < session.trials.size(); ++i) {
    const bool ok = IsCorrect(*session.answers[i], session.trials[i].truth);
    score.per_trial.push_back(ok);
    score.correct += ok;
  }
  return score;
}

}  // namespace gendet::survey
