#ifndef GENDET_SURVEY_SESSION_H_
#define GENDET_SURVEY_SESSION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gendet/common/random.h"
#include "gendet/datahub/manifest.h"
#include "gendet/imageops/image.h"

namespace gendet::survey {

using datahub::Label;

enum class Group { kControl, kFeedback };
enum class AnswerScale { kCertainlyFake, kProbablyFake, kDontKnow, kProbablyReal, kCertainlyReal };
enum class Experience { kLittle, kMuch };

std::string_view ToString(Group group);
std::string_view ToString(AnswerScale answer);  // "certainly_fake", ...
std::string_view ToString(Experience experience);
Group ParseGroup(std::string_view text);
AnswerScale ParseAnswer(std::string_view text);

inline constexpr std::array<int, 3> kResolutions = {256, 512, 1024};
inline constexpr int kTrialsPerSession = 18;
inline constexpr int kPerClassPerResolution = 3;

// Levels 0-2 are little, 3-4 much; anything else throws.
Experience GroupAiExperience(int level);

struct PoolImage {
  std::string id;
  Label truth = Label::kReal;
  std::filesystem::path file;  // empty for in-memory images
};

// Images available to sessions. Ids are opaque to participants.
class ImagePool {
 public:
  void Add(PoolImage image);
  void Add(PoolImage image, imageops::ImageTensor pixels);

  // Every entry of each manifest, id "<manifest id>/<path>". With an
  // allow-list (one id per line, '#' comments) only listed ids are mounted.
  static ImagePool FromManifests(const std::vector<datahub::DatasetManifest>& manifests,
                                 const std::optional<std::filesystem::path>& allow_list = {});

  const std::vector<PoolImage>& images() const { return images_; }
  size_t Count(Label truth) const;
  const PoolImage& Get(const std::string& id) const;

  // Square RGB image at `size` x `size`: centre-cropped, then resized.
  imageops::ImageTensor Render(const std::string& id, int size) const;

 private:
  std::vector<PoolImage> images_;
  std::vector<std::optional<imageops::ImageTensor>> pixels_;
};

struct Trial {
  int index = 0;
  std::string image_id;
  Label truth = Label::kReal;
  int resolution = 256;
  bool operator==(const Trial&) const = default;
};

// Three real and three fake images per resolution, drawn without
// replacement, presented in a uniformly random order. Throws
// "insufficient pool" unless there are >= 9 images of each class.
std::vector<Trial> BuildTrials(const ImagePool& pool, Rng& rng);

struct MetaAnswers {
  std::optional<int> ai_experience;
  std::optional<std::string> cues_text;
  bool operator==(const MetaAnswers&) const = default;
};

struct SurveySession {
  std::string id;
  uint64_t seed = 0;
  Group group = Group::kControl;
  std::vector<Trial> trials;
  std::vector<std::optional<AnswerScale>> answers;
  std::optional<MetaAnswers> meta;
  int64_t created_ms = 0;
  int64_t updated_ms = 0;

  int answered() const;
  bool completed() const { return answered() == kTrialsPerSession; }
  // 18 trials, 3+3 per resolution, distinct images. Throws when violated.
  void CheckInvariants() const;
};

// Probably/certainly matching the truth is correct; everything else is not.
bool IsCorrect(AnswerScale answer, Label truth);
std::string FeedbackMessage(bool correct, Label truth);

struct Score {
  int correct = 0;
  std::vector<bool> per_trial;
};

// Throws gendet::Error(kConflict) for an incomplete session.
Score ScoreSession(const SurveySession& session);

}  // namespace gendet::survey

#endif  // GENDET_SURVEY_SESSION_H_
