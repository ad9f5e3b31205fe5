#include <iostream>

#include "commands.h"
#include "gendet/common/error.h"
#include "gendet/imageops/perturb.h"

namespace gendet::cli {

void PrepareOutputDir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) {
      Fail(ErrorKind::kInvalidArgument, dir.string() + " exists and is not a directory");
    }
    if (!fs::is_empty(dir) && !force) {
      Fail(ErrorKind::kInvalidArgument, dir.string() + " is not empty (use --force)");
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kDataError, "cannot create " + dir.string() + ": " + ec.message());
}

std::string PresetList() {
  std::string out;
  for (const auto& p : imageops::StandardPresets()) out += (out.empty() ? "" : " ") + p.Tag();
  return out;
}

}  // namespace gendet::cli

namespace {

int ExitCode(gendet::ErrorKind kind) {
  switch (kind) {
    case gendet::ErrorKind::kInvalidArgument: return 2;
    case gendet::ErrorKind::kTrainingFailure: return 4;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detector training, robustness evaluation and survey tooling"};
  app.footer("Perturbation presets: " + gendet::cli::PresetList() +
             "\nExit codes: 0 ok, 2 usage, 3 data error, 4 training failure");
  app.require_subcommand(1);
  gendet::cli::AddDataCommands(app);
  gendet::cli::AddModelCommands(app);
  gendet::cli::AddSurveyCommands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const gendet::Error& e) {
    std::cerr << "gendet: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gendet: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
