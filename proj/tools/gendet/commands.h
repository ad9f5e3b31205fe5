#ifndef GENDET_TOOLS_COMMANDS_H_
#define GENDET_TOOLS_COMMANDS_H_

#include <filesystem>
#include <string>

#include <CLI11.hpp>

namespace gendet::cli {

// Subcommands do their work in CLI11 callbacks; gendet::Error escapes to main.
void AddDataCommands(CLI::App& app);
void AddModelCommands(CLI::App& app);
void AddSurveyCommands(CLI::App& app);

// Creates `dir`; refuses a non-empty existing directory unless `force`.
void PrepareOutputDir(const std::filesystem::path& dir, bool force);

std::string PresetList();

}  // namespace gendet::cli

#endif  // GENDET_TOOLS_COMMANDS_H_
