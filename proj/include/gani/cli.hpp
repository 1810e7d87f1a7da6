#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gani {

// Runs the command-line tool on `args` (program name excluded). Normal output
// goes to `out`; failures print one line `error: <kind>: <message>` to `err`.
// Returns 0 on success, 2 for usage errors and 1 for everything else.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

// Accepts a manifest file, a directory holding manifest.json, or a bare name
// looked up as $GANI_DATA_DIR/<name>/manifest.json.
std::filesystem::path resolve_dataset(const std::string& spec);

}  // namespace gani
