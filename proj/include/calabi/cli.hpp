#pragma once

// Command-line front end shared by the `calabi` executable and the tests.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace calabi::cli {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

constexpr std::uint64_t kDefaultSeed = 42;

// args excludes the program name. Reports go to `out` (or --output),
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Every floating-point number rounded to 12 significant digits.
nlohmann::json rounded(const nlohmann::json& j);

// CALABI_SEED if set and valid, else the default.
std::uint64_t seed_from_environment();

}  // namespace calabi::cli
