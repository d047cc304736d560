#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace relia::cli {

enum class Verb { Validate, Absorbing, Solve, Evaluate, Oracle, Simulate };

struct Command {
    Verb verb = Verb::Validate;
    std::filesystem::path model_path;

    std::optional<std::filesystem::path> policy_path;
    std::optional<std::filesystem::path> initial_policy_path;
    std::optional<std::string> state;
    std::size_t horizon = 200;
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    double improve_eps = 1e-12;
    bool exact = false;
    std::uint64_t enum_cap = 1'000'000;
};

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Runs one verb. The JSON report goes to `out`, a short human summary to `err`.
int run(const Command& command, std::ostream& out, std::ostream& err);

/// Parses argv and runs it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relia::cli
