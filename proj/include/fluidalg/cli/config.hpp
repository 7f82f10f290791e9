#pragma once

#include "fluidalg/core_algebra.hpp"
#include "fluidalg/instances.hpp"
#include "fluidalg/integrators.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fluidalg::cli {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kSeedOverrideEnv = "FLUIDALG_SEED_OVERRIDE";

/// Names accepted in `instance.name`.
const std::vector<std::string>& instance_names();

/// Human-readable parameter schema for each built-in instance.
std::string instance_catalog();

/// A loaded run configuration. `effective` is the fully defaulted JSON that
/// every output embeds.
struct RunConfig {
    ordered_json effective;
    std::filesystem::path base_dir;  // for relative paths in the config

    std::string instance_name() const;
    IntegratorSpec integrator() const;
    std::filesystem::path output_dir() const;
    bool has_probe() const;
};

/// Applies `--set key=value` overrides (dotted paths; values parsed as JSON,
/// falling back to a plain string), fills defaults, then applies the seed
/// override from `seed_override` if present. Throws ConfigError.
RunConfig load_config(const ordered_json& user, const std::vector<std::string>& overrides,
                      std::optional<std::int64_t> seed_override, std::filesystem::path base_dir = {});

RunConfig load_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides,
                           std::optional<std::int64_t> seed_override);

/// Reads kSeedOverrideEnv. Throws ConfigError if set but not an integer.
std::optional<std::int64_t> seed_override_from_env();

/// A built instance and what is known about it.
struct Instance {
    std::string name;
    FluidAlgebra algebra;
    std::optional<TorusBasis> torus;
    /// Built from a Lie algebra with invariant pairing (Jacobi must hold).
    bool lie = false;
};

/// Builds the configured instance. Algebra-level failures propagate as
/// ValidationError / StructuralError / DataError; configuration problems
/// as ConfigError.
Instance build_instance(const RunConfig& config);

/// Resolves `initial_state` (stream 0) or `probe` (stream 1) to coordinates.
Vec resolve_state(const Instance& instance, const ordered_json& spec, std::uint64_t stream);

}  // namespace fluidalg::cli
