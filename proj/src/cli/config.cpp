#include "fluidalg/cli/config.hpp"

#include "fluidalg/algebra_io.hpp"
#include "fluidalg/errors.hpp"
#include "fluidalg/rng.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fluidalg::cli {

const std::vector<std::string>& instance_names() {
    static const std::vector<std::string> names{"rigid-body", "so3", "torus", "random", "custom"};
    return names;
}

std::string instance_catalog() {
    return "rigid-body  moments: [I1, I2, I3] (default [1, 2, 3]); presets axis1, axis2, axis3\n"
           "so3         no parameters (cross product, identity pairing and metric)\n"
           "torus       K: cutoff |k|_inf <= K (default 1), max_dim: size cap (default 512); preset beltrami\n"
           "random      seed: integer (default 1), n: dimension (default 5)\n"
           "custom      path: JSON algebra file with keys dim, triple, linking, metric\n";
}

namespace {

ordered_json default_instance(const std::string& name) {
    if (name == "rigid-body") return {{"name", name}, {"moments", {1.0, 2.0, 3.0}}};
    if (name == "so3") return {{"name", name}};
    if (name == "torus") return {{"name", name}, {"K", 1}, {"max_dim", kDefaultTorusMaxDim}};
    if (name == "random") return {{"name", name}, {"seed", 1}, {"n", 5}};
    if (name == "custom") return {{"name", name}, {"path", ""}};
    throw ConfigError("unknown instance '" + name + "' (see `fluidalg instances`)");
}

ordered_json default_integrator() {
    return {{"method", "rk4"},
            {"dt", 1e-3},
            {"t_end", 1.0},
            {"record_every", 1},
            {"projection", {{"max_iter", 10}, {"tol", 1e-12}}}};
}

ordered_json default_diagnostics() { return {{"seed", 1}, {"samples", 50}}; }

// Recursively fills keys missing from `target` with values from `defaults`,
// keeping the defaults' key order first.
ordered_json merged(const ordered_json& defaults, const ordered_json& user) {
    if (!defaults.is_object() || !user.is_object()) return user;
    ordered_json out = ordered_json::object();
    for (const auto& [key, value] : defaults.items()) {
        out[key] = user.contains(key) ? merged(value, user.at(key)) : value;
    }
    for (const auto& [key, value] : user.items()) {
        if (!out.contains(key)) out[key] = value;
    }
    return out;
}

void apply_override(ordered_json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' must have the form key.path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    ordered_json value;
    try {
        value = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;
    }
    ordered_json* node = &doc;
    std::stringstream parts(path);
    std::string part;
    std::vector<std::string> keys;
    while (std::getline(parts, part, '.')) {
        if (part.empty()) throw ConfigError("override path '" + path + "' has an empty component");
        keys.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        if (!node->is_object()) throw ConfigError("override path '" + path + "' runs through a non-object");
        if (!node->contains(keys[i]) || !(*node)[keys[i]].is_object()) (*node)[keys[i]] = ordered_json::object();
        node = &(*node)[keys[i]];
    }
    (*node)[keys.back()] = std::move(value);
}

template <typename T>
T get_as(const ordered_json& doc, const std::string& key, const char* where) {
    if (!doc.contains(key)) throw ConfigError(std::string(where) + "." + key + " is missing");
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string(where) + "." + key + " has the wrong type");
    }
}

bool is_seeded_state(const ordered_json& s) { return s.is_object() && s.contains("seed"); }

void check_state_spec(const ordered_json& s, const char* key) {
    if (s.is_array() || s.is_string()) return;
    if (s.is_object()) {
        for (const auto& [k, v] : s.items()) {
            if (k != "seed" && k != "norm") {
                throw ConfigError(std::string(key) + " has unknown field '" + k + "' (expected seed, norm)");
            }
        }
        if (!s.contains("seed")) throw ConfigError(std::string(key) + " object form requires a seed");
        return;
    }
    throw ConfigError(std::string(key) +
                      " must be a coordinate list, a preset name, or an object {\"seed\": s, \"norm\": r}");
}

}  // namespace

std::optional<std::int64_t> seed_override_from_env() {
    const char* raw = std::getenv(kSeedOverrideEnv);
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const long long v = std::strtoll(raw, &end, 10);
    if (*end != '\0') throw ConfigError(std::string(kSeedOverrideEnv) + " must be an integer");
    return v;
}

RunConfig load_config(const ordered_json& user_in, const std::vector<std::string>& overrides,
                      std::optional<std::int64_t> seed_override, std::filesystem::path base_dir) {
    if (!user_in.is_object()) throw ConfigError("config must be a JSON object");
    ordered_json user = user_in;
    for (const auto& o : overrides) apply_override(user, o);

    if (!user.contains("instance")) throw ConfigError("config is missing 'instance'");
    ordered_json instance = user.at("instance");
    if (instance.is_string()) instance = ordered_json{{"name", instance}};
    if (!instance.is_object() || !instance.contains("name") || !instance.at("name").is_string()) {
        throw ConfigError("instance must be an object with a string 'name'");
    }
    const std::string name = instance.at("name").get<std::string>();

    ordered_json eff = ordered_json::object();
    eff["instance"] = merged(default_instance(name), instance);
    eff["initial_state"] = user.contains("initial_state") ? user.at("initial_state") : ordered_json(nullptr);
    eff["integrator"] = merged(default_integrator(), user.value("integrator", ordered_json::object()));
    eff["probe"] = user.contains("probe") ? user.at("probe") : ordered_json(nullptr);
    eff["output_dir"] = user.value("output_dir", std::string("."));
    eff["diagnostics"] = merged(default_diagnostics(), user.value("diagnostics", ordered_json::object()));
    for (const auto& [key, value] : user.items()) {
        if (!eff.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    if (!eff["initial_state"].is_null()) check_state_spec(eff["initial_state"], "initial_state");
    if (!eff["probe"].is_null()) check_state_spec(eff["probe"], "probe");

    if (seed_override) {
        if (name == "random") eff["instance"]["seed"] = *seed_override;
        if (is_seeded_state(eff["initial_state"])) eff["initial_state"]["seed"] = *seed_override;
        if (is_seeded_state(eff["probe"])) eff["probe"]["seed"] = *seed_override;
        eff["diagnostics"]["seed"] = *seed_override;
    }
    if (is_seeded_state(eff["initial_state"]) && !eff["initial_state"].contains("norm")) {
        eff["initial_state"]["norm"] = 1.0;
    }
    if (is_seeded_state(eff["probe"]) && !eff["probe"].contains("norm")) eff["probe"]["norm"] = 1.0;

    RunConfig cfg{std::move(eff), std::move(base_dir)};
    cfg.integrator().validate();
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides,
                           std::optional<std::int64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    ordered_json user;
    try {
        user = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return load_config(user, overrides, seed_override, path.parent_path());
}

std::string RunConfig::instance_name() const { return effective.at("instance").at("name").get<std::string>(); }

IntegratorSpec RunConfig::integrator() const {
    const auto& j = effective.at("integrator");
    IntegratorSpec spec;
    spec.method = parse_method(get_as<std::string>(j, "method", "integrator"));
    spec.dt = get_as<double>(j, "dt", "integrator");
    spec.t_end = get_as<double>(j, "t_end", "integrator");
    spec.record_every = get_as<int>(j, "record_every", "integrator");
    const auto& p = j.at("projection");
    spec.projection.max_iter = get_as<int>(p, "max_iter", "integrator.projection");
    spec.projection.tol = get_as<double>(p, "tol", "integrator.projection");
    return spec;
}

std::filesystem::path RunConfig::output_dir() const {
    if (!effective.at("output_dir").is_string()) throw ConfigError("output_dir must be a string");
    return effective.at("output_dir").get<std::string>();
}

bool RunConfig::has_probe() const { return !effective.at("probe").is_null(); }

Instance build_instance(const RunConfig& config) {
    const auto& j = config.effective.at("instance");
    const std::string name = config.instance_name();
    if (name == "rigid-body") {
        const auto moments = get_as<std::vector<double>>(j, "moments", "instance");
        if (moments.size() != 3) throw ConfigError("instance.moments must have three entries");
        return {name, rigid_body(moments[0], moments[1], moments[2]), std::nullopt, true};
    }
    if (name == "so3") return {name, from_lie_algebra(so3_input()), std::nullopt, true};
    if (name == "torus") {
        const int k = get_as<int>(j, "K", "instance");
        const int cap = get_as<int>(j, "max_dim", "instance");
        if (k < 1) throw ConfigError("instance.K must be >= 1");
        TorusAlgebra t = [&] {
            try {
                return build_torus_algebra(k, cap);
            } catch (const SizeError& e) {
                throw ConfigError(e.what());
            }
        }();
        return {name, std::move(t.algebra), std::move(t.basis), false};
    }
    if (name == "random") {
        const auto seed = get_as<std::int64_t>(j, "seed", "instance");
        const int n = get_as<int>(j, "n", "instance");
        if (n < 1) throw ConfigError("instance.n must be >= 1");
        return {name, random_algebra(static_cast<std::uint64_t>(seed), n), std::nullopt, false};
    }
    if (name == "custom") {
        std::filesystem::path path = get_as<std::string>(j, "path", "instance");
        if (path.empty()) throw ConfigError("instance.path is required for custom algebras");
        if (path.is_relative() && !config.base_dir.empty()) path = config.base_dir / path;
        if (!std::filesystem::exists(path)) throw ConfigError("algebra file " + path.string() + " does not exist");
        return {name, FluidAlgebra::create(read_algebra_file(path)), std::nullopt, false};
    }
    throw ConfigError("unknown instance '" + name + "'");
}

Vec resolve_state(const Instance& instance, const ordered_json& spec, std::uint64_t stream) {
    const FluidAlgebra& alg = instance.algebra;
    const int n = alg.dim();
    if (spec.is_array()) {
        Vec x(n);
        if (spec.size() != static_cast<std::size_t>(n)) {
            throw ConfigError("state has " + std::to_string(spec.size()) + " coordinates, algebra has dim " +
                              std::to_string(n));
        }
        for (int i = 0; i < n; ++i) {
            if (!spec[i].is_number()) throw ConfigError("state coordinates must be numbers");
            x[i] = spec[i].get<double>();
        }
        if (!x.allFinite()) throw ConfigError("state coordinates must be finite");
        return x;
    }
    if (spec.is_string()) {
        const std::string preset = spec.get<std::string>();
        if (preset.rfind("axis", 0) == 0 && preset.size() > 4) {
            const int axis = std::atoi(preset.c_str() + 4);
            if (axis < 1 || axis > n) throw ConfigError("preset '" + preset + "' needs dim >= " + preset.substr(4));
            return Vec::Unit(n, axis - 1);
        }
        if (preset == "beltrami") {
            if (!instance.torus) throw ConfigError("preset 'beltrami' is only available for the torus instance");
            return torus_beltrami_state(*instance.torus);
        }
        throw ConfigError("unknown state preset '" + preset + "'");
    }
    if (spec.is_object()) {
        const auto seed = get_as<std::int64_t>(spec, "seed", "state");
        const double norm = get_as<double>(spec, "norm", "state");
        if (!(norm >= 0.0) || !std::isfinite(norm)) throw ConfigError("state norm must be finite and >= 0");
        Xoshiro256StarStar rng(derive_seed(static_cast<std::uint64_t>(seed), stream));
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.normal();
        return x * (norm / g_norm(alg, x));
    }
    throw ConfigError("state must be a coordinate list, a preset name, or {seed, norm}");
}

}  // namespace fluidalg::cli
