#include "fluidalg/cli/commands.hpp"

#include "fluidalg/cli/config.hpp"
#include "fluidalg/cli/diagnostics.hpp"
#include "fluidalg/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>

#ifndef FLUIDALG_VERSION
#define FLUIDALG_VERSION "0.0.0"
#endif

namespace fluidalg::cli {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
    auto out = open_output(path);
    out << "t,energy,helicity,probe_linking\n";
    for (const auto& r : records) {
        out << format_double(r.t) << ',' << format_double(r.energy) << ',' << format_double(r.helicity) << ',';
        if (r.probe_linking) out << format_double(*r.probe_linking);
        out << '\n';
    }
}

void write_state_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& records, int dim) {
    auto out = open_output(path);
    out << 't';
    for (int i = 0; i < dim; ++i) out << ",x" << i;
    out << '\n';
    for (const auto& r : records) {
        out << format_double(r.t);
        for (int i = 0; i < dim; ++i) out << ',' << format_double(r.state[i]);
        out << '\n';
    }
}

ordered_json invariants_json(const TraceRecord& r) {
    ordered_json j;
    j["t"] = r.t;
    j["energy"] = r.energy;
    j["helicity"] = r.helicity;
    j["probe_linking"] = r.probe_linking ? ordered_json(*r.probe_linking) : ordered_json(nullptr);
    return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

// Maps library exceptions onto exit codes; everything about the algebra
// itself is a validation failure, everything about the run setup a config
// error.
int guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        log << "validation failure: " << e.what() << '\n';
        return kExitValidation;
    } catch (const StructuralError& e) {
        log << "validation failure: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DataError& e) {
        log << "validation failure: " << e.what() << '\n';
        return kExitValidation;
    } catch (const GenerationError& e) {
        log << "validation failure: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

std::vector<std::string> with_output(std::vector<std::string> overrides,
                                     const std::optional<std::filesystem::path>& output) {
    if (output) overrides.push_back("output_dir=" + ordered_json(output->string()).dump());
    return overrides;
}

}  // namespace

int cmd_simulate(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& output,
                 const std::vector<std::string>& overrides, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig config = load_config_file(config_path, with_output(overrides, output), seed_override_from_env());
        const Instance instance = build_instance(config);
        for (const auto& w : instance.algebra.warnings()) log << "warning: " << w << '\n';
        if (config.effective.at("initial_state").is_null()) throw ConfigError("config is missing 'initial_state'");

        Vec x0;
        std::optional<Vec> z0;
        try {
            x0 = resolve_state(instance, config.effective.at("initial_state"), 0);
            if (config.has_probe()) z0 = resolve_state(instance, config.effective.at("probe"), 1);
        } catch (const StructuralError& e) {
            throw ConfigError(e.what());
        }
        const IntegratorSpec spec = config.integrator();
        const IntegrationResult result = integrate(instance.algebra, x0, spec, z0);

        const std::filesystem::path dir = config.output_dir();
        std::filesystem::create_directories(dir);
        write_trace_csv(dir / "trace.csv", result.records);
        write_state_csv(dir / "state.csv", result.records, instance.algebra.dim());

        const TraceRecord& first = result.records.front();
        const TraceRecord& last = result.records.back();
        double max_de = 0.0, max_dh = 0.0, max_dl = 0.0;
        for (const auto& r : result.records) {
            max_de = std::max(max_de, std::abs(r.energy - first.energy));
            max_dh = std::max(max_dh, std::abs(r.helicity - first.helicity));
            if (r.probe_linking) max_dl = std::max(max_dl, std::abs(*r.probe_linking - *first.probe_linking));
        }
        ordered_json summary;
        summary["tool"] = "fluidalg";
        summary["version"] = FLUIDALG_VERSION;
        summary["config"] = config.effective;
        summary["dim"] = instance.algebra.dim();
        summary["initial"] = invariants_json(first);
        summary["final"] = invariants_json(last);
        summary["max_abs_energy_drift"] = max_de;
        summary["max_abs_helicity_drift"] = max_dh;
        summary["max_abs_probe_linking_drift"] = z0 ? ordered_json(max_dl) : ordered_json(nullptr);
        summary["steps"] = result.steps;
        summary["records"] = result.records.size();
        summary["projection_failures"] = result.projection_failures;
        summary["failed"] = result.failed;
        summary["failure"] = result.failed ? ordered_json{{"message", result.failure_message},
                                                          {"t", result.failure_time.value_or(0.0)}}
                                           : ordered_json(nullptr);
        summary["warnings"] = instance.algebra.warnings();
        write_json(dir / "summary.json", summary);

        if (result.failed) {
            log << "numerical failure: " << result.failure_message << '\n';
            return int(kExitNumerical);
        }
        return int(kExitOk);
    });
}

int cmd_diagnose(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& output,
                 std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig config = load_config_file(config_path, with_output({}, output), seed_override_from_env());
        const Instance instance = build_instance(config);
        const auto& d = config.effective.at("diagnostics");
        const auto seed = d.at("seed").get<std::int64_t>();
        const int samples = d.at("samples").get<int>();
        if (samples < 1) throw ConfigError("diagnostics.samples must be >= 1");

        const DiagnosticsReport report =
            run_diagnostics(instance.algebra, instance.lie, static_cast<std::uint64_t>(seed), samples);
        ordered_json j;
        j["tool"] = "fluidalg";
        j["version"] = FLUIDALG_VERSION;
        j["config"] = config.effective;
        const ordered_json body = report.to_json();
        for (const auto& [key, value] : body.items()) j[key] = value;

        const std::filesystem::path dir = config.output_dir();
        std::filesystem::create_directories(dir);
        write_json(dir / "diagnostics.json", j);
        for (const auto& r : report.identities) {
            log << (r.tolerance_bearing ? (r.pass ? "pass " : "FAIL ") : "info ") << r.name << " "
                << format_double(r.max_defect) << '\n';
        }
        return int(report.passed() ? kExitOk : kExitValidation);
    });
}

int cmd_instances(std::ostream& out) {
    out << instance_catalog();
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-dimensional fluid algebras: Euler flows, invariants and identity checks", "fluidalg"};
    app.require_subcommand(1);

    std::string sim_config;
    std::string sim_output;
    std::vector<std::string> sets;
    auto* simulate = app.add_subcommand("simulate", "Integrate the Euler flow and write trace/state/summary files");
    simulate->add_option("--config", sim_config, "Run configuration (JSON)")->required();
    simulate->add_option("--output", sim_output, "Output directory (overrides output_dir)");
    simulate->add_option("--set", sets, "Override a config value, e.g. integrator.dt=1e-3")->take_all();

    std::string diag_config;
    std::string diag_output;
    auto* diagnose = app.add_subcommand("diagnose", "Check every algebraic identity on seeded samples");
    diagnose->add_option("--config", diag_config, "Configuration naming an instance (JSON)")->required();
    diagnose->add_option("--output", diag_output, "Output directory (overrides output_dir)");

    auto* instances = app.add_subcommand("instances", "List built-in instances and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    auto opt_path = [](const std::string& s) {
        return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
    };
    if (simulate->parsed()) return cmd_simulate(sim_config, opt_path(sim_output), sets, err);
    if (diagnose->parsed()) return cmd_diagnose(diag_config, opt_path(diag_output), err);
    if (instances->parsed()) return cmd_instances(out);
    err << app.help();
    return kExitConfig;
}

}  // namespace fluidalg::cli
