#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mmfe/format.hpp"
#include "mmfe/io.hpp"

namespace fs = std::filesystem;
using namespace mmfe;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

struct ConfigOverrides {
    std::string config_path;
    int month = -1;
    double h = -1, tau = -1, omega = -1, T = -1, amplitude = -1;
    std::string out;
    bool has_month = false, has_h = false, has_tau = false, has_omega = false, has_T = false,
         has_amplitude = false, has_out = false;
};

void add_override_flags(CLI::App* cmd, ConfigOverrides& ov) {
    cmd->add_option("--config", ov.config_path, "JSON config file");
    cmd->add_option("--month", ov.month, "growth month (0,2,...,22)")
        ->each([&](const std::string&) { ov.has_month = true; });
    cmd->add_option("--h", ov.h, "mesh size, mm")->each([&](const std::string&) {
        ov.has_h = true;
    });
    cmd->add_option("--tau", ov.tau, "time step")->each([&](const std::string&) {
        ov.has_tau = true;
    });
    cmd->add_option("--omega", ov.omega, "source angular frequency")
        ->each([&](const std::string&) { ov.has_omega = true; });
    cmd->add_option("--T", ov.T, "final time")->each([&](const std::string&) {
        ov.has_T = true;
    });
    cmd->add_option("--amplitude", ov.amplitude, "source amplitude")
        ->each([&](const std::string&) { ov.has_amplitude = true; });
    cmd->add_option("--out", ov.out, "output directory")->each([&](const std::string&) {
        ov.has_out = true;
    });
}

// Config file overrides built-in defaults; command-line flags override both.
SimulationConfig resolve_config(const ConfigOverrides& ov) {
    SimulationConfig cfg;
    if (!ov.config_path.empty()) {
        cfg = read_config(ov.config_path);
    } else if (!ov.has_month) {
        throw ConfigError("month is required (--month or a config file)");
    }
    if (ov.has_month) cfg.month = ov.month;
    if (ov.has_h) cfg.h = ov.h;
    if (ov.has_tau) cfg.tau = ov.tau;
    if (ov.has_omega) cfg.omega = ov.omega;
    if (ov.has_T) cfg.T_final = ov.T;
    if (ov.has_amplitude) cfg.amplitude = ov.amplitude;
    if (ov.has_out) cfg.out_dir = ov.out;
    cfg.validate();
    return cfg;
}

int cmd_mesh(int month, double h, const fs::path& out) {
    const SkinPhantom phantom = make_phantom(month);
    const TetraMesh mesh = build_box_mesh({{0, 0, 0}, {10, 10, 10}}, h);
    const MaterialField field = assign_materials(mesh, phantom);
    const MeshStats stats = mesh_stats(mesh, field);

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());

    export_vtk(mesh, field, nullptr, out / "mesh.vtk", "melanoma phantom month " +
                                                            std::to_string(month));
    write_mesh_stats(stats, month, h, out / "stats.json");

    std::cout << "mesh: " << stats.node_count << " nodes, " << stats.tet_count << " tets, volume "
              << format_shortest(stats.total_volume) << " mm^3\n";
    std::cout << "wrote " << (out / "mesh.vtk").string() << " and "
              << (out / "stats.json").string() << '\n';
    return 0;
}

int cmd_simulate(const SimulationConfig& cfg) {
    const RunResult result = run_simulation(cfg);
    std::cout << "simulate month " << cfg.month << ": " << result.steps << " steps, max|E| = "
              << format_shortest(result.max_field) << ", wall " << std::fixed
              << result.wall_seconds << " s\n";
    std::cout << "record written to " << cfg.out_dir.string() << '\n';
    return 0;
}

int cmd_sweep(const std::vector<int>& months, const SimulationConfig& base, int jobs) {
    std::vector<SimulationConfig> configs;
    for (int m : months) {
        SimulationConfig cfg = base;
        cfg.month = m;
        char sub[16];
        std::snprintf(sub, sizeof(sub), "month_%02d", m);
        cfg.out_dir = base.out_dir / sub;
        cfg.validate();
        configs.push_back(cfg);
    }

    std::vector<RunResult> results(configs.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                results[i] = run_simulation(configs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    const auto matrix_path = base.out_dir / "l2_matrix.csv";
    std::ofstream out(matrix_path);
    if (!out) throw IoError("cannot open " + matrix_path.string() + " for writing");
    out << "month";
    for (int m : months) out << ',' << m;
    out << '\n';
    for (std::size_t a = 0; a < months.size(); ++a) {
        out << months[a];
        for (std::size_t b = 0; b < months.size(); ++b)
            out << ',' << format_double(relative_l2(results[a].record, results[b].record));
        out << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for " + matrix_path.string());

    for (std::size_t i = 0; i < months.size(); ++i)
        std::cout << "month " << months[i] << ": " << results[i].steps << " steps, max|E| = "
                  << format_shortest(results[i].max_field) << '\n';
    std::cout << "difference matrix written to " << matrix_path.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward simulator for microwave backscatter from melanoma skin phantoms"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    // mesh
    auto* mesh_cmd = app.add_subcommand("mesh", "build a phantom mesh and write VTK + stats");
    mesh_cmd->set_help_flag("--help", "print help");
    int mesh_month = -1;
    double mesh_h = 0.5;
    std::string mesh_out = "out";
    mesh_cmd->add_option("--month", mesh_month, "growth month (0,2,...,22)")->required();
    mesh_cmd->add_option("--h", mesh_h, "mesh size, mm");
    mesh_cmd->add_option("--out", mesh_out, "output directory");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run the hybrid forward simulation");
    sim_cmd->set_help_flag("--help", "print help");
    ConfigOverrides sim_ov;
    add_override_flags(sim_cmd, sim_ov);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run several months and a difference matrix");
    sweep_cmd->set_help_flag("--help", "print help");
    ConfigOverrides sweep_ov;
    add_override_flags(sweep_cmd, sweep_ov);
    std::vector<int> sweep_months(kTabulatedMonths.begin(), kTabulatedMonths.end());
    sweep_cmd->add_option("--months", sweep_months, "comma-separated month list")
        ->delimiter(',');
    int sweep_jobs = 1;
    sweep_cmd->add_option("--jobs", sweep_jobs, "run months concurrently");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    if (mesh_cmd->parsed())
        return run_guarded([&] { return cmd_mesh(mesh_month, mesh_h, mesh_out); });
    if (sim_cmd->parsed())
        return run_guarded([&] { return cmd_simulate(resolve_config(sim_ov)); });
    if (sweep_cmd->parsed())
        return run_guarded([&] {
            if (!sweep_ov.has_month && sweep_ov.config_path.empty()) sweep_ov.has_month = true,
                                                                     sweep_ov.month = 0;
            SimulationConfig base = resolve_config(sweep_ov);
            if (sweep_jobs < 1) throw ConfigError("--jobs must be >= 1");
            return cmd_sweep(sweep_months, base, sweep_jobs);
        });
    return kExitConfig;
}
