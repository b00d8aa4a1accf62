// Command-line front end: solves network files and runs the inclination,
// gravity-effect and first-integral studies. All tables go to --output (default stdout).

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gasflow/io.hpp"
#include "gasflow/studies.hpp"
#include "gasflow/synthetic.hpp"

namespace {

using namespace gasflow;
using nlohmann::json;

constexpr int kExitNonConvergence = 2;
constexpr int kExitInput = 3;

struct ModelFlags {
    std::string eos;  // empty: as in the file
    bool no_gravity = false;
    bool no_inertia = false;
    double tol = 1e-8;
    int max_iter = 50;
    std::string init = "collocation";
    std::string initial;  // solution file for --init file
    bool lenient = false;
};

struct OutputFlags {
    std::string path;
    std::string format = "csv";
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--eos", f.eos, "equation of state (ideal or cnga); overrides the file")
        ->check(CLI::IsMember({"ideal", "cnga"}));
    cmd->add_flag("--no-gravity", f.no_gravity, "drop the gravity term");
    cmd->add_flag("--no-inertia", f.no_inertia, "drop the inertia term");
    cmd->add_option("--tol", f.tol, "Newton tolerance on the max-norm residual")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", f.max_iter, "Newton iteration limit")->check(CLI::PositiveNumber);
    cmd->add_option("--init", f.init, "initial guess")->check(CLI::IsMember({"collocation", "flat", "file"}));
    cmd->add_option("--initial", f.initial, "solution file used with --init file");
    cmd->add_flag("--lenient", f.lenient, "report validation errors as warnings");
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
    cmd->add_option("--output,-o", f.path, "output file (default stdout)");
    cmd->add_option("--format", f.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

class Output {
public:
    explicit Output(const OutputFlags& flags) : format_(parse_output_format(flags.format)) {
        if (!flags.path.empty()) {
            file_ = std::make_unique<std::ofstream>(flags.path);
            if (!*file_) throw ConfigError("cannot write '" + flags.path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    OutputFormat format() const { return format_; }

private:
    OutputFormat format_;
    std::unique_ptr<std::ofstream> file_;
};

/// A table rendered as a "# table:" CSV block or a JSON array of objects.
struct Table {
    std::string name;
    std::vector<std::string> header;  // with unit annotations
    std::vector<std::vector<std::string>> rows;
};

std::string json_key(const std::string& column) {
    std::string k;
    for (char c : column) {
        if (c == '[') k += '_';
        else if (c == ']') continue;
        else if (c == '/' || c == '-') k += '_';
        else k += c;
    }
    while (!k.empty() && k.back() == '_') k.pop_back();
    return k;
}

void emit(std::ostream& os, OutputFormat format, const std::vector<Table>& tables) {
    if (format == OutputFormat::Json) {
        json j = json::object();
        for (const auto& t : tables) {
            json rows = json::array();
            for (const auto& r : t.rows) {
                json row = json::object();
                for (std::size_t c = 0; c < t.header.size(); ++c) {
                    char* end = nullptr;
                    const double v = std::strtod(r[c].c_str(), &end);
                    if (!r[c].empty() && *end == '\0' && std::isfinite(v)) row[json_key(t.header[c])] = v;
                    else row[json_key(t.header[c])] = r[c];
                }
                rows.push_back(row);
            }
            j[t.name] = rows;
        }
        os << j.dump(2) << "\n";
        return;
    }
    bool first = true;
    for (const auto& t : tables) {
        if (!first) os << "\n";
        first = false;
        os << "# table: " << t.name << "\n";
        for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
        os << "\n";
        for (const auto& r : t.rows) {
            for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
            os << "\n";
        }
    }
}

void emit(Output& out, const std::vector<Table>& tables) {
    emit(out.stream(), out.format(), tables);
}

Table report_table(const SolveReport& report, const std::string& name = "report") {
    Table t{name, {"key", "value"}, {}};
    for (const auto& [k, v] : report_fields(report)) t.rows.push_back({k, v});
    return t;
}

std::string num(double v) {
    return format_double(v);
}

struct Loaded {
    NetworkDocument doc;
    EosModel eos;
    SolveOptions options;
};

Loaded load(const std::string& path, const ModelFlags& flags) {
    Loaded l{read_network(path, flags.lenient), EosModel::from_parameters({}), {}};
    for (const auto& d : l.doc.diagnostics) {
        std::cerr << (d.severity == Severity::Error ? "error" : "warning") << ": " << to_string(d.code) << " ("
                  << d.entity << "): " << d.message << "\n";
    }
    EosParameters params = l.doc.eos;
    if (!flags.eos.empty()) params.kind = parse_eos_kind(flags.eos);
    l.eos = EosModel::from_parameters(params);
    l.options.tol = flags.tol;
    l.options.max_iter = flags.max_iter;
    l.options.physics.gravity = !flags.no_gravity;
    l.options.physics.inertia = !flags.no_inertia;
    l.options.init = parse_init_mode(flags.init);
    l.options.nominal = l.doc.nominal;
    return l;
}

// Reorders a solution read from disk into the slot order of `net`.
FlowState state_from_solution(const Network& net, const NetworkSolution& s) {
    FlowState st;
    st.units = Units::SI;
    for (const auto& n : net.nodes()) st.pressure.push_back(s.node_pressure(n.id));
    for (std::size_t e = 0; e < net.edges().size(); ++e) st.flow.push_back(s.edge_flow(net.edge_id(e)));
    st.injection = nodal_injections(net, st.flow);
    return st;
}

SolveResult run_solve(const Loaded& l, const ModelFlags& flags) {
    std::optional<FlowState> initial;
    if (l.options.init == InitMode::Given) {
        if (flags.initial.empty()) throw ConfigError("--init file needs --initial <solution file>");
        initial = state_from_solution(l.doc.network, read_solution(flags.initial).solution);
    }
    auto result = solve_network(l.doc.network, l.eos, l.options, initial);
    for (const auto& w : result.report.warnings) {
        std::cerr << "warning: " << to_string(w.code) << " (" << w.entity << "): " << w.message << "\n";
    }
    return result;
}

std::vector<Table> group_tables(const Network& net, const EosModel& eos, const NominalOverrides& nominal) {
    const auto scales = scales_for(net, eos, nominal);
    const auto g = groups(scales);
    Table s{"groups",
            {"L0[m]", "v0[m/s]", "p0[Pa]", "rho0[kg/m^3]", "c0[m/s]", "f0[kg/s]", "M[-]", "Eu[-]", "Fr[-]"},
            {{num(scales.length), num(scales.velocity), num(scales.pressure), num(scales.density),
              num(scales.sound_speed), num(scales.mass_flow), num(g.mach), num(g.euler), num(g.froude)}}};
    Table p{"pipe_groups", {"id", "R1[-]", "R2[-]", "beta[-]", "sin_theta[-]"}, {}};
    const Network nd = nondimensionalize(net, scales);
    for (std::size_t k = 0; k < nd.pipes().size(); ++k) {
        const auto& pipe = nd.pipes()[k];
        const auto pg = groups_for_pipe(scales, pipe.area, pipe.diameter, pipe.friction);
        p.rows.push_back({pipe.id, num(pg.r1), num(pg.r2), num(pg.beta), num(nd.sin_theta(k))});
    }
    return {s, p};
}

std::vector<double> parse_angles(const std::string& text) {
    if (text.empty()) return default_sweep_angles();
    std::vector<double> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad angle '" + item + "'");
        }
    }
    for (double a : out) {
        if (!(std::abs(a) <= 90.0)) throw ConfigError("angles must lie in [-90, 90] degrees");
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state gas network solver with inertia and gravity"};
    app.require_subcommand(1);

    ModelFlags model;
    OutputFlags output;
    std::string network_path;
    bool print_groups = false;

    auto* solve = app.add_subcommand("solve", "solve a network file");
    solve->add_option("network", network_path, "network file")->required();
    bool profiles = false;
    solve->add_flag("--profiles", profiles, "include along-pipe pressure tables");
    solve->add_flag("--print-groups", print_groups, "append the nondimensional groups");
    add_model_flags(solve, model);
    add_output_flags(solve, output);

    auto* validate_cmd = app.add_subcommand("validate", "first-integral residuals of the two solver stages");
    validate_cmd->add_option("network", network_path, "network file (ideal EoS, horizontal pipes)")->required();
    std::string solution_path;
    validate_cmd->add_option("--solution", solution_path, "also evaluate this solution file");
    add_model_flags(validate_cmd, model);
    add_output_flags(validate_cmd, output);

    auto* sweep = app.add_subcommand("sweep-incline", "outlet pressure of a single pipe versus inclination");
    SinglePipe pipe;
    std::string angles;
    std::string sweep_eos = "both";
    sweep->add_option("--length", pipe.length, "pipe length [m]")->capture_default_str();
    sweep->add_option("--diameter", pipe.diameter, "pipe diameter [m]")->capture_default_str();
    sweep->add_option("--friction", pipe.friction, "friction factor")->capture_default_str();
    sweep->add_option("--inlet-pressure", pipe.inlet_pressure, "inlet pressure [Pa]")->capture_default_str();
    sweep->add_option("--flow", pipe.flow, "mass flow [kg/s]")->capture_default_str();
    sweep->add_option("--angles", angles, "comma-separated angles in degrees (default -4:0.5:4)");
    sweep->add_option("--eos", sweep_eos, "ideal, cnga or both")->check(CLI::IsMember({"ideal", "cnga", "both"}));
    sweep->add_option("--tol", model.tol, "Newton tolerance")->check(CLI::PositiveNumber);
    add_output_flags(sweep, output);

    auto* gravity = app.add_subcommand("gravity-effect", "nodal pressure change caused by gravity");
    gravity->add_option("network", network_path, "network file")->required();
    std::size_t bins = 20;
    gravity->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
    add_model_flags(gravity, model);
    add_output_flags(gravity, output);

    auto* profile = app.add_subcommand("pipe-profile", "pressure and sensitivities along a single pipe");
    SinglePipe ppipe;
    double angle = 0.0;
    std::string profile_eos = "ideal";
    profile->add_option("--length", ppipe.length, "pipe length [m]")->capture_default_str();
    profile->add_option("--diameter", ppipe.diameter, "pipe diameter [m]")->capture_default_str();
    profile->add_option("--friction", ppipe.friction, "friction factor")->capture_default_str();
    profile->add_option("--inlet-pressure", ppipe.inlet_pressure, "inlet pressure [Pa]")->capture_default_str();
    profile->add_option("--flow", ppipe.flow, "mass flow [kg/s]")->capture_default_str();
    profile->add_option("--angle", angle, "inclination [deg], positive downhill")->check(CLI::Range(-90.0, 90.0));
    profile->add_option("--eos", profile_eos, "ideal or cnga")->check(CLI::IsMember({"ideal", "cnga"}));
    profile->add_flag("--no-gravity", model.no_gravity, "drop the gravity term");
    profile->add_flag("--no-inertia", model.no_inertia, "drop the inertia term");
    add_output_flags(profile, output);

    auto* info = app.add_subcommand("info", "network statistics and diagnostics");
    info->add_option("network", network_path, "network file")->required();
    info->add_flag("--print-groups", print_groups, "append the nondimensional groups");
    info->add_option("--eos", model.eos, "equation of state for the groups")->check(CLI::IsMember({"ideal", "cnga"}));
    add_output_flags(info, output);

    auto* generate = app.add_subcommand("generate", "write a synthetic network file");
    SyntheticOptions syn;
    generate->add_option("--nodes", syn.nodes, "node count")->capture_default_str();
    generate->add_option("--chords", syn.chord_fraction, "chords per tree edge")->capture_default_str();
    generate->add_option("--compressors", syn.compressors, "compressor count")->capture_default_str();
    generate->add_flag("--elevations", syn.elevations, "attach elevations in [0, 3000] m");
    generate->add_option("--seed", syn.seed, "random seed")->capture_default_str();
    generate->add_option("--slack-pressure", syn.slack_pressure, "slack pressure [Pa]")->capture_default_str();
    std::string generate_eos = "ideal";
    generate->add_option("--eos", generate_eos, "EoS written to the file")->check(CLI::IsMember({"ideal", "cnga"}));
    generate->add_option("--output,-o", output.path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*solve) {
            Loaded l = load(network_path, model);
            l.options.profiles = profiles;
            const auto result = run_solve(l, model);
            Output out(output);
            write_solution(out.stream(), result.solution, result.report, out.format());
            if (print_groups) {
                // Kept off the solution stream so the solution file stays parseable.
                emit(std::cerr, out.format(), group_tables(l.doc.network, l.eos, l.options.nominal));
            }
        } else if (*validate_cmd) {
            Loaded l = load(network_path, model);
            require_ideal_horizontal(l.doc.network, l.eos);
            const auto table = validate_first_integrals(l.doc.network, l.eos, l.options);
            std::vector<Table> tables;
            tables.push_back({"first_integral_residuals",
                              {"network", "no_inertia_collocation[-]", "no_inertia_ode[-]",
                               "inertia_collocation[-]", "inertia_ode[-]"},
                              {{l.doc.network.name(), num(table.no_inertia_collocation), num(table.no_inertia_ode),
                                num(table.inertia_collocation), num(table.inertia_ode)}}});
            if (!solution_path.empty()) {
                const auto sol = read_solution(solution_path);
                const auto state = state_from_solution(l.doc.network, sol.solution);
                const auto r = first_integral_residuals(l.doc.network, l.eos, state, l.options.nominal);
                tables.push_back({"supplied_solution_residuals",
                                  {"solution", "no_inertia[-]", "inertia[-]"},
                                  {{solution_path, num(r.no_inertia), num(r.inertia)}}});
            }
            Output out(output);
            emit(out, tables);
        } else if (*sweep) {
            SweepOptions so;
            so.angles_deg = parse_angles(angles);
            if (sweep_eos != "both") so.eos = {parse_eos_kind(sweep_eos)};
            so.solve.tol = model.tol;
            const auto rows = sweep_incline(pipe, so);
            Table t{"sweep",
                    {"angle[deg]", "eos", "inertia", "p_out[Pa]", "relative_change[-]", "error"},
                    {}};
            for (const auto& r : rows) {
                t.rows.push_back({num(r.angle_deg), std::string(to_string(r.eos)), r.inertia ? "true" : "false",
                                  num(r.outlet_pressure), num(r.relative_change), r.error});
            }
            Output out(output);
            emit(out, {t});
        } else if (*gravity) {
            Loaded l = load(network_path, model);
            const auto effect = gravity_effect(l.doc.network, l.eos, l.options, bins);
            Table nodes{"nodes", {"id", "p_gravity[Pa]", "p_no_gravity[Pa]", "relative_difference[-]"}, {}};
            for (const auto& n : effect.nodes) {
                nodes.rows.push_back({n.node_id, num(n.with_gravity), num(n.without_gravity), num(n.relative)});
            }
            Table hist{"histogram", {"lower[-]", "upper[-]", "count", "density[-]", "cdf[-]"}, {}};
            for (const auto& b : effect.histogram) {
                hist.rows.push_back({num(b.lower), num(b.upper), std::to_string(b.count), num(b.density), num(b.cdf)});
            }
            Output out(output);
            emit(out, {nodes, hist, report_table(effect.with_gravity, "report_gravity"),
                       report_table(effect.without_gravity, "report_no_gravity")});
        } else if (*profile) {
            EosParameters params;
            params.kind = parse_eos_kind(profile_eos);
            const EosModel eos = EosModel::from_parameters(params);
            const double s = angle == 0.0 ? 0.0 : std::sin(angle * std::numbers::pi / 180.0);
            const Network net = single_pipe_network(ppipe, s);
            const auto scales = scales_for(net, eos);
            const Network nd = nondimensionalize(net, scales);
            const auto& p = nd.pipes()[0];
            const auto geom = make_pipe_geometry(scales, p.length, p.diameter, p.area, p.friction, nd.sin_theta(0));
            const FlowModel fm{ScaledEos(eos, scales), PhysicsOptions{!model.no_inertia, !model.no_gravity}};
            const auto sol = integrate_with_sensitivities(ppipe.inlet_pressure / scales.pressure,
                                                          ppipe.flow / scales.mass_flow, geom, fm);
            Table t{"profile", {"x[m]", "p[Pa]", "s_p[-]", "s_f[Pa/(kg/s)]"}, {}};
            for (std::size_t i = 0; i < sol.x.size(); ++i) {
                t.rows.push_back({num(sol.x[i] * scales.length), num(sol.p[i] * scales.pressure), num(sol.s_p[i]),
                                  num(sol.s_f[i] * scales.pressure / scales.mass_flow)});
            }
            Output out(output);
            emit(out, {t});
        } else if (*info) {
            ModelFlags lenient = model;
            lenient.lenient = true;
            Loaded l = load(network_path, lenient);
            const auto st = statistics(l.doc.network);
            Table t{"statistics", {"key", "value"},
                    {{"name", l.doc.network.name()},
                     {"nodes", std::to_string(st.nodes)},
                     {"slack_nodes", std::to_string(st.slack_nodes)},
                     {"pipes", std::to_string(st.pipes)},
                     {"compressors", std::to_string(st.compressors)},
                     {"total_pipe_length[m]", num(st.total_pipe_length)},
                     {"longest_pipe[m]", num(st.longest_pipe)},
                     {"unknowns", std::to_string(st.unknowns)},
                     {"equations", std::to_string(st.equations)}}};
            Table d{"diagnostics", {"severity", "code", "entity", "message"}, {}};
            for (const auto& diag : l.doc.diagnostics) {
                d.rows.push_back({diag.severity == Severity::Error ? "error" : "warning", to_string(diag.code),
                                  diag.entity, diag.message});
            }
            std::vector<Table> tables{t, d};
            if (print_groups) {
                for (auto& g : group_tables(l.doc.network, l.eos, l.options.nominal)) tables.push_back(g);
            }
            Output out(output);
            emit(out, tables);
            if (has_errors(l.doc.diagnostics)) return kExitInput;
        } else if (*generate) {
            NetworkDocument doc;
            doc.network = generate_network(syn);
            doc.eos.kind = parse_eos_kind(generate_eos);
            if (output.path.empty()) write_network(std::cout, doc);
            else write_network(output.path, doc);
        }
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const PipeIntegrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const ValidationFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
