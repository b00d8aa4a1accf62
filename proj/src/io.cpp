#include "gasflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>

namespace gasflow {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct Context {
    std::string source;
    int line = 0;

    [[noreturn]] void fail(const std::string& field, const std::string& message) const {
        throw ParseError(source, line, field, message);
    }

    double number(const std::string& text, const std::string& field) const {
        double v = 0.0;
        const auto* end = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
            fail(field, "expected a finite number, got '" + text + "'");
        }
        return v;
    }

    bool boolean(const std::string& text, const std::string& field) const {
        if (text == "true") return true;
        if (text == "false") return false;
        fail(field, "expected true or false, got '" + text + "'");
    }
};

// Column header "name[unit]" -> (name, factor to SI). Dimensional columns must carry a unit.
struct Column {
    std::string name;
    double factor = 1.0;
};

enum class Dim { None, Pressure, MassFlow, Length };

const std::map<std::string, std::map<std::string, Dim>>& table_columns() {
    static const std::map<std::string, std::map<std::string, Dim>> columns = {
        {"nodes", {{"id", Dim::None}, {"kind", Dim::None}, {"pressure", Dim::Pressure},
                   {"injection", Dim::MassFlow}, {"elevation", Dim::Length}}},
        {"pipes", {{"id", Dim::None}, {"from", Dim::None}, {"to", Dim::None}, {"length", Dim::Length},
                   {"diameter", Dim::Length}, {"friction", Dim::None}, {"sin_theta", Dim::None}}},
        {"compressors", {{"id", Dim::None}, {"from", Dim::None}, {"to", Dim::None}, {"ratio", Dim::None}}},
    };
    return columns;
}

double unit_factor(Dim dim, const std::string& unit, const Context& ctx, const std::string& column) {
    static const std::map<Dim, std::map<std::string, double>> units = {
        {Dim::Pressure, {{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"bar", 1e5}}},
        {Dim::MassFlow, {{"kg/s", 1.0}}},
        {Dim::Length, {{"m", 1.0}, {"km", 1e3}, {"mm", 1e-3}}},
    };
    if (dim == Dim::None) {
        if (!unit.empty() && unit != "-") ctx.fail(column, "column is dimensionless, unit '" + unit + "' not allowed");
        return 1.0;
    }
    if (unit.empty()) ctx.fail(column, "dimensional column needs a unit annotation, e.g. " + column + "[...]");
    const auto& table = units.at(dim);
    auto it = table.find(unit);
    if (it == table.end()) ctx.fail(column, "unsupported unit '" + unit + "'");
    return it->second;
}

std::vector<Column> parse_header(const std::string& section, const std::string& line, const Context& ctx) {
    const auto& allowed = table_columns().at(section);
    std::vector<Column> cols;
    std::set<std::string> seen;
    for (const auto& tok : split_ws(line)) {
        std::string name = tok, unit;
        const auto lb = tok.find('[');
        if (lb != std::string::npos) {
            if (tok.back() != ']') ctx.fail(tok, "malformed unit annotation");
            name = tok.substr(0, lb);
            unit = tok.substr(lb + 1, tok.size() - lb - 2);
        }
        auto it = allowed.find(name);
        if (it == allowed.end()) ctx.fail(name, "unknown column in [" + section + "]");
        if (!seen.insert(name).second) ctx.fail(name, "duplicate column");
        cols.push_back({name, unit_factor(it->second, unit, ctx, name)});
    }
    return cols;
}

void require_columns(const std::string& section, const std::vector<Column>& cols,
                     std::initializer_list<const char*> required, const Context& ctx) {
    for (const char* r : required) {
        if (std::none_of(cols.begin(), cols.end(), [&](const Column& c) { return c.name == r; })) {
            ctx.fail(r, "[" + section + "] is missing required column");
        }
    }
}

struct Pending {
    std::vector<Node> nodes;
    std::vector<Pipe> pipes;
    std::vector<Compressor> compressors;
    std::map<std::string, int> node_lines;
    std::vector<std::pair<std::string, int>> edge_lines;  // id, line
};

}  // namespace

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

NetworkDocument parse_network(std::istream& in, const std::string& source, bool lenient) {
    NetworkDocument doc;
    Pending pending;
    std::string name = "network";
    Context ctx{source, 0};
    std::string section;
    std::vector<Column> columns;
    bool header_pending = false;
    std::set<std::string> sections_seen;
    std::set<std::string> ids;

    auto set_nominal = [&](const std::string& which, const std::string& value, const std::string& key) {
        const double v = ctx.number(value, key);
        if (which == "length") doc.nominal.length = v;
        else if (which == "velocity") doc.nominal.velocity = v;
        else if (which == "pressure") doc.nominal.pressure = v;
        else if (which == "density") doc.nominal.density = v;
        else ctx.fail(key, "unknown nominal scale");
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++ctx.line;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known = {"meta", "nominal", "nodes", "pipes", "compressors"};
            if (!known.count(section)) ctx.fail(section, "unknown section");
            if (!sections_seen.insert(section).second) ctx.fail(section, "section appears twice");
            header_pending = table_columns().count(section) > 0;
            continue;
        }
        if (section.empty()) ctx.fail("", "content before the first section");

        if (section == "meta" || section == "nominal") {
            const auto eq = line.find('=');
            if (eq == std::string::npos) ctx.fail("", "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (section == "meta") {
                if (key == "name") name = value;
                else if (key == "eos") {
                    try {
                        doc.eos.kind = parse_eos_kind(value);
                    } catch (const ConfigError& e) {
                        ctx.fail(key, e.what());
                    }
                } else if (key == "temperature") doc.eos.temperature = ctx.number(value, key);
                else if (key == "specific_gravity") doc.eos.specific_gravity = ctx.number(value, key);
                else if (key == "p_atm") doc.eos.p_atm = ctx.number(value, key);
                else if (key == "gas_constant") doc.eos.gas_constant = ctx.number(value, key);
                else if (key.rfind("nominal_", 0) == 0) set_nominal(key.substr(8), value, key);
                else ctx.fail(key, "unknown key in [meta]");
            } else {
                set_nominal(key, value, key);
            }
            continue;
        }

        if (header_pending) {
            columns = parse_header(section, line, ctx);
            if (section == "nodes") require_columns(section, columns, {"id", "kind"}, ctx);
            if (section == "pipes") require_columns(section, columns, {"id", "from", "to", "length", "diameter", "friction"}, ctx);
            if (section == "compressors") require_columns(section, columns, {"id", "from", "to", "ratio"}, ctx);
            header_pending = false;
            continue;
        }

        const auto fields = split_ws(line);
        if (fields.size() != columns.size()) {
            ctx.fail("", "expected " + std::to_string(columns.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        std::map<std::string, std::pair<std::string, double>> row;
        for (std::size_t i = 0; i < fields.size(); ++i) row[columns[i].name] = {fields[i], columns[i].factor};
        auto text = [&](const char* c) -> std::optional<std::string> {
            auto it = row.find(c);
            if (it == row.end() || it->second.first == "-") return std::nullopt;
            return it->second.first;
        };
        auto value = [&](const char* c) -> std::optional<double> {
            auto t = text(c);
            if (!t) return std::nullopt;
            return ctx.number(*t, c) * row.at(c).second;
        };
        auto required = [&](const char* c) {
            auto v = value(c);
            if (!v) ctx.fail(c, "value is required");
            return *v;
        };
        const std::string id = *text("id");
        if (section == "nodes") {
            Node n;
            n.id = id;
            const std::string kind = text("kind").value_or("");
            if (kind == "slack") {
                n.kind = NodeKind::Slack;
                n.pressure = required("pressure");
            } else if (kind == "nonslack" || kind == "demand") {
                n.kind = NodeKind::NonSlack;
                n.injection = value("injection").value_or(0.0);
            } else {
                ctx.fail("kind", "expected slack or nonslack, got '" + kind + "'");
            }
            n.elevation = value("elevation");
            if (!pending.node_lines.emplace(id, ctx.line).second) ctx.fail("id", "duplicate node id '" + id + "'");
            pending.nodes.push_back(n);
        } else {
            if (!ids.insert(id).second) ctx.fail("id", "duplicate edge id '" + id + "'");
            pending.edge_lines.emplace_back(id, ctx.line);
            if (section == "pipes") {
                Pipe p;
                p.id = id;
                p.from = *text("from");
                p.to = *text("to");
                p.length = required("length");
                p.diameter = required("diameter");
                p.friction = required("friction");
                p.sin_theta = value("sin_theta");
                pending.pipes.push_back(p);
            } else {
                Compressor c;
                c.id = id;
                c.from = *text("from");
                c.to = *text("to");
                c.ratio = required("ratio");
                pending.compressors.push_back(c);
            }
        }
    }

    // Dangling references are reported at the edge's line.
    auto check_ref = [&](const std::string& edge, const std::string& node, const char* field) {
        if (!pending.node_lines.count(node)) {
            Context at = ctx;
            for (const auto& [eid, line] : pending.edge_lines) {
                if (eid == edge) at.line = line;
            }
            at.fail(field, "edge '" + edge + "' references unknown node '" + node + "'");
        }
    };
    for (const auto& p : pending.pipes) {
        check_ref(p.id, p.from, "from");
        check_ref(p.id, p.to, "to");
    }
    for (const auto& c : pending.compressors) {
        check_ref(c.id, c.from, "from");
        check_ref(c.id, c.to, "to");
    }

    try {
        doc.network = Network(name, std::move(pending.nodes), std::move(pending.pipes),
                              std::move(pending.compressors));
    } catch (const ConfigError& e) {
        throw ParseError(source, 0, "", e.what());
    }
    doc.diagnostics = validate(doc.network);
    if (!lenient) {
        require_valid(doc.network);
    }
    return doc;
}

NetworkDocument read_network(const std::string& path, bool lenient) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "", "cannot open file");
    }
    return parse_network(in, path, lenient);
}

void write_network(std::ostream& out, const NetworkDocument& doc) {
    const auto& net = doc.network;
    if (net.units() != Units::SI) {
        throw ConfigError("only SI networks can be written");
    }
    out << "[meta]\n";
    out << "name = " << net.name() << "\n";
    out << "eos = " << to_string(doc.eos.kind) << "\n";
    out << "temperature = " << format_double(doc.eos.temperature) << "\n";
    out << "specific_gravity = " << format_double(doc.eos.specific_gravity) << "\n";
    out << "p_atm = " << format_double(doc.eos.p_atm) << "\n";
    out << "gas_constant = " << format_double(doc.eos.gas_constant) << "\n";

    const auto& nm = doc.nominal;
    if (nm.length) out << "nominal_length = " << format_double(*nm.length) << "\n";
    if (nm.velocity) out << "nominal_velocity = " << format_double(*nm.velocity) << "\n";
    if (nm.pressure) out << "nominal_pressure = " << format_double(*nm.pressure) << "\n";
    if (nm.density) out << "nominal_density = " << format_double(*nm.density) << "\n";

    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); };
    out << "\n[nodes]\nid kind pressure[Pa] injection[kg/s] elevation[m]\n";
    for (const auto& n : net.nodes()) {
        out << n.id << ' ' << (n.kind == NodeKind::Slack ? "slack" : "nonslack") << ' '
            << (n.kind == NodeKind::Slack ? format_double(n.pressure) : "-") << ' '
            << (n.kind == NodeKind::NonSlack ? format_double(n.injection) : "-") << ' ' << opt(n.elevation) << "\n";
    }
    out << "\n[pipes]\nid from to length[m] diameter[m] friction sin_theta\n";
    for (const auto& p : net.pipes()) {
        out << p.id << ' ' << p.from << ' ' << p.to << ' ' << format_double(p.length) << ' '
            << format_double(p.diameter) << ' ' << format_double(p.friction) << ' ' << opt(p.sin_theta) << "\n";
    }
    if (!net.compressors().empty()) {
        out << "\n[compressors]\nid from to ratio\n";
        for (const auto& c : net.compressors()) {
            out << c.id << ' ' << c.from << ' ' << c.to << ' ' << format_double(c.ratio) << "\n";
        }
    }
}

void write_network(const std::string& path, const NetworkDocument& doc) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_network(out, doc);
}

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw ConfigError("unknown output format '" + std::string(text) + "' (expected csv or json)");
}

std::vector<std::pair<std::string, std::string>> report_fields(const SolveReport& r) {
    std::vector<std::pair<std::string, std::string>> f;
    f.emplace_back("converged", r.converged ? "true" : "false");
    f.emplace_back("iterations", std::to_string(r.iterations));
    f.emplace_back("collocation_iterations", std::to_string(r.collocation.iterations));
    f.emplace_back("residual_norm", format_double(r.residual_norm));
    f.emplace_back("pressure_residual_norm", format_double(r.pressure_residual_norm));
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
        return s;
    };
    f.emplace_back("residual_history", join(r.ode.residual_norms));
    f.emplace_back("damping_history", join(r.ode.step_lengths));
    f.emplace_back("collocation_residual_history", join(r.collocation.residual_norms));
    f.emplace_back("warnings", std::to_string(r.warnings.size()));
    return f;
}

void write_solution(std::ostream& out, const NetworkSolution& s, const SolveReport& report, OutputFormat format) {
    auto kind = [](EdgeKind k) { return k == EdgeKind::Pipe ? "pipe" : "compressor"; };
    if (format == OutputFormat::Json) {
        json j;
        j["nodes"] = json::array();
        for (std::size_t i = 0; i < s.node_ids.size(); ++i) {
            j["nodes"].push_back(
                {{"id", s.node_ids[i]}, {"p_Pa", s.pressure[i]}, {"pi", s.transformed[i]}, {"q_kg_s", s.injection[i]}});
        }
        j["edges"] = json::array();
        for (std::size_t i = 0; i < s.edge_ids.size(); ++i) {
            j["edges"].push_back({{"id", s.edge_ids[i]}, {"type", kind(s.edge_kinds[i])}, {"f_kg_s", s.flow[i]}});
        }
        j["profiles"] = json::array();
        for (const auto& p : s.profiles) {
            j["profiles"].push_back({{"pipe", p.pipe_id}, {"x_m", p.x}, {"p_Pa", p.p}});
        }
        json rep = json::object();
        for (const auto& [k, v] : report_fields(report)) rep[k] = v;
        j["report"] = rep;
        out << std::setprecision(17) << j.dump(2) << "\n";
        return;
    }
    out << "# table: nodes\nid,p[Pa],pi[-],q[kg/s]\n";
    for (std::size_t i = 0; i < s.node_ids.size(); ++i) {
        out << s.node_ids[i] << ',' << format_double(s.pressure[i]) << ',' << format_double(s.transformed[i]) << ','
            << format_double(s.injection[i]) << "\n";
    }
    out << "\n# table: edges\nid,type,f[kg/s]\n";
    for (std::size_t i = 0; i < s.edge_ids.size(); ++i) {
        out << s.edge_ids[i] << ',' << kind(s.edge_kinds[i]) << ',' << format_double(s.flow[i]) << "\n";
    }
    for (const auto& p : s.profiles) {
        out << "\n# table: profile " << p.pipe_id << "\nx[m],p[Pa]\n";
        for (std::size_t i = 0; i < p.x.size(); ++i) {
            out << format_double(p.x[i]) << ',' << format_double(p.p[i]) << "\n";
        }
    }
    out << "\n# table: report\nkey,value\n";
    for (const auto& [k, v] : report_fields(report)) out << k << ',' << v << "\n";
}

SolutionDocument parse_solution(std::istream& in, const std::string& source) {
    SolutionDocument doc;
    auto& s = doc.solution;
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    auto edge_kind = [&](const std::string& t, int line) {
        if (t == "pipe") return EdgeKind::Pipe;
        if (t == "compressor") return EdgeKind::Compressor;
        throw ParseError(source, line, "type", "expected pipe or compressor");
    };

    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
            for (const auto& n : j.at("nodes")) {
                s.node_ids.push_back(n.at("id"));
                s.pressure.push_back(n.at("p_Pa"));
                s.transformed.push_back(n.at("pi"));
                s.injection.push_back(n.at("q_kg_s"));
            }
            for (const auto& e : j.at("edges")) {
                s.edge_ids.push_back(e.at("id"));
                s.edge_kinds.push_back(edge_kind(e.at("type"), 0));
                s.flow.push_back(e.at("f_kg_s"));
            }
            const json profiles = j.value("profiles", json::array());
            for (const auto& p : profiles) {
                s.profiles.push_back({p.at("pipe"), p.at("x_m").get<std::vector<double>>(),
                                      p.at("p_Pa").get<std::vector<double>>()});
            }
            const json report = j.value("report", json::object());
            for (const auto& [k, v] : report.items()) doc.report[k] = v.get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(source, 0, "", e.what());
        }
        return doc;
    }

    std::istringstream is(text);
    Context ctx{source, 0};
    std::string table;
    bool header = false;
    std::string raw;
    while (std::getline(is, raw)) {
        ++ctx.line;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.rfind("# table: ", 0) == 0) {
            table = line.substr(9);
            header = true;
            if (table.rfind("profile ", 0) == 0) s.profiles.push_back({table.substr(8), {}, {}});
            continue;
        }
        if (line.front() == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv(line);
        auto need = [&](std::size_t n) {
            if (f.size() != n) ctx.fail(table, "expected " + std::to_string(n) + " fields");
        };
        if (table == "nodes") {
            need(4);
            s.node_ids.push_back(f[0]);
            s.pressure.push_back(ctx.number(f[1], "p"));
            s.transformed.push_back(ctx.number(f[2], "pi"));
            s.injection.push_back(ctx.number(f[3], "q"));
        } else if (table == "edges") {
            need(3);
            s.edge_ids.push_back(f[0]);
            s.edge_kinds.push_back(edge_kind(f[1], ctx.line));
            s.flow.push_back(ctx.number(f[2], "f"));
        } else if (table.rfind("profile ", 0) == 0) {
            need(2);
            s.profiles.back().x.push_back(ctx.number(f[0], "x"));
            s.profiles.back().p.push_back(ctx.number(f[1], "p"));
        } else if (table == "report") {
            need(2);
            doc.report[f[0]] = f[1];
        } else {
            ctx.fail(table, "row outside a known table");
        }
    }
    return doc;
}

SolutionDocument read_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    return parse_solution(in, path);
}

}  // namespace gasflow
