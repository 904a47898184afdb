#ifndef TGRAPH_CLI_HPP
#define TGRAPH_CLI_HPP

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "suite.hpp"

namespace tgraph::cli
{

using io::json;

/// Everything a subcommand emits.  Rendering is deterministic; wall time goes to stderr.
struct Report
{
    std::string command;
    std::uint64_t digest = fnv1a("");
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> values;
    CheckList checks;
    std::vector<std::string> table_header;
    std::vector<std::vector<std::string>> table;

    void value(const std::string& k, const std::string& v) { values.emplace_back(k, v); }
    bool passed() const { return checks.passed(); }
};

inline std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

inline std::string format_residual(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

inline std::string format_complex(Complex z)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real(), z.imag());
    return buf;
}

inline std::string hex(std::uint64_t h)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void render_human(const Report& r, std::ostream& out)
{
    out << "command: " << r.command << "\n";
    out << "inputs: fnv1a " << hex(r.digest) << "\n";
    if(r.seed) out << "seed: " << *r.seed << "\n";
    for(const auto& [k, v] : r.values) out << k << ": " << v << "\n";
    for(const auto& c : r.checks.checks)
    {
        out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  residual=" << format_residual(c.residual);
        if(!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
    }
    Index failed = 0;
    for(const auto& c : r.checks.checks) failed += c.passed ? 0 : 1;
    out << "result: " << (r.passed() ? "PASS" : "FAIL") << " (" << r.checks.checks.size() << " checks, " << failed << " failed)\n";
}

inline json render_json(const Report& r)
{
    json checks = json::array();
    for(const auto& c : r.checks.checks)
        checks.push_back({{"name", c.name}, {"status", c.passed ? "pass" : "fail"}, {"residual", c.residual}, {"detail", c.detail}});
    json values = json::object();
    for(const auto& [k, v] : r.values) values[k] = v;
    json out{{"command", r.command}, {"inputs_digest", hex(r.digest)}, {"values", values}, {"checks", checks}, {"passed", r.passed()}};
    out["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    return out;
}

inline std::string csv_field(const std::string& s)
{
    if(s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for(char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// The report's table when it has one, otherwise one row per check.
inline std::string render_csv(const Report& r)
{
    std::string out;
    auto line = [&](const std::vector<std::string>& row) {
        for(Index i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
        out += "\n";
    };
    if(!r.table_header.empty())
    {
        line(r.table_header);
        for(const auto& row : r.table) line(row);
        return out;
    }
    line({"name", "status", "residual"});
    for(const auto& c : r.checks.checks) line({c.name, c.passed ? "pass" : "fail", format_residual(c.residual)});
    return out;
}

// ---------------------------------------------------------------------------
// Command table
// ---------------------------------------------------------------------------

struct CommandInfo
{
    std::string path;
    std::vector<std::string> operations;
};

/// Subcommands with the library operations they reach.
inline const std::vector<CommandInfo>& command_table()
{
    static const std::vector<CommandInfo> t{
        {"graph validate", {"parse_graph", "fiber_count", "edge_space_components", "s_section_decomposition"}},
        {"graph spectral-radius", {"spectral_radius", "path_growth_rate"}},
        {"graph paths", {"enumerate_paths", "path_counts"}},
        {"module inner", {"inner_product", "module_norm", "fiber_evaluation"}},
        {"module check", {"inner_product", "left_action", "right_action", "module_norm", "tensor_inner_product", "fiber_evaluation"}},
        {"fock matrix", {"fock_matrix", "word_multiply"}},
        {"fock p-check", {"vacuum_projection", "fock_matrix"}},
        {"fock reconstruct-check", {"reconstruct_module_check", "triple_iso_transport", "spectral_component", "gauge_action"}},
        {"kms eval", {"kms_eval", "path_partition_sum"}},
        {"kms sweep", {"kms_limit_sweep", "kms_infty_eval"}},
        {"kms condition", {"kms_condition_check", "extremal_separation_check"}},
        {"iso check", {"finite_graph_isomorphism", "edge_map_from_vertices"}},
        {"bimodule invariants", {"bimodule_invariants"}},
        {"localconj check", {"local_conjugacy_check"}},
        {"frame verify", {"frame_verify", "nonzero_permutation", "bump_frame", "delta_frame", "perturb_frame"}},
        {"example-s5 verify", {"build_twist", "rho_map", "verify_isometry", "verify_bimodule", "surjectivity_solve", "nonisomorphism_witness"}},
        {"bundle check", {"cocycle_check"}},
        {"bundle monodromy", {"monodromy"}},
        {"bundle to-graph", {"graph_from_cocycle"}},
        {"bundle frame", {"global_frame_over_circle", "cocycle_from_graph"}},
        {"suite", {"run_suite"}},
    };
    return t;
}

// ---------------------------------------------------------------------------
// Argument helpers
// ---------------------------------------------------------------------------

struct Inputs
{
    std::string text;

    void add_file(const std::string& path)
    {
        std::ifstream in(path);
        std::stringstream ss;
        if(in) ss << in.rdbuf();
        add_text(ss.str());
    }

    void add_text(const std::string& s)
    {
        text += s;
        text += '\0';
    }
};

inline Index parse_vertex(const FiniteGraph& g, const std::string& s)
{
    for(Index v = 0; v < g.num_vertices(); ++v)
        if(g.vertex_id(v) == s) return v;
    if(!s.empty() && s.find_first_not_of("0123456789") == std::string::npos)
    {
        Index v = std::stoul(s);
        if(v < g.num_vertices()) return v;
    }
    throw io::FormatError("--vertex: unknown vertex '" + s + "'");
}

/// "lo:hi:step"
inline std::vector<double> parse_betas(const std::string& s)
{
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while(std::getline(ss, item, ':'))
    {
        try
        {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if(used != item.size()) throw std::invalid_argument("trailing");
        }
        catch(const std::exception&)
        {
            throw io::FormatError("--betas: expected lo:hi:step, got '" + s + "'");
        }
    }
    if(parts.size() != 3) throw io::FormatError("--betas: expected lo:hi:step, got '" + s + "'");
    try
    {
        return beta_grid(parts[0], parts[1], parts[2]);
    }
    catch(const InvalidInput& e)
    {
        throw io::FormatError(std::string("--betas: ") + e.what());
    }
}

inline std::string path_label(const FiniteGraph& g, const Path& p)
{
    if(p.edges.empty()) return g.vertex_id(p.vertex);
    std::string s;
    for(Index i = 0; i < p.edges.size(); ++i) s += (i ? "." : "") + g.edge_id(p.edges[i]);
    return s;
}

inline std::string join(const std::vector<Index>& v, const std::string& sep = ",")
{
    std::string s;
    for(Index i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
    return s;
}

inline void add_checks(Report& r, const CheckList& c, const std::string& prefix = {}) { r.checks.append(c, prefix); }

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

struct Options
{
    std::vector<std::string> files;
    std::optional<double> tol;
    std::uint64_t seed = 42;
    std::optional<Index> grid;
    std::optional<Index> depth;
    std::optional<std::string> betas;
    std::string json_path;
    std::string csv_path;
    std::string vertex;
    std::optional<Index> length;
    std::string word;
    std::string measure;
    std::optional<double> beta;
    std::optional<Index> trials;
    std::string x, y;
    double perturb = 0.0;
    std::string section = "all";
    std::string fixtures = TGRAPH_FIXTURE_DIR;
};

inline io::AnyGraph load_graph(const std::string& path, Inputs& in)
{
    in.add_file(path);
    auto j = io::load_file(path);
    return io::parse_from(path, [&] { return io::parse_graph(j); });
}

inline FiniteGraph load_finite(const std::string& path, Inputs& in) { return io::require_finite(load_graph(path, in), path); }
inline CircleCoveringGraph load_circle(const std::string& path, Inputs& in) { return io::require_circle(load_graph(path, in), path); }

inline io::json load_json_arg(const std::string& arg, Inputs& in)
{
    auto j = io::load_argument(arg);
    in.add_text(j.dump());
    return j;
}

inline void cmd_graph_validate(const Options& o, Report& r, Inputs& in)
{
    auto g = load_graph(o.files.at(0), in);
    if(auto* f = std::get_if<FiniteGraph>(&g))
    {
        r.value("kind", "finite");
        r.value("vertices", std::to_string(f->num_vertices()));
        r.value("edges", std::to_string(f->num_edges()));
        std::vector<Index> fibers;
        for(Index v = 0; v < f->num_vertices(); ++v) fibers.push_back(fiber_count(*f, v));
        r.value("fiber_counts", join(fibers));
        bool sr_ok = true;
        for(Index e = 0; e < f->num_edges(); ++e) sr_ok = sr_ok && f->source(e) < f->num_vertices() && f->range(e) < f->num_vertices();
        r.checks.add("endpoints_valid", sr_ok);
    }
    else
    {
        const auto& c = std::get<CircleCoveringGraph>(g);
        r.value("kind", "circle");
        r.value("components", std::to_string(edge_space_components(c)));
        r.value("fiber_count", std::to_string(c.total_fiber_count()));
        // s o (s|_Z)^{-1} = id at 256 sample angles around several base points
        double worst = 0.0;
        for(Index b = 0; b < 8; ++b)
        {
            double v = grid_angle(static_cast<std::int64_t>(b), 8);
            auto dec = s_section_decomposition(c, v);
            for(const auto& sec : dec.sections)
                for(Index k = 0; k < 256; ++k)
                {
                    double w = v + (static_cast<double>(k) / 255.0 - 0.5) * 0.99 * std::numbers::pi;
                    worst = std::max(worst, angle_distance(sec.source(sec.lift(w)), wrap_angle(w)));
                }
            r.checks.add("fiber_size_at_" + format_double(v), dec.sections.size() == c.total_fiber_count());
        }
        r.checks.add_residual("s_sections_invert_s", worst, 1e-12);
    }
}

inline void cmd_graph_spectral_radius(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    const double tol = o.tol.value_or(1e-10);
    double rho = spectral_radius(g, tol);
    r.value("spectral_radius", format_double(rho));
    r.value("log_spectral_radius", rho > 0.0 ? format_double(std::log(rho)) : "-inf");
    double dense = spectral_radius_dense(g);
    r.checks.add_residual("dense_cross_check", std::abs(rho - dense), std::max(tol, 1e-12) * std::max(1.0, dense) * 10.0);
    if(rho > 0.0)
    {
        double growth = path_growth_rate(g, 20);
        r.value("path_growth_rate_n20", format_double(growth));
    }
}

inline void cmd_graph_paths(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    Index v = parse_vertex(g, o.vertex);
    Index n = o.length.value_or(1);
    auto paths = enumerate_paths(g, v, n);
    r.value("count", std::to_string(paths.size()));
    r.table_header = {"index", "path", "range"};
    for(Index i = 0; i < paths.size(); ++i) r.table.push_back({std::to_string(i), path_label(g, paths[i]), g.vertex_id(paths[i].range(g))});
    r.checks.add("count_matches_adjacency_power", path_counts(g, n).at(v) == paths.size());
}

inline void cmd_module_inner(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    auto x = io::parse_module_element(g, load_json_arg(o.x, in), "--x");
    auto y = io::parse_module_element(g, load_json_arg(o.y, in), "--y");
    auto xy = inner_product(g, x, y);
    r.table_header = {"vertex", "re", "im"};
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        r.value("<x,y>(" + g.vertex_id(v) + ")", format_complex(xy(v)));
        r.table.push_back({g.vertex_id(v), format_double(xy(v).real()), format_double(xy(v).imag())});
    }
    r.value("norm_x", format_double(module_norm(g, x)));
    r.value("norm_y", format_double(module_norm(g, y)));
    auto yx = inner_product(g, y, x);
    r.checks.add_residual("adjoint_symmetry", (xy.values - yx.values.conjugate()).cwiseAbs().maxCoeff(), o.tol.value_or(1e-12));
}

inline void cmd_module_check(const Options& o, Report& r, Inputs& in)
{
    auto any = load_graph(o.files.at(0), in);
    Rng rng(o.seed);
    r.seed = o.seed;
    const Index trials = o.trials.value_or(100);
    const double tol = o.tol.value_or(1e-12);
    if(auto* gp = std::get_if<FiniteGraph>(&any))
    {
        const auto& g = *gp;
        double sym = 0.0, lin = 0.0, adj = 0.0, fib = 0.0, tensor = 0.0;
        bool positive = true;
        for(Index t = 0; t < trials; ++t)
        {
            auto x = random_module_element(g, rng), y = random_module_element(g, rng);
            auto a = random_vertex_function(g, rng);
            auto xy = inner_product(g, x, y), xx = inner_product(g, x, x);
            sym = std::max(sym, (xy.values - inner_product(g, y, x).values.conjugate()).cwiseAbs().maxCoeff());
            lin = std::max(lin, (inner_product(g, x, right_action(g, y, a)).values - (xy * a).values).cwiseAbs().maxCoeff());
            adj = std::max(adj, (inner_product(g, left_action(g, a, y), x).values - inner_product(g, y, left_action(g, a.conj(), x)).values)
                                    .cwiseAbs()
                                    .maxCoeff());
            for(Index v = 0; v < g.num_vertices(); ++v)
            {
                positive = positive && xx(v).real() >= 0.0 && xx(v).imag() == 0.0;
                fib = std::max(fib, std::abs(fiber_evaluation(g, x, v).squaredNorm() - xx(v).real()));
            }
            // k = 2 recursion against the sum over paths e f with s(e) = r(f)
            auto xs = random_tensor(g, rng, 2), ys = random_tensor(g, rng, 2);
            auto ti = tensor_inner_product(g, xs, ys);
            Eigen::VectorXcd brute = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.num_vertices()));
            for(Index v = 0; v < g.num_vertices(); ++v)
                for(const auto& p : enumerate_paths(g, v, 2))
                    brute[static_cast<Eigen::Index>(v)] += std::conj(xs[0](p.edges[0]) * xs[1](p.edges[1])) * ys[0](p.edges[0]) * ys[1](p.edges[1]);
            tensor = std::max(tensor, (ti.values - brute).cwiseAbs().maxCoeff());
        }
        r.checks.add("positivity", positive);
        r.checks.add_residual("adjoint_symmetry", sym, tol);
        r.checks.add_residual("right_linearity", lin, tol);
        r.checks.add_residual("adjointability", adj, tol);
        r.checks.add_residual("fiber_norm_identity", fib, tol);
        r.checks.add_residual("tensor_inner_product_k2", tensor, tol);
    }
    else
    {
        const auto& g = std::get<CircleCoveringGraph>(any);
        const Index n = o.grid.value_or(1024);
        double fib = 0.0, sym = 0.0;
        for(Index t = 0; t < trials; ++t)
        {
            auto rand_el = [&]() {
                return CircleModuleElement::sample(g, n, [&](const EdgePoint&) { return random_complex(rng); });
            };
            auto x = rand_el(), y = rand_el();
            auto xx = inner_product(g, x, x), xy = inner_product(g, x, y), yx = inner_product(g, y, x);
            sym = std::max(sym, (xy.values - yx.values.conjugate()).cwiseAbs().maxCoeff());
            for(Index j = 0; j < n; j += std::max<Index>(1, n / 64)) fib = std::max(fib, std::abs(fiber_evaluation(g, x, j).squaredNorm() - xx(j).real()));
        }
        r.checks.add_residual("adjoint_symmetry", sym, tol);
        r.checks.add_residual("fiber_norm_identity", fib, tol);
    }
}

inline void cmd_fock_matrix(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    auto x = io::parse_element(g, load_json_arg(o.word, in), "--word");
    Index v = parse_vertex(g, o.vertex);
    Index depth = o.depth.value_or(4);
    Index need = 0;
    for(const auto& w : x.words()) need = std::max(need, w.creations());
    if(depth < need) throw io::FormatError("--depth: must be at least " + std::to_string(need) + " for this word");
    auto fm = fock_matrix(g, x, v, depth);
    FockBasis b(g, v, depth);
    r.value("basis_size", std::to_string(b.size()));
    Index exact = 0;
    for(bool e : fm.exact_column) exact += e ? 1 : 0;
    r.value("exact_columns", std::to_string(exact));
    r.table_header = {"row", "col", "re", "im", "exact"};
    for(Index j = 0; j < b.size(); ++j)
        for(Index i = 0; i < b.size(); ++i)
        {
            Complex z = fm.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if(z == Complex(0.0)) continue;
            r.table.push_back({path_label(g, b.path(i)), path_label(g, b.path(j)), format_double(z.real()), format_double(z.imag()),
                               fm.exact_column[j] ? "1" : "0"});
            r.value("entry(" + path_label(g, b.path(i)) + "," + path_label(g, b.path(j)) + ")",
                    format_complex(z) + (fm.exact_column[j] ? "" : " [truncated]"));
        }
}

inline void cmd_fock_pcheck(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    add_checks(r, vacuum_projection_check(g, o.depth.value_or(5)));
}

inline void cmd_fock_reconstruct(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    Rng rng(o.seed);
    r.seed = o.seed;
    const double tol = o.tol.value_or(1e-12);
    const Index trials = o.trials.value_or(100);
    add_checks(r, reconstruct_module_check(g, trials, tol, rng, o.depth.value_or(5)));
    auto iso = random_relabelling(g, rng);
    add_checks(r, triple_iso_transport(iso, g, relabel(g, iso), std::min<Index>(trials, 20), tol, rng), "relabel/");
    // spectral components against the discrete Fourier average over 16 roots of unity
    auto x = random_homogeneous(g, rng, 1, 2, 2) + random_homogeneous(g, rng, 0, 2, 2) + random_homogeneous(g, rng, -1, 2, 2);
    double fourier = 0.0;
    for(int n = -1; n <= 1; ++n)
    {
        ToeplitzElement avg;
        for(int k = 0; k < 16; ++k)
        {
            Complex z = unit_root(k, 16);
            avg += (std::pow(z, -n) / 16.0) * gauge_action(x, z);
        }
        fourier = std::max(fourier, symbolic_residual(g, avg, spectral_component(x, n)));
    }
    r.checks.add_residual("spectral_component_fourier", fourier, 1e-10);
}

inline void cmd_kms_eval(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    if(!o.beta) throw io::FormatError("--beta is required");
    const double beta = *o.beta;
    r.value("beta", format_double(beta));
    r.value("critical_beta", format_double(critical_beta(g)));
    Eigen::VectorXd mu = o.measure.empty() ? point_mass(g, 0) : io::parse_measure(g, load_json_arg(o.measure, in), "--measure");
    auto x = io::parse_element(g, load_json_arg(o.word, in), "--word");
    try
    {
        check_beta(g, beta);
    }
    catch(const DomainError& e)
    {
        r.checks.add("beta_above_critical", false, 0.0, e.what());
        return;
    }
    r.checks.add("beta_above_critical", true);
    KMSState st(g, beta, mu);
    Complex val = st(x);
    r.value("value", format_complex(val));
    for(Index v = 0; v < g.num_vertices(); ++v) r.value("N_" + g.vertex_id(v), format_double(st.partition_sums()[static_cast<Eigen::Index>(v)]));
    // truncated path sums as a cross-check of the partition function
    double worst = 0.0;
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        Index depth = 0;
        while(depth < 200 && truncation_tail_bound(g, beta, depth) > 1e-13) ++depth;
        if(truncation_tail_bound(g, beta, depth) > 1e-13) continue;
        worst = std::max(worst, std::abs(path_partition_sum_truncated(g, beta, v, depth) - path_partition_sum(g, beta, v)) /
                                    std::max(1.0, path_partition_sum(g, beta, v)));
    }
    r.checks.add_residual("partition_truncation_agreement", worst, 1e-12);
}

inline void cmd_kms_sweep(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    Index v = parse_vertex(g, o.vertex.empty() ? g.vertex_id(0) : o.vertex);
    auto betas = parse_betas(o.betas.value_or("1:10:1"));
    for(double b : betas)
    {
        if(b <= critical_beta(g))
        {
            r.checks.add("beta_above_critical", false, 0.0, "beta " + format_double(b) + " <= log rho");
            return;
        }
    }
    auto t = kms_limit_sweep(g, v, standard_sweep_words(g), betas, o.tol.value_or(1e-12));
    r.value("vertex", g.vertex_id(v));
    r.table_header = {"beta", "word-id", "value", "residual"};
    for(const auto& row : t.rows) r.table.push_back({format_double(row.beta), row.word_id, format_double(row.value.real()), format_residual(row.residual)});
    for(const auto& s : t.summaries)
    {
        r.checks.add(s.word_id + "/monotone", s.monotone);
        r.checks.add(s.word_id + "/within_bound", s.within_bound, s.fitted_constant, "C=" + format_residual(s.fitted_constant) + " norm=" + format_double(s.norm));
    }
    r.checks.add("p_E_limit_is_one", kms_infty_eval(g, v, vacuum_projection(g)) == Complex(1.0));
}

inline void cmd_kms_condition(const Options& o, Report& r, Inputs& in)
{
    auto g = load_finite(o.files.at(0), in);
    const double beta = o.beta.value_or(2.0);
    try
    {
        check_beta(g, beta);
    }
    catch(const DomainError& e)
    {
        r.checks.add("beta_above_critical", false, 0.0, e.what());
        return;
    }
    Rng rng(o.seed);
    r.seed = o.seed;
    const Index trials = o.trials.value_or(500);
    KMSState st(g, beta, random_measure(g, rng));
    double worst = 0.0;
    std::uniform_int_distribution<int> deg(-2, 2);
    for(Index t = 0; t < trials; ++t)
    {
        auto a = random_homogeneous(g, rng, deg(rng), 2, 2);
        auto b = random_homogeneous(g, rng, deg(rng), 2, 2);
        worst = std::max(worst, kms_condition_check(st, a, b, 1e-9).residual);
    }
    r.checks.add_residual("kms_condition", worst, o.tol.value_or(1e-9));
    add_checks(r, extremal_separation_check(g, beta, rng, std::min<Index>(trials, 100)));
}

inline void cmd_iso_check(const Options& o, Report& r, Inputs& in)
{
    auto e = load_finite(o.files.at(0), in);
    auto f = load_finite(o.files.at(1), in);
    auto res = finite_graph_isomorphism(e, f);
    r.value("search_nodes", std::to_string(res.nodes_visited));
    if(res.found())
    {
        r.value("verdict", "isomorphic");
        std::string vm;
        for(Index v = 0; v < e.num_vertices(); ++v) vm += (v ? " " : "") + e.vertex_id(v) + "->" + f.vertex_id(res.iso->vertex_map[v]);
        r.value("vertex_map", vm);
        std::string em;
        for(Index x = 0; x < e.num_edges(); ++x) em += (x ? " " : "") + e.edge_id(x) + "->" + f.edge_id(res.iso->edge_map[x]);
        r.value("edge_map", em);
        r.checks.add("isomorphism_verified", is_graph_isomorphism(*res.iso, e, f));
    }
    else
    {
        r.value("verdict", "not isomorphic");
        r.value("refutation", res.refutation);
        r.checks.add("refutation_recorded", !res.refutation.empty(), 0.0, res.refutation);
    }
}

inline void cmd_bimodule_invariants(const Options& o, Report& r, Inputs& in)
{
    auto e = load_finite(o.files.at(0), in);
    auto inv = bimodule_invariants(e);
    std::string rows;
    for(Index i = 0; i < inv.matrix.size(); ++i)
    {
        std::vector<Index> row;
        for(auto x : inv.matrix[i]) row.push_back(static_cast<Index>(x));
        rows += (i ? ";" : "") + join(row);
    }
    r.value("canonical_matrix", "[" + rows + "]");
    r.value("class_sizes", join(inv.class_sizes));
    r.value("digest", hex(fnv1a(rows + "|" + join(inv.class_sizes))));
    if(o.files.size() > 1)
    {
        auto f = load_finite(o.files.at(1), in);
        bool same = inv == bimodule_invariants(f);
        r.value("bimodules_isomorphic", same ? "yes" : "no");
        // the verdict must agree with the graph isomorphism search
        r.checks.add("agrees_with_graph_isomorphism", same == finite_graph_isomorphism(e, f).found());
    }
}

inline void cmd_localconj_check(const Options& o, Report& r, Inputs& in)
{
    auto e = load_circle(o.files.at(0), in);
    auto f = load_circle(o.files.at(1), in);
    auto res = local_conjugacy_check(e, f, o.tol.value_or(1e-9), o.grid.value_or(720));
    r.value("status", to_string(res.status));
    r.value("message", res.message);
    r.value("candidates_tried", std::to_string(res.candidates_tried));
    if(res.certificate)
    {
        const auto& c = *res.certificate;
        r.value("vertex_map", std::string(c.vertex_map.reflection ? "reflection" : "rotation") + " offset " + format_double(c.vertex_map.offset));
        r.checks.add_residual("certificate_residual", c.max_residual, o.tol.value_or(1e-9));
    }
    if(res.status == LocalConjugacyStatus::inconclusive) r.value("note", "no rigid certificate; local conjugacy neither shown nor refuted");
}

inline void cmd_frame_verify(const Options& o, Report& r, Inputs& in)
{
    auto any = load_graph(o.files.at(0), in);
    const double tol = o.tol.value_or(1e-9);
    if(auto* g = std::get_if<FiniteGraph>(&any))
    {
        for(Index v = 0; v < g->num_vertices(); ++v)
        {
            auto fd = delta_frame(*g, v);
            if(o.perturb != 0.0 && !fd.generators.empty())
                fd.generators[0].values *= (1.0 + o.perturb);
            add_checks(r, frame_verify(*g, fd, tol).checks, g->vertex_id(v) + "/");
        }
        return;
    }
    const auto& g = std::get<CircleCoveringGraph>(any);
    const Index n = o.grid.value_or(1024);
    Index center = 0;
    if(!o.vertex.empty()) center = std::stoul(o.vertex) % n;
    auto fd = bump_frame(g, n, center);
    if(o.perturb != 0.0) fd = perturb_frame(fd, o.perturb);
    auto res = frame_verify(g, fd, tol);
    r.value("support_points", std::to_string(res.points.size()));
    add_checks(r, res.checks);
}

inline void cmd_example_s5(const Options& o, Report& r, Inputs& in)
{
    in.add_text("example-s5");
    Rng rng(o.seed);
    r.seed = o.seed;
    const Index n = o.grid.value_or(1024);
    if(n < 4 || n % 2 != 0) throw io::FormatError("--grid: must be even and at least 4");
    add_checks(r, s5_verify(n, o.trials.value_or(100), o.tol.value_or(1e-9), rng));
}

inline PermCocycle load_cocycle(const std::string& path, Inputs& in)
{
    in.add_file(path);
    auto j = io::load_file(path);
    if(j.is_object() && j.contains("kind"))
        return cocycle_from_graph(io::require_circle(io::parse_from(path, [&] { return io::parse_graph(j); }), path));
    return io::parse_from(path, [&] { return io::parse_cocycle(j); });
}

inline void cmd_bundle(const std::string& what, const Options& o, Report& r, Inputs& in)
{
    auto c = load_cocycle(o.files.at(0), in);
    auto chk = cocycle_check(c);
    if(what == "check")
    {
        add_checks(r, chk);
        auto ref = refine_cover(c, 2);
        if(chk.passed()) r.checks.add("refinement_valid", cocycle_check(ref).passed());
        return;
    }
    if(!chk.passed())
    {
        add_checks(r, chk);
        return;
    }
    auto m = monodromy(c);
    r.value("rank", std::to_string(c.rank));
    r.value("monodromy", "[" + join(m.perm) + "]");
    r.value("cycle_type", cycle_type_string(m.cycle_type));
    r.value("permutation_trivial", m.cycle_type == std::vector<Index>(c.rank, 1) ? "yes" : "no");
    if(what == "monodromy")
    {
        r.checks.add("monodromy_is_permutation", is_permutation(m.perm, c.rank));
        r.checks.add("refinement_preserves_cycle_type", monodromy(refine_cover(c, 3)).cycle_type == m.cycle_type);
    }
    else if(what == "to-graph")
    {
        auto g = graph_from_cocycle(c);
        r.value("graph", io::to_json(g).dump());
        r.checks.add("fiber_count_equals_rank", g.total_fiber_count() == c.rank);
        r.checks.add("round_trip_cycle_type", monodromy(cocycle_from_graph(g)).cycle_type == m.cycle_type);
    }
    else
    {
        Index n = o.grid.value_or(0);
        if(n == 0)
        {
            n = 2;
            for(Index d : m.cycle_type) n = std::lcm(n, d);
            while(n < 64) n *= 2;
        }
        for(Index d : m.cycle_type)
            if(n % 2 != 0 || n % d != 0) throw io::FormatError("--grid: must be even and divisible by every cycle length");
        r.value("grid", std::to_string(n));
        add_checks(r, global_frame_over_circle(c, n, o.tol.value_or(1e-12)).checks);
    }
}

inline void cmd_suite(const Options& o, Report& r, Inputs& in)
{
    SuiteOptions so;
    so.fixture_dir = o.fixtures;
    so.seed = o.seed;
    if(o.trials) so.trials = *o.trials;
    if(o.grid) so.s5_grid = *o.grid;
    r.seed = o.seed;
    for(const auto& n : finite_fixture_names()) in.add_file(so.fixture_dir + "/" + n + ".json");
    for(const char* n : {"s5_E", "s5_F", "swap_cocycle", "three_cycle_cocycle"}) in.add_file(so.fixture_dir + "/" + std::string(n) + ".json");
    add_checks(r, run_suite(o.section, so));
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/*
 * argv without the program name.  Exit codes: 0 all checks pass, 1 a check
 * failed, 2 usage or input error.
 */
inline int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"Topological graph correspondences: verification tools", "tgraph"};
    app.require_subcommand(1);
    Options o;
    std::map<CLI::App*, std::function<void(Report&, Inputs&)>> leaves;

    auto common = [&](CLI::App* s) {
        s->add_option("--json", o.json_path, "write the report as JSON");
        s->add_option("--csv,--out", o.csv_path, "write the report table as CSV");
        s->add_option("--seed", o.seed, "random seed");
        s->add_option("--tol", o.tol, "tolerance");
    };
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc, Index files, std::function<void(Report&, Inputs&)> body) {
        auto* s = parent->add_subcommand(name, desc);
        if(files > 0) s->add_option("files", o.files, "input files")->expected(static_cast<int>(files))->required();
        common(s);
        leaves[s] = std::move(body);
        return s;
    };

    auto* graph = app.add_subcommand("graph", "graph files")->require_subcommand(1);
    leaf(graph, "validate", "parse and check a graph", 1, [&](Report& r, Inputs& in) { cmd_graph_validate(o, r, in); });
    leaf(graph, "spectral-radius", "spectral radius of the vertex matrix", 1, [&](Report& r, Inputs& in) { cmd_graph_spectral_radius(o, r, in); });
    auto* paths = leaf(graph, "paths", "enumerate the paths with source v", 1, [&](Report& r, Inputs& in) { cmd_graph_paths(o, r, in); });
    paths->add_option("--vertex", o.vertex)->required();
    paths->add_option("--length", o.length)->required();

    auto* module = app.add_subcommand("module", "graph correspondence")->require_subcommand(1);
    auto* inner = leaf(module, "inner", "inner product of two elements", 1, [&](Report& r, Inputs& in) { cmd_module_inner(o, r, in); });
    inner->add_option("--x", o.x)->required();
    inner->add_option("--y", o.y)->required();
    auto* mcheck = leaf(module, "check", "randomized module identities", 1, [&](Report& r, Inputs& in) { cmd_module_check(o, r, in); });
    mcheck->add_option("--trials", o.trials);
    mcheck->add_option("--grid", o.grid);

    auto* fock = app.add_subcommand("fock", "Fock representations")->require_subcommand(1);
    auto* fm = leaf(fock, "matrix", "truncated Fock matrix of a word", 1, [&](Report& r, Inputs& in) { cmd_fock_matrix(o, r, in); });
    fm->add_option("--word", o.word)->required();
    fm->add_option("--vertex", o.vertex)->required();
    fm->add_option("--depth", o.depth);
    auto* pc = leaf(fock, "p-check", "vacuum projection at every vertex", 1, [&](Report& r, Inputs& in) { cmd_fock_pcheck(o, r, in); });
    pc->add_option("--depth", o.depth);
    auto* rc = leaf(fock, "reconstruct-check", "reconstruction identities", 1, [&](Report& r, Inputs& in) { cmd_fock_reconstruct(o, r, in); });
    rc->add_option("--trials", o.trials);
    rc->add_option("--depth", o.depth);

    auto* kms = app.add_subcommand("kms", "KMS states")->require_subcommand(1);
    auto* ke = leaf(kms, "eval", "evaluate a KMS state", 1, [&](Report& r, Inputs& in) { cmd_kms_eval(o, r, in); });
    ke->add_option("--beta", o.beta)->required();
    ke->add_option("--measure", o.measure);
    ke->add_option("--word", o.word)->required();
    auto* ks = leaf(kms, "sweep", "beta -> infinity sweep", 1, [&](Report& r, Inputs& in) { cmd_kms_sweep(o, r, in); });
    ks->add_option("--vertex", o.vertex);
    ks->add_option("--betas", o.betas);
    auto* kc = leaf(kms, "condition", "randomized KMS condition", 1, [&](Report& r, Inputs& in) { cmd_kms_condition(o, r, in); });
    kc->add_option("--beta", o.beta);
    kc->add_option("--trials", o.trials);

    auto* iso = app.add_subcommand("iso", "graph isomorphism")->require_subcommand(1);
    leaf(iso, "check", "decide isomorphism of two finite graphs", 2, [&](Report& r, Inputs& in) { cmd_iso_check(o, r, in); });

    auto* bim = app.add_subcommand("bimodule", "bimodule invariants")->require_subcommand(1);
    auto* bi = bim->add_subcommand("invariants", "canonical form of the edge-count matrix");
    bi->add_option("files", o.files, "one or two graph files")->expected(1, 2)->required();
    common(bi);
    leaves[bi] = [&](Report& r, Inputs& in) { cmd_bimodule_invariants(o, r, in); };

    auto* lc = app.add_subcommand("localconj", "local conjugacy")->require_subcommand(1);
    auto* lcc = leaf(lc, "check", "search for a rigid local conjugacy", 2, [&](Report& r, Inputs& in) { cmd_localconj_check(o, r, in); });
    lcc->add_option("--grid", o.grid);

    auto* frame = app.add_subcommand("frame", "frames for the module")->require_subcommand(1);
    auto* fv = leaf(frame, "verify", "construct and verify a frame", 1, [&](Report& r, Inputs& in) { cmd_frame_verify(o, r, in); });
    fv->add_option("--grid", o.grid);
    fv->add_option("--vertex", o.vertex, "bump centre grid index (circle graphs)");
    fv->add_option("--perturb", o.perturb);

    auto* s5 = app.add_subcommand("example-s5", "the twisted pair")->require_subcommand(1);
    auto* s5v = leaf(s5, "verify", "verify the module isomorphism", 0, [&](Report& r, Inputs& in) { cmd_example_s5(o, r, in); });
    s5v->add_option("--grid", o.grid);
    s5v->add_option("--trials", o.trials);

    auto* bundle = app.add_subcommand("bundle", "permutation cocycles")->require_subcommand(1);
    for(const char* w : {"check", "monodromy", "to-graph", "frame"})
    {
        std::string what = w;
        auto* b = leaf(bundle, what, "cocycle " + what, 1, [&, what](Report& r, Inputs& in) { cmd_bundle(what, o, r, in); });
        if(what == "frame") b->add_option("--grid", o.grid);
    }

    auto* suite = app.add_subcommand("suite", "verification suite on the bundled fixtures");
    suite->add_option("section", o.section, "all | graph | module | fock | kms | conjugacy | example-s5 | bundle");
    suite->add_option("--fixtures", o.fixtures);
    suite->add_option("--trials", o.trials);
    suite->add_option("--grid", o.grid);
    common(suite);
    leaves[suite] = [&](Report& r, Inputs& in) { cmd_suite(o, r, in); };

    try
    {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    }
    catch(const CLI::ParseError& e)
    {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Report report;
    for(const auto& a : argv) report.command += (report.command.empty() ? "" : " ") + a;
    Inputs inputs;
    try
    {
        for(auto& [sub, body] : leaves)
        {
            if(!sub->parsed()) continue;
            body(report, inputs);
        }
        report.digest = fnv1a(inputs.text);
    }
    catch(const std::invalid_argument& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const std::out_of_range& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const SizeError& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const DomainError& e)
    {
        report.checks.add("domain", false, 0.0, e.what());
    }
    catch(const VerificationError& e)
    {
        report.checks.add("internal_verification", false, 0.0, e.what());
    }

    render_human(report, out);
    if(!o.json_path.empty())
    {
        std::ofstream f(o.json_path);
        if(!f)
        {
            err << "error: cannot write " << o.json_path << "\n";
            return 2;
        }
        f << render_json(report).dump(2) << "\n";
    }
    if(!o.csv_path.empty())
    {
        std::ofstream f(o.csv_path);
        if(!f)
        {
            err << "error: cannot write " << o.csv_path << "\n";
            return 2;
        }
        f << render_csv(report);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "wall time: " << format_double(std::round(secs * 1000.0) / 1000.0) << " s\n";
    return report.passed() ? 0 : 1;
}

} // namespace tgraph::cli

#endif
