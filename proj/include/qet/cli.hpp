#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qet/desugar.hpp"
#include "qet/inference.hpp"
#include "qet/parser.hpp"
#include "qet/smt.hpp"
#include "qet/statefile.hpp"
#include "qet/wpt.hpp"

namespace qet {

namespace detail {

inline std::string approx(const QSqrtTwo& v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v.to_double());
    return buf;
}

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string describe_stmt(const Stmt* s) {
    switch (s->kind) {
        case Stmt::Kind::Skip: return "skip";
        case Stmt::Kind::AssignNat:
        case Stmt::Kind::AssignBool: return "assign " + s->var_name;
        case Stmt::Kind::If: return "if(" + std::to_string(s->label) + ")";
        case Stmt::Kind::While: return "while(" + std::to_string(s->label) + ")";
        case Stmt::Kind::GateApp: {
            std::string t = std::string("gate ") + gate_name(s->gate) + " ";
            for (std::size_t i = 0; i < s->qubit_names.size(); ++i) {
                if (i) t += ",";
                t += s->qubit_names[i];
            }
            return t;
        }
        case Stmt::Kind::Measure:
            return "meas(" + std::to_string(s->label) + ") " + s->qubit_names[0];
        default: return "sugar";
    }
}

inline void collect_labeled(const Stmt* s, std::vector<const Stmt*>& out) {
    if (!s) return;
    if (s->label >= 0) out.push_back(s);
    collect_labeled(s->s1.get(), out);
    collect_labeled(s->s2.get(), out);
}

struct LoadedProgram {
    Program parsed;
    Program analyzed;  // desugared, relabeled
};

inline LoadedProgram load_program(const std::string& path) {
    LoadedProgram lp;
    lp.parsed = parse_program(slurp_file(path));
    lp.analyzed = desugar(lp.parsed);
    return lp;
}

inline InitialState resolve_state(const Program& p, const std::string& state_path,
                                  const std::string& preset) {
    if (!state_path.empty() && !preset.empty())
        throw std::invalid_argument("use either --state or --preset, not both");
    if (!state_path.empty()) return load_state(slurp_file(state_path), p);
    return preset_state(preset.empty() ? "ket0" : preset, p);
}

inline Poly parse_post(std::string text, const StateSig& sig) {
    // Named form var(v) is shorthand for the bare classical variable.
    if (text.rfind("var(", 0) == 0 && text.back() == ')')
        text = text.substr(4, text.size() - 5);
    return parse_poly(text, sig);
}

inline Expectation poly_expectation(const Poly& poly, const StateSig& sig) {
    return [poly, &sig](const Store& s, const Density& rho) {
        return poly.eval(sig.encode_state(s, rho));
    };
}

inline void write_output(const std::string& text, const std::string& out_path,
                         std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f.good()) throw std::invalid_argument("cannot write '" + out_path + "'");
    f << text;
}

// ---- subcommand bodies ----------------------------------------------------

inline int cmd_check(const std::string& file, std::ostream& out) {
    LoadedProgram lp = load_program(file);
    const Program& p = lp.analyzed;
    out << "ok: " << file << "\n";
    out << "variables: " << p.bool_vars.size() << " bool, " << p.nat_vars.size()
        << " nat; qubits: " << p.qubit_vars.size() << "\n";
    if (!equal(lp.parsed, lp.analyzed))
        out << "desugared: "
            << (p.bool_vars.size() - lp.parsed.bool_vars.size()) +
                   (p.qubit_vars.size() - lp.parsed.qubit_vars.size())
            << " fresh declaration(s) added\n";
    std::vector<const Stmt*> labeled;
    collect_labeled(p.body.get(), labeled);
    out << "labels: " << labeled.size() << "\n";
    for (const Stmt* s : labeled) {
        out << "  " << s->label << "\t" << describe_stmt(s);
        if (s->line > 0) out << "\t(line " << s->line << ")";
        out << "\n";
    }
    return 0;
}

inline int cmd_run(const std::string& file, const std::string& state_path,
                   const std::string& preset, int steps, const std::string& out_path,
                   std::ostream& out) {
    LoadedProgram lp = load_program(file);
    const Program& p = lp.analyzed;
    InitialState init = resolve_state(p, state_path, preset);
    Config c = initial_config(p, init.store, init.rho);
    StepTrace t = run_n(c, p, steps);

    std::ostringstream os;
    os << "# trace of " << file << ", " << steps << " lifted step(s); exact values plus a "
          "15-digit decimal column (approx)\n";
    os << "step\tweight\tterminal_mass\tedl_prefix\tweight_approx\tterminal_mass_approx\t"
          "edl_prefix_approx\n";
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const StepRecord& r = t.steps[i];
        os << (i + 1) << "\t" << r.weight.str() << "\t" << r.terminal_mass.str() << "\t"
           << r.edl_prefix.str() << "\t" << approx(r.weight) << "\t"
           << approx(r.terminal_mass) << "\t" << approx(r.edl_prefix) << "\n";
    }
    os << "final distribution: " << t.dist.size() << " configuration(s), terminal mass "
       << terminal_mass(t.dist).str() << " (" << approx(terminal_mass(t.dist)) << ")\n";
    for (const auto& wc : t.dist) {
        os << "  " << wc.weight.str() << "\t(" << approx(wc.weight) << ")\t"
           << (wc.config.terminal() ? "terminal" : "at " + describe_stmt(wc.config.cont.back()))
           << "\t" << format_store(wc.config.store, p) << "\t" << format_density(wc.config.rho)
           << "\n";
    }
    write_output(os.str(), out_path, out);
    return 0;
}

inline int cmd_wp(const std::string& file, const std::string& state_path,
                  const std::string& preset, const std::string& post, int steps, bool edl_mode,
                  const std::string& out_path, std::ostream& out) {
    LoadedProgram lp = load_program(file);
    const Program& p = lp.analyzed;
    StateSig sig = StateSig::of(p);
    InitialState init = resolve_state(p, state_path, preset);
    Config c = initial_config(p, init.store, init.rho);

    std::ostringstream os;
    if (edl_mode) {
        StepTrace t = run_n(c, p, steps);
        os << "# expected-derivation-length prefixes of " << file << ", " << steps
           << " lifted step(s)\n";
        os << "step\tedl_prefix\tterminal_mass\tedl_prefix_approx\tterminal_mass_approx\n";
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            const StepRecord& r = t.steps[i];
            os << (i + 1) << "\t" << r.edl_prefix.str() << "\t" << r.terminal_mass.str()
               << "\t" << approx(r.edl_prefix) << "\t" << approx(r.terminal_mass) << "\n";
        }
        os << "edl_" << steps << " = " << t.edl_prefix().str() << " ("
           << approx(t.edl_prefix()) << "), terminal mass >= "
           << t.terminal_mass_bound().str() << " (" << approx(t.terminal_mass_bound())
           << ")\n";
    } else {
        Poly post_poly = parse_post(post, sig);
        Expectation f = poly_expectation(post_poly, sig);
        auto series = wp_approx_series(p, c, f, steps);
        os << "# n-step pre-expectation of `" << post << "` for " << file << "\n";
        os << "step\twp\tincrement\twp_approx\tincrement_approx\n";
        QSqrtTwo prev(0);
        for (std::size_t n = 0; n < series.size(); ++n) {
            QSqrtTwo inc = series[n] - prev;
            if (n > 0 && inc.sign() < 0)
                throw std::logic_error("wp approximation lost monotonicity");
            os << n << "\t" << series[n].str() << "\t" << inc.str() << "\t"
               << approx(series[n]) << "\t" << approx(inc) << "\n";
            prev = series[n];
        }
        os << "wp_" << steps << " = " << series.back().str() << " ("
           << approx(series.back()) << ")\n";
    }
    write_output(os.str(), out_path, out);
    return 0;
}

inline int cmd_infer(const std::string& file, const std::string& post,
                     const std::string& assign_path, int degree, const std::string& mode,
                     int samples, std::uint64_t seed, int jobs, const std::string& out_path,
                     std::ostream& out) {
    LoadedProgram lp = load_program(file);
    const Program& p = lp.analyzed;
    StateSig sig = StateSig::of(p);
    InferResult inferred = infer_constraints(p);

    std::ostringstream os;
    os << "constraints: " << inferred.constraints.size() << "\n";
    os << dump_constraints(inferred);

    Assignment alpha;
    if (!assign_path.empty()) alpha = parse_assignment(slurp_file(assign_path), sig);
    if (!post.empty()) {
        Poly f = parse_post(post, sig);
        alpha.templates.erase(-1);
        alpha.templates.emplace(-1, std::move(f));
    }

    if (mode == "check") {
        if (alpha.templates.empty())
            throw std::invalid_argument("check mode needs --assign (and/or --post)");
        auto states = sample_states(p, samples, seed);
        CheckResult r = check_assignment(p, alpha, inferred.constraints, states, jobs);
        if (!r.refuted) {
            os << "check: NotRefuted (" << samples << " samples, seed " << seed << ")\n";
            write_output(os.str(), out_path, out);
            return 0;
        }
        Interpretation interp = alpha.interpret(sig);
        const Constraint& c = inferred.constraints[r.constraint_index];
        os << "check: RefutedAt sample " << r.sample_index << ", constraint G"
           << r.constraint_index << "\n";
        os << "  constraint: " << c.str() << "\n";
        os << "  store: " << format_store(r.witness.store, p) << "\n";
        os << "  rho:   " << format_density(r.witness.rho) << "\n";
        QSqrtTwo lhs = eval_eterm(c.lhs, interp, r.witness.store, r.witness.rho, p);
        QSqrtTwo rhs = interp.lookup(c.rhs_label)(r.witness.store, r.witness.rho);
        os << "  lhs = " << lhs.str() << " (" << approx(lhs) << ")\n";
        os << "  rhs = " << rhs.str() << " (" << approx(rhs) << ")\n";
        write_output(os.str(), out_path, out);
        return 2;
    }
    if (mode == "export-check") {
        if (alpha.templates.empty())
            throw std::invalid_argument("export-check mode needs --assign (and/or --post)");
        write_output(export_smt_check(p, alpha, inferred), out_path, out);
        return 0;
    }
    if (mode == "export-synth") {
        auto it = alpha.templates.find(-1);
        if (it == alpha.templates.end())
            throw std::invalid_argument("export-synth mode needs --post (or an assignment "
                                        "file defining X)");
        write_output(export_smt_synthesis(p, it->second, inferred, degree), out_path, out);
        return 0;
    }
    throw std::invalid_argument("unknown mode '" + mode +
                                "' (expected check, export-check or export-synth)");
}

}  // namespace detail

// Command-line front end; returns the process exit code.
// 0 = success / NotRefuted, 1 = usage or input error, 2 = RefutedAt.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact analysis of quantum imperative programs"};
    app.require_subcommand(1);

    std::string file, state_path, preset, post, assign_path, mode = "check", out_path;
    int steps = 20, degree = 2, samples = 1000, jobs = 1;
    std::uint64_t seed = 0;

    auto add_file = [&](CLI::App* cmd) {
        cmd->add_option("file", file, "program file (.qps)")->required();
    };
    auto add_state = [&](CLI::App* cmd) {
        cmd->add_option("--state", state_path, "initial-state JSON file");
        cmd->add_option("--preset", preset, "named initial state: ket0 or ketplus");
    };

    CLI::App* check = app.add_subcommand("check", "parse and typecheck; print the label table");
    add_file(check);

    CLI::App* run = app.add_subcommand("run", "execute the step semantics exactly");
    add_file(run);
    add_state(run);
    run->add_option("--steps", steps, "number of lifted steps");
    run->add_option("--out", out_path, "write the trace to a file");

    CLI::App* wp = app.add_subcommand("wp", "approximate the weakest pre-expectation");
    add_file(wp);
    add_state(wp);
    wp->add_option("--post", post, "post-expectation (template mini-language)")->required();
    wp->add_option("--steps", steps, "number of lifted steps");
    wp->add_option("--out", out_path, "write the series to a file");

    CLI::App* edl = app.add_subcommand("edl", "expected-derivation-length prefixes");
    add_file(edl);
    add_state(edl);
    edl->add_option("--steps", steps, "number of lifted steps");
    edl->add_option("--out", out_path, "write the series to a file");

    CLI::App* infer = app.add_subcommand("infer", "generate and check symbolic constraints");
    add_file(infer);
    infer->add_option("--post", post, "post-expectation bound to X");
    infer->add_option("--assign", assign_path, "assignment file for the X_l variables");
    infer->add_option("--degree", degree, "template degree for export-synth");
    infer->add_option("--mode", mode, "check | export-check | export-synth");
    infer->add_option("--samples", samples, "number of sampled states in check mode");
    infer->add_option("--seed", seed, "sampling seed");
    infer->add_option("--jobs", jobs, "worker threads for check mode");
    infer->add_option("--out", out_path, "write the report / SMT file to a path");

    std::vector<const char*> argv;
    argv.push_back("qet");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }

    try {
        if (steps < 0 || samples < 1 || degree < 0 || jobs < 1)
            throw std::invalid_argument("numeric options must be non-negative (samples/jobs "
                                        "positive)");
        if (check->parsed()) return detail::cmd_check(file, out);
        if (run->parsed())
            return detail::cmd_run(file, state_path, preset, steps, out_path, out);
        if (wp->parsed())
            return detail::cmd_wp(file, state_path, preset, post, steps, false, out_path, out);
        if (edl->parsed())
            return detail::cmd_wp(file, state_path, preset, post, steps, true, out_path, out);
        if (infer->parsed())
            return detail::cmd_infer(file, post, assign_path, degree, mode, samples, seed, jobs,
                                     out_path, out);
    } catch (const SourceError& e) {
        err << file << ":" << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "no subcommand\n";
    return 1;
}

}  // namespace qet
