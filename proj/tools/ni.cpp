#include "soundni/driver.hpp"
#include "soundni/redsoundse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace soundni;

namespace {

struct CommonOptions {
    std::string engine = "redsoundrse";
    std::string single = "soundse";
    std::string domain = "intervals";
    unsigned bound = 3;
    std::size_t path_cap = 4096;
    std::string solver;
    unsigned timeout_ms = 5000;
    bool brute_force = false;
    std::string format = "text";
};

void add_solver_options(CLI::App& app, CommonOptions& o) {
    app.add_option("--solver", o.solver, "SMT-LIB2 solver command (default: z3 on PATH)");
    app.add_option("--solver-timeout-ms", o.timeout_ms, "Per-query timeout");
    app.add_flag("--brute-force", o.brute_force, "Use the bounded enumeration solver");
}

AnalysisConfig make_config(const CommonOptions& o) {
    AnalysisConfig cfg;
    cfg.engine = parse_engine(o.engine);
    cfg.single_engine = parse_single_engine(o.single);
    cfg.domain = parse_domain(o.domain);
    cfg.bound = o.bound;
    cfg.path_cap = o.path_cap;
    cfg.solver.command = o.solver;
    cfg.solver.timeout_ms = o.timeout_ms;
    cfg.solver.brute_force = o.brute_force;
    cfg.validate();
    return cfg;
}

int exit_code(Verdict::Kind k) {
    switch (k) {
    case Verdict::Kind::Secure: return 0;
    case Verdict::Kind::Insecure: return 1;
    case Verdict::Kind::Inconclusive: return 2;
    }
    return 3;
}

int cmd_check(const std::string& file, const CommonOptions& o, bool bound_given, bool all_paths) {
    CorpusProgram cp = load_corpus_program(file);
    AnalysisConfig cfg = make_config(o);
    cfg.all_paths = all_paths;
    if (!bound_given) {
        cfg.bound = std::max(cfg.bound, cp.min_bound);
    }
    auto solver = make_solver(cfg.solver);
    Verdict v = verify_ni(cp.program, cfg, *solver);
    if (o.format == "json") {
        std::cout << verdict_json(cp.name, cfg, v) << "\n";
    } else {
        std::cout << verdict_text(cp.name, cfg, v);
    }
    return exit_code(v.kind);
}

int cmd_corpus(const std::string& dir, const std::string& matrix, const CommonOptions& o, const std::string& out) {
    if (matrix != "default") {
        throw std::invalid_argument("unknown matrix '" + matrix + "'");
    }
    AnalysisConfig base = make_config(o);
    auto solver = make_solver(base.solver);
    CorpusReport r = run_corpus(dir, default_matrix(base), *solver);
    std::string text = o.format == "json" ? report_json(r) + "\n" : report_text(r);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        f << text;
        if (!f) {
            throw std::runtime_error("cannot write " + out);
        }
    }
    return 0;
}

int cmd_explore(const std::string& file, const std::string& engine, const CommonOptions& o) {
    CorpusProgram cp = load_corpus_program(file);
    SolverConfig sc{o.solver, o.timeout_ms, o.brute_force};
    auto solver = make_solver(sc);
    SymbolFactory symbols;
    EngineContext ctx{*solver, symbols, o.bound, o.path_cap};
    PreciseStore k0{initial_sym_store(cp.program.all_vars), p_true()};
    nlohmann::ordered_json finals = nlohmann::ordered_json::array();
    auto add = [&](const PreciseStore& k, bool precise, const std::string& abs) {
        nlohmann::ordered_json j;
        j["store"] = to_string(k.rho);
        j["path"] = to_string(*k.path);
        j["precise"] = precise;
        if (!abs.empty()) {
            j["abstract"] = abs;
        }
        finals.push_back(j);
    };
    if (engine == "soundse") {
        for (const auto& f : se_explore(cp.program, k0, ctx)) {
            add(f.kappa, f.precise, "");
        }
    } else if (engine == "redsoundse") {
        AbstractState top = AbstractState::top(cp.program.all_vars);
        for (const auto& f : product_explore(cp.program, k0, top, ctx)) {
            add(f.kappa, f.precise, to_string(f.a));
        }
    } else {
        throw std::invalid_argument("unknown single-trace engine '" + engine + "'");
    }
    if (o.format == "json") {
        std::cout << finals.dump(2) << "\n";
    } else {
        for (const auto& f : finals) {
            std::cout << (f["precise"].get<bool>() ? "exact   " : "approx  ") << f["store"].get<std::string>() << "\n";
            std::cout << "        path " << f["path"].get<std::string>() << "\n";
            if (f.contains("abstract")) {
                std::cout << "        abs  " << f["abstract"].get<std::string>() << "\n";
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noninterference checker for a small while language"};
    app.require_subcommand(1);

    CommonOptions check_opts;
    bool all_paths = false;
    std::string check_file;
    auto* check = app.add_subcommand("check", "Check one program");
    check->add_option("file", check_file, "Program source")->required()->check(CLI::ExistingFile);
    check->add_option("--engine", check_opts.engine)->check(CLI::IsMember({"dep", "soundrse", "redsoundrse"}));
    check->add_option("--single-engine", check_opts.single)->check(CLI::IsMember({"soundse", "redsoundse"}));
    check->add_option("--domain", check_opts.domain)->check(CLI::IsMember({"intervals", "none"}));
    auto* bound_opt = check->add_option("--bound", check_opts.bound, "Loop unrolling bound");
    check->add_option("--path-cap", check_opts.path_cap);
    check->add_option("--format", check_opts.format)->check(CLI::IsMember({"text", "json"}));
    check->add_flag("--all-paths", all_paths, "Keep exploring after the first refutation");
    add_solver_options(*check, check_opts);

    CommonOptions corpus_opts;
    std::string corpus_dir;
    std::string matrix = "default";
    std::string out_file;
    auto* corpus = app.add_subcommand("corpus", "Run every engine configuration over a directory of programs");
    corpus->add_option("dir", corpus_dir)->required()->check(CLI::ExistingDirectory);
    corpus->add_option("--matrix", matrix);
    corpus->add_option("--bound", corpus_opts.bound);
    corpus->add_option("--path-cap", corpus_opts.path_cap);
    corpus->add_option("--format", corpus_opts.format)->check(CLI::IsMember({"text", "json"}));
    corpus->add_option("-o,--output", out_file);
    add_solver_options(*corpus, corpus_opts);

    CommonOptions explore_opts;
    std::string explore_file;
    std::string explore_engine = "soundse";
    auto* explore = app.add_subcommand("explore", "List the final states of a single-trace engine");
    explore->add_option("file", explore_file)->required()->check(CLI::ExistingFile);
    explore->add_option("--engine", explore_engine)->check(CLI::IsMember({"soundse", "redsoundse"}));
    explore->add_option("--bound", explore_opts.bound);
    explore->add_option("--path-cap", explore_opts.path_cap);
    explore->add_option("--format", explore_opts.format)->check(CLI::IsMember({"text", "json"}));
    add_solver_options(*explore, explore_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    try {
        if (*check) {
            return cmd_check(check_file, check_opts, bound_opt->count() > 0, all_paths);
        }
        if (*corpus) {
            return cmd_corpus(corpus_dir, matrix, corpus_opts, out_file);
        }
        return cmd_explore(explore_file, explore_engine, explore_opts);
    } catch (const ParseError& e) {
        std::cerr << "ni: parse error: " << e.what() << "\n";
    } catch (const ReplayFailure& e) {
        std::cerr << "ni: internal error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "ni: " << e.what() << "\n";
    }
    return 3;
}
