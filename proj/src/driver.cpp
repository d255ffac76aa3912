#include "soundni/driver.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

namespace soundni {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* to_string(EngineKind e) {
    switch (e) {
    case EngineKind::Dep: return "dep";
    case EngineKind::SoundRSE: return "soundrse";
    case EngineKind::RedSoundRSE: return "redsoundrse";
    }
    return "?";
}

const char* to_string(SingleEngine e) { return e == SingleEngine::SoundSE ? "soundse" : "redsoundse"; }

const char* to_string(DomainKind d) { return d == DomainKind::Intervals ? "intervals" : "none"; }

EngineKind parse_engine(const std::string& s) {
    if (s == "dep") return EngineKind::Dep;
    if (s == "soundrse") return EngineKind::SoundRSE;
    if (s == "redsoundrse") return EngineKind::RedSoundRSE;
    throw std::invalid_argument("unknown engine '" + s + "'");
}

SingleEngine parse_single_engine(const std::string& s) {
    if (s == "soundse") return SingleEngine::SoundSE;
    if (s == "redsoundse") return SingleEngine::RedSoundSE;
    throw std::invalid_argument("unknown single-trace engine '" + s + "'");
}

DomainKind parse_domain(const std::string& s) {
    if (s == "intervals") return DomainKind::Intervals;
    if (s == "none") return DomainKind::None;
    throw std::invalid_argument("unknown domain '" + s + "'");
}

void AnalysisConfig::validate() const {
    if (single_engine == SingleEngine::RedSoundSE && domain != DomainKind::Intervals) {
        throw std::invalid_argument("redsoundse needs the intervals domain");
    }
    if (bound == 0) {
        throw std::invalid_argument("bound must be positive");
    }
    if (path_cap == 0) {
        throw std::invalid_argument("path cap must be positive");
    }
}

std::string AnalysisConfig::label() const {
    if (engine == EngineKind::Dep) {
        return "dep";
    }
    return std::string(to_string(engine)) + "+" + to_string(single_engine);
}

const char* to_string(Verdict::Kind k) {
    switch (k) {
    case Verdict::Kind::Secure: return "secure";
    case Verdict::Kind::Insecure: return "insecure";
    case Verdict::Kind::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(PathVerdict::Kind k) {
    switch (k) {
    case PathVerdict::Kind::Infeasible: return "infeasible";
    case PathVerdict::Kind::SecurePath: return "secure";
    case PathVerdict::Kind::Refutation: return "refutation";
    case PathVerdict::Kind::Alarm: return "alarm";
    }
    return "?";
}

RelSymStore initial_rel_store(const Program& p) {
    RelSymStore rho;
    for (const auto& x : p.all_vars) {
        if (p.low_vars.count(x)) {
            rho.emplace(x, RelSymExpr::single(s_sym(initial_symbol(x))));
        } else {
            rho.emplace(x, RelSymExpr::pair(s_sym(initial_symbol(x, 0)), s_sym(initial_symbol(x, 1))));
        }
    }
    return rho;
}

RelSymStore modif_dep(const RelSymStore& rho, const Command& c, const VarSet& low, SymbolFactory& symbols) {
    RelSymStore out = rho;
    for (const auto& x : assigned_vars(c)) {
        if (low.count(x)) {
            out.insert_or_assign(x, RelSymExpr::single(s_sym(symbols.fresh(x))));
        } else {
            out.insert_or_assign(x, RelSymExpr::pair(s_sym(symbols.fresh(x)), s_sym(symbols.fresh(x))));
        }
    }
    return out;
}

LoopHavoc dependence_havoc(Solver& solver, SymbolFactory& symbols) {
    return [&solver, &symbols](const RelState& s, const Command& loop) {
        DepState d = dep_analyze(loop, PcLevel::Low, tau_sym_to_dep(s.kappa.rho, s.kappa.path, solver));
        return modif_dep(s.kappa.rho, loop, lambda_dep_to_low(d), symbols);
    };
}

RelOptions rel_options(const AnalysisConfig& cfg, Solver& solver, SymbolFactory& symbols) {
    RelOptions opts;
    opts.product = cfg.single_engine == SingleEngine::RedSoundSE;
    opts.product_opts.analyze = cfg.analyze;
    if (cfg.engine == EngineKind::RedSoundRSE) {
        opts.havoc = dependence_havoc(solver, symbols);
    }
    return opts;
}

std::vector<RelTransition> rsrse_step(const RelState& s, const EngineContext& ctx, const AnalysisConfig& cfg) {
    AnalysisConfig c = cfg;
    c.engine = EngineKind::RedSoundRSE;
    return srse_step(s, ctx, rel_options(c, ctx.solver, ctx.symbols));
}

PathVerdict classify_path(const RelPreciseStore& kappa, bool precise, const VarSet& low, Solver& solver) {
    PathVerdict out;
    if (solver.check_sat(kappa.path).unsat()) {
        out.kind = PathVerdict::Kind::Infeasible;
        return out;
    }
    std::vector<SymPathPtr> differ;
    std::vector<std::string> names;
    for (const auto& x : low) {
        const RelSymExpr& e = kappa.rho.at(x);
        if (e.is_single() || prove_equal(solver, e.proj(0), e.proj(1), kappa.path)) {
            continue;
        }
        differ.push_back(p_cmp(CmpOp::Ne, e.proj(0), e.proj(1)));
        names.push_back(x);
    }
    if (differ.empty()) {
        out.kind = PathVerdict::Kind::SecurePath;
        return out;
    }
    if (!precise) {
        out.kind = PathVerdict::Kind::Alarm;
        return out;
    }
    SatResult r = solver.check_sat(p_and(kappa.path, p_disj(differ)));
    if (r.unsat()) {
        out.kind = PathVerdict::Kind::SecurePath;
        return out;
    }
    if (!r.sat()) {
        out.kind = PathVerdict::Kind::Alarm;
        return out;
    }
    out.kind = PathVerdict::Kind::Refutation;
    out.model = std::move(r.model);
    for (std::size_t i = 0; i < differ.size(); ++i) {
        if (eval_path(*differ[i], out.model)) {
            out.witness = names[i];
            break;
        }
    }
    return out;
}

CounterExample replay(const Valuation& nu, const RelSymStore& rho0, const Program& p, std::size_t fuel) {
    CounterExample ce;
    ce.nu = nu;
    for (const auto& [x, e] : rho0) {
        for (int side : {0, 1}) {
            SymSet syms;
            collect_symbols(*e.proj(side), syms);
            for (const auto& s : syms) {
                ce.nu.emplace(s, Value(0));
            }
        }
    }
    for (const auto& [x, e] : rho0) {
        ce.mu0[x] = eval_sym(*e.proj(0), ce.nu);
        ce.mu1[x] = eval_sym(*e.proj(1), ce.nu);
    }
    if (!low_equal(ce.mu0, ce.mu1, p.low_vars)) {
        throw ReplayFailure("replay: initial stores are not low-equal");
    }
    Outcome r0 = run(p, ce.mu0, fuel);
    Outcome r1 = run(p, ce.mu1, fuel);
    if (!r0.terminated() || !r1.terminated()) {
        throw ReplayFailure("replay: a run did not terminate within " + std::to_string(fuel) + " steps");
    }
    ce.out0 = *r0.final_store;
    ce.out1 = *r1.final_store;
    for (const auto& x : p.low_vars) {
        if (ce.out0.at(x) != ce.out1.at(x)) {
            ce.witness = x;
            return ce;
        }
    }
    throw ReplayFailure("replay: final stores agree on every low variable");
}

namespace {

Verdict verify_dep(const Program& p) {
    Verdict v;
    v.paths = 1;
    DepState d = dep_analyze(*p.body, PcLevel::Low, DepState{p.low_vars});
    for (const auto& x : p.low_vars) {
        if (!d.low_agree.count(x)) {
            v.alarms.push_back({"low variable '" + x + "' may depend on high inputs", "", "", false});
        }
    }
    v.kind = v.alarms.empty() ? Verdict::Kind::Secure : Verdict::Kind::Inconclusive;
    return v;
}

std::string unproven_lows(const RelSymStore& rho, const VarSet& low) {
    std::string out;
    for (const auto& x : low) {
        if (!rho.at(x).is_single()) {
            out += (out.empty() ? "" : ", ") + x;
        }
    }
    return out;
}

} // namespace

Verdict verify_ni(const Program& p, const AnalysisConfig& cfg, Solver& solver) {
    cfg.validate();
    if (cfg.engine == EngineKind::Dep) {
        return verify_dep(p);
    }
    Verdict v;
    SymbolFactory symbols;
    EngineContext ctx{solver, symbols, cfg.bound, cfg.path_cap};
    RelOptions opts = rel_options(cfg, solver, symbols);
    RelSymStore rho0 = initial_rel_store(p);
    try {
        srse_explore(p, rho0, ctx, opts, [&](const RelFinal& f) {
            ++v.paths;
            PathVerdict pv = classify_path(f.kappa, f.precise, p.low_vars, solver);
            switch (pv.kind) {
            case PathVerdict::Kind::Infeasible:
            case PathVerdict::Kind::SecurePath:
                return true;
            case PathVerdict::Kind::Refutation:
                v.counterexamples.push_back(replay(pv.model, rho0, p, cfg.fuel));
                return cfg.all_paths;
            case PathVerdict::Kind::Alarm:
                v.alarms.push_back({"low variables not proven equal: " + unproven_lows(f.kappa.rho, p.low_vars),
                                    to_string(f.kappa.rho), to_string(*f.kappa.path), f.precise});
                return true;
            }
            return true;
        });
    } catch (const PathCapExceeded& e) {
        v.reason = e.what();
        if (v.counterexamples.empty()) {
            v.kind = Verdict::Kind::Inconclusive;
            return v;
        }
    }
    if (!v.counterexamples.empty()) {
        v.kind = Verdict::Kind::Insecure;
    } else {
        v.kind = v.alarms.empty() ? Verdict::Kind::Secure : Verdict::Kind::Inconclusive;
    }
    return v;
}

Verdict verify_ni(const Program& p, const AnalysisConfig& cfg) {
    auto solver = make_solver(cfg.solver);
    return verify_ni(p, cfg, *solver);
}

CorpusProgram load_corpus_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    CorpusProgram cp;
    cp.path = path;
    cp.name = fs::path(path).stem().string();
    cp.program = parse_program(text);
    static const std::regex bound_re(R"(//\s*ni:bound\s+(\d+))");
    static const std::regex expect_re(R"(//\s*ni:expect\s+(secure|insecure))");
    std::smatch m;
    if (std::regex_search(text, m, bound_re)) {
        cp.min_bound = static_cast<unsigned>(std::stoul(m[1].str()));
    }
    if (std::regex_search(text, m, expect_re)) {
        cp.expect_secure = m[1].str() == "secure";
    }
    return cp;
}

std::vector<CorpusProgram> load_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("corpus directory not found: " + dir);
    }
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".imp") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<CorpusProgram> out;
    for (const auto& f : files) {
        out.push_back(load_corpus_program(f));
    }
    return out;
}

std::vector<AnalysisConfig> default_matrix(const AnalysisConfig& base) {
    std::vector<AnalysisConfig> out;
    AnalysisConfig dep = base;
    dep.engine = EngineKind::Dep;
    out.push_back(dep);
    for (auto engine : {EngineKind::SoundRSE, EngineKind::RedSoundRSE}) {
        for (auto single : {SingleEngine::SoundSE, SingleEngine::RedSoundSE}) {
            AnalysisConfig c = base;
            c.engine = engine;
            c.single_engine = single;
            c.domain = DomainKind::Intervals;
            out.push_back(c);
        }
    }
    return out;
}

std::string cell_label(const Verdict& v, const std::optional<bool>& expect_secure) {
    switch (v.kind) {
    case Verdict::Kind::Secure: return "Secure";
    case Verdict::Kind::Insecure: return "Refutation";
    case Verdict::Kind::Inconclusive: return expect_secure.value_or(false) ? "False alarm" : "Alarm";
    }
    return "?";
}

CorpusReport run_corpus(const std::vector<CorpusProgram>& programs, const std::vector<AnalysisConfig>& matrix,
                        Solver& solver) {
    CorpusReport report;
    for (const auto& c : matrix) {
        report.columns.push_back(c.label());
    }
    for (const auto& cp : programs) {
        CorpusRow row{cp.name, cp.expect_secure, {}};
        for (auto cfg : matrix) {
            cfg.bound = std::max(cfg.bound, cp.min_bound);
            auto start = std::chrono::steady_clock::now();
            Verdict v = verify_ni(cp.program, cfg, solver);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::string label = cell_label(v, cp.expect_secure);
            row.cells.push_back({std::move(v), std::move(label), secs});
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

CorpusReport run_corpus(const std::string& dir, const std::vector<AnalysisConfig>& matrix, Solver& solver) {
    return run_corpus(load_corpus(dir), matrix, solver);
}

namespace {

json value_json(const Value& v) {
    if (fits_int64(v)) {
        return to_int64(v);
    }
    return to_string(v);
}

json store_json(const Store& mu) {
    json out = json::object();
    for (const auto& [x, v] : mu) {
        out[x] = value_json(v);
    }
    return out;
}

json config_json(const AnalysisConfig& cfg) {
    json out;
    out["engine"] = to_string(cfg.engine);
    if (cfg.engine != EngineKind::Dep) {
        out["single_engine"] = to_string(cfg.single_engine);
        out["domain"] = to_string(cfg.domain);
        out["bound"] = cfg.bound;
        out["path_cap"] = cfg.path_cap;
    }
    return out;
}

json alarm_json(const AlarmPath& a) {
    json out;
    out["description"] = a.description;
    if (!a.store.empty()) {
        out["store"] = a.store;
        out["path"] = a.path;
        out["precise"] = a.precise;
    }
    return out;
}

} // namespace

std::string verdict_json(const std::string& program, const AnalysisConfig& cfg, const Verdict& v) {
    json out;
    out["program"] = program;
    out["config"] = config_json(cfg);
    out["verdict"] = to_string(v.kind);
    out["paths"] = v.paths;
    if (!v.counterexamples.empty()) {
        const CounterExample& ce = v.counterexamples.front();
        json c;
        json nu = json::object();
        for (const auto& [s, val] : ce.nu) {
            nu[s.name] = value_json(val);
        }
        c["valuation"] = nu;
        c["store0"] = store_json(ce.mu0);
        c["store1"] = store_json(ce.mu1);
        c["out0"] = store_json(ce.out0);
        c["out1"] = store_json(ce.out1);
        c["witness"] = ce.witness;
        out["counterexample"] = c;
    }
    if (!v.alarms.empty()) {
        json alarms = json::array();
        for (const auto& a : v.alarms) {
            alarms.push_back(alarm_json(a));
        }
        out["alarms"] = alarms;
    }
    if (!v.reason.empty()) {
        out["reason"] = v.reason;
    }
    return out.dump(2);
}

std::string verdict_text(const std::string& program, const AnalysisConfig& cfg, const Verdict& v) {
    std::ostringstream out;
    out << program << " [" << cfg.label();
    if (cfg.engine != EngineKind::Dep) {
        out << ", k=" << cfg.bound;
    }
    out << "]: " << to_string(v.kind) << " (" << v.paths << " paths)\n";
    if (!v.counterexamples.empty()) {
        const CounterExample& ce = v.counterexamples.front();
        out << "  run 0: " << to_string(ce.mu0) << " -> " << to_string(ce.out0) << "\n";
        out << "  run 1: " << to_string(ce.mu1) << " -> " << to_string(ce.out1) << "\n";
        out << "  low variable '" << ce.witness << "' differs\n";
    }
    for (const auto& a : v.alarms) {
        out << "  alarm: " << a.description << "\n";
        if (!a.store.empty()) {
            out << "    store " << a.store << "\n    path  " << a.path << (a.precise ? "" : "  (approximated)") << "\n";
        }
    }
    if (!v.reason.empty()) {
        out << "  " << v.reason << "\n";
    }
    return out.str();
}

std::string report_json(const CorpusReport& r) {
    json out;
    out["columns"] = r.columns;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j;
        j["program"] = row.program;
        if (row.expect_secure) {
            j["expect"] = *row.expect_secure ? "secure" : "insecure";
        }
        json cells = json::object();
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            const auto& c = row.cells[i];
            json cell;
            cell["verdict"] = to_string(c.verdict.kind);
            cell["label"] = c.label;
            cell["paths"] = c.verdict.paths;
            cell["alarms"] = c.verdict.alarms.size();
            cells[r.columns[i]] = cell;
        }
        j["cells"] = cells;
        rows.push_back(j);
    }
    out["rows"] = rows;
    return out.dump(2);
}

std::string report_text(const CorpusReport& r) {
    std::vector<std::size_t> width;
    std::size_t first = 7;
    for (const auto& row : r.rows) {
        first = std::max(first, row.program.size());
    }
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        std::size_t w = r.columns[i].size();
        for (const auto& row : r.rows) {
            w = std::max(w, row.cells[i].label.size());
        }
        width.push_back(w);
    }
    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    out << pad("program", first);
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        out << "  " << pad(r.columns[i], width[i]);
    }
    out << "\n";
    double total = 0;
    for (const auto& row : r.rows) {
        out << pad(row.program, first);
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            out << "  " << pad(row.cells[i].label, width[i]);
            total += row.cells[i].seconds;
        }
        out << "\n";
    }
    out << "total " << std::fixed << std::setprecision(2) << total << " s\n";
    return out.str();
}

} // namespace soundni
