#include "soundni/solver.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fcntl.h>
#include <filesystem>
#include <optional>
#include <poll.h>
#include <spawn.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace soundni {

const char* to_string(SatResult::Kind k) {
    switch (k) {
    case SatResult::Kind::Sat: return "sat";
    case SatResult::Kind::Unsat: return "unsat";
    case SatResult::Kind::Unknown: return "unknown";
    }
    return "?";
}

std::string smt_symbol(const std::string& name) {
    static const std::string extra = "~!@$%^&*_-+=<>.?/";
    bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
    for (char ch : name) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && extra.find(ch) == std::string::npos) {
            simple = false;
        }
    }
    return simple ? name : "|" + name + "|";
}

namespace {

std::string smt_value(const Value& v) { return v < 0 ? "(- " + to_string(Value(-v)) + ")" : to_string(v); }

const char* smt_op(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    }
    return "?";
}

const char* smt_op(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "distinct";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

} // namespace

std::string smt_term(const SymExpr& e) {
    if (const auto* c = std::get_if<SymExpr::Const>(&e.node)) {
        return smt_value(c->value);
    }
    if (const auto* s = std::get_if<SymExpr::Sym>(&e.node)) {
        return smt_symbol(s->symbol.name);
    }
    const auto& b = std::get<SymExpr::Bin>(e.node);
    return std::string("(") + smt_op(b.op) + " " + smt_term(*b.lhs) + " " + smt_term(*b.rhs) + ")";
}

std::string smt_term(const SymPath& p) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymPath::True>) {
                return "true";
            } else if constexpr (std::is_same_v<T, SymPath::Cmp>) {
                return std::string("(") + smt_op(n.op) + " " + smt_term(*n.lhs) + " " + smt_term(*n.rhs) + ")";
            } else if constexpr (std::is_same_v<T, SymPath::And>) {
                return "(and " + smt_term(*n.lhs) + " " + smt_term(*n.rhs) + ")";
            } else {
                return "(not " + smt_term(*n.inner) + ")";
            }
        },
        p.node);
}

namespace {

std::string assertion(const SymPathPtr& pi) {
    auto cs = conjuncts(pi);
    if (cs.empty()) {
        return "(assert true)\n";
    }
    if (cs.size() == 1) {
        return "(assert " + smt_term(*cs.front()) + ")\n";
    }
    std::string out = "(assert (and";
    for (const auto& c : cs) {
        out += " " + smt_term(*c);
    }
    return out + "))\n";
}

std::string declarations(const SymSet& symbols) {
    std::string out;
    for (const auto& s : symbols) {
        out += "(declare-const " + smt_symbol(s.name) + " Int)\n";
    }
    return out;
}

std::string logic_for(const SymPath& pi) { return has_nonlinear(pi) ? "QF_NIA" : "QF_LIA"; }

} // namespace

std::string emit_smtlib(const SymPath& pi, const SymSet& symbols) {
    auto ptr = std::shared_ptr<const SymPath>(std::shared_ptr<const SymPath>{}, &pi);
    return "(set-logic " + logic_for(pi) + ")\n" + declarations(symbols) + assertion(ptr) + "(check-sat)\n(get-model)\n";
}

namespace {

struct SNode {
    std::string atom;
    std::vector<SNode> items;
    bool is_list = false;
};

class SexprReader {
public:
    explicit SexprReader(const std::string& s) : s_(s) {}

    std::vector<SNode> read_all() {
        std::vector<SNode> out;
        skip_ws();
        while (i_ < s_.size()) {
            out.push_back(read());
            skip_ws();
        }
        return out;
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
    }

    SNode read() {
        skip_ws();
        if (i_ >= s_.size()) {
            throw std::runtime_error("model: unexpected end of input");
        }
        SNode n;
        if (s_[i_] == '(') {
            ++i_;
            n.is_list = true;
            skip_ws();
            while (i_ < s_.size() && s_[i_] != ')') {
                n.items.push_back(read());
                skip_ws();
            }
            if (i_ >= s_.size()) {
                throw std::runtime_error("model: unbalanced parentheses");
            }
            ++i_;
            return n;
        }
        if (s_[i_] == ')') {
            throw std::runtime_error("model: unexpected ')'");
        }
        if (s_[i_] == '|') {
            std::size_t j = s_.find('|', i_ + 1);
            if (j == std::string::npos) {
                throw std::runtime_error("model: unterminated quoted symbol");
            }
            n.atom = s_.substr(i_ + 1, j - i_ - 1);
            i_ = j + 1;
            return n;
        }
        std::size_t j = i_;
        while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != '(' && s_[j] != ')') {
            ++j;
        }
        n.atom = s_.substr(i_, j - i_);
        i_ = j;
        return n;
    }
};

Value model_value(const SNode& n) {
    if (!n.is_list) {
        return parse_value(n.atom);
    }
    if (n.items.size() == 2 && !n.items[0].is_list && n.items[0].atom == "-") {
        return -model_value(n.items[1]);
    }
    throw std::runtime_error("model: unsupported value form");
}

void collect_definitions(const SNode& n, std::map<std::string, Value>& out) {
    if (!n.is_list) {
        return;
    }
    if (!n.items.empty() && !n.items[0].is_list && n.items[0].atom == "define-fun") {
        if (n.items.size() != 5) {
            throw std::runtime_error("model: malformed define-fun");
        }
        const SNode& sort = n.items[3];
        if (!sort.is_list && sort.atom == "Int" && n.items[2].is_list && n.items[2].items.empty()) {
            out[n.items[1].atom] = model_value(n.items[4]);
        }
        return;
    }
    for (const auto& item : n.items) {
        collect_definitions(item, out);
    }
}

std::optional<SymPathPtr> negation_of(const SymPathPtr& p) {
    if (const auto* n = std::get_if<SymPath::Not>(&p->node)) {
        return n->inner;
    }
    if (const auto* c = std::get_if<SymPath::Cmp>(&p->node)) {
        return std::make_shared<SymPath>(SymPath{SymPath::Cmp{negate(c->op), c->lhs, c->rhs}});
    }
    return std::nullopt;
}

bool obviously_contradictory(const std::vector<SymPathPtr>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
        auto neg = negation_of(cs[i]);
        if (!neg) {
            continue;
        }
        for (std::size_t j = 0; j < cs.size(); ++j) {
            if (j != i && equal(**neg, *cs[j])) {
                return true;
            }
        }
    }
    return false;
}

} // namespace

std::map<std::string, Value> parse_model(const std::string& text) {
    std::map<std::string, Value> out;
    for (const auto& n : SexprReader(text).read_all()) {
        collect_definitions(n, out);
    }
    return out;
}

SatResult Solver::check_sat(const SymPathPtr& pi) {
    auto cs = conjuncts(pi);
    bool has_false = false;
    for (const auto& c : cs) {
        has_false = has_false || is_false(*c);
    }
    SymSet syms = symbols_of(*pi);
    std::optional<SatResult> local;
    if (has_false || obviously_contradictory(cs)) {
        local = SatResult{SatResult::Kind::Unsat, {}};
    } else if (syms.empty()) {
        local = eval_path(*pi, {}) ? SatResult{SatResult::Kind::Sat, {}} : SatResult{SatResult::Kind::Unsat, {}};
    }
    if (local) {
        std::lock_guard<std::mutex> lock(mutex_);
        ++stats_.queries;
        ++stats_.presolved;
        return *local;
    }

    Query q{logic_for(*pi), std::vector<SymValue>(syms.begin(), syms.end()), declarations(syms) + assertion(pi)};
    std::string key = q.logic + "\n" + q.script;

    std::lock_guard<std::mutex> lock(mutex_);
    ++stats_.queries;
    if (auto it = cache_.find(key); it != cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }
    ++stats_.backend_calls;
    SatResult r = solve(q, *pi);
    if (r.sat()) {
        Valuation total;
        for (const auto& s : q.symbols) {
            auto it = r.model.find(s);
            total[s] = it == r.model.end() ? Value(0) : it->second;
        }
        r.model = std::move(total);
        bool valid = false;
        try {
            valid = eval_path(*pi, r.model);
        } catch (const MissingSymbol&) {
            valid = false;
        }
        if (!valid) {
            ++stats_.rejected_models;
            r = SatResult{SatResult::Kind::Unknown, {}};
        }
    }
    if (cache_.size() > 200000) {
        cache_.clear();
    }
    cache_.emplace(std::move(key), r);
    return r;
}

SolverStats Solver::stats() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return stats_;
}

bool may_sat(Solver& s, const SymPathPtr& pi) { return !s.check_sat(pi).unsat(); }

bool prove_equal(Solver& s, const SymExprPtr& e0, const SymExprPtr& e1, const SymPathPtr& pi) {
    if (equal(*e0, *e1)) {
        return true;
    }
    const Value* c0 = as_const(*e0);
    const Value* c1 = as_const(*e1);
    if (c0 && c1) {
        return false;
    }
    return s.check_sat(p_and(pi, p_cmp(CmpOp::Ne, e0, e1))).unsat();
}

namespace {

long now_ms() {
    using namespace std::chrono;
    return static_cast<long>(duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count());
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

ProcessSolver::ProcessSolver(std::string command, unsigned timeout_ms) : timeout_ms_(timeout_ms) {
    argv_ = split_words(command);
    if (argv_.empty()) {
        throw std::invalid_argument("empty solver command");
    }
    std::string base = std::filesystem::path(argv_.front()).filename().string();
    if (argv_.size() == 1 && base.rfind("z3", 0) == 0) {
        argv_.push_back("-in");
        argv_.push_back("-smt2");
        argv_.push_back("-t:" + std::to_string(timeout_ms_));
    }
    std::signal(SIGPIPE, SIG_IGN);
}

ProcessSolver::~ProcessSolver() { stop(); }

bool ProcessSolver::start() {
    if (pid_ > 0) {
        return true;
    }
    if (failed_to_start_) {
        return false;
    }
    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) {
        return false;
    }
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        return false;
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in_pipe[0], 0);
    posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 1);
    posix_spawn_file_actions_addopen(&fa, 2, "/dev/null", O_WRONLY, 0);
    std::vector<char*> args;
    for (auto& a : argv_) {
        args.push_back(a.data());
    }
    args.push_back(nullptr);
    pid_t pid = -1;
    int rc = posix_spawnp(&pid, args[0], &fa, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
        close(in_pipe[1]);
        close(out_pipe[0]);
        failed_to_start_ = true;
        return false;
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    pending_.clear();
    return true;
}

void ProcessSolver::stop() {
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        kill(pid_, SIGKILL);
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    pending_.clear();
}

bool ProcessSolver::send(const std::string& text) {
    std::size_t off = 0;
    while (off < text.size()) {
        ssize_t n = write(to_child_, text.data() + off, text.size() - off);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

bool ProcessSolver::read_line(std::string& line, long deadline_ms) {
    for (;;) {
        std::size_t nl = pending_.find('\n');
        if (nl != std::string::npos) {
            line = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            return true;
        }
        long remaining = deadline_ms - now_ms();
        if (remaining <= 0) {
            return false;
        }
        pollfd pfd{from_child_, POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(remaining));
        if (rc < 0 && errno == EINTR) {
            continue;
        }
        if (rc <= 0) {
            return false;
        }
        char buf[4096];
        ssize_t n = read(from_child_, buf, sizeof buf);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            return false;
        }
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

bool ProcessSolver::read_sexpr(std::string& out, long deadline_ms) {
    out.clear();
    int depth = 0;
    bool started = false;
    bool quoted = false;
    std::string line;
    while (read_line(line, deadline_ms)) {
        out += line;
        out += '\n';
        for (char ch : line) {
            if (ch == '|') {
                quoted = !quoted;
            } else if (!quoted && ch == '(') {
                ++depth;
                started = true;
            } else if (!quoted && ch == ')') {
                --depth;
            }
        }
        if (started && depth <= 0) {
            return true;
        }
    }
    return false;
}

SatResult ProcessSolver::solve(const Query& q, const SymPath&) {
    if (!start()) {
        return {};
    }
    long deadline = now_ms() + static_cast<long>(timeout_ms_) + 2000;
    // One scope per query; the logic is left to the solver since it cannot
    // change inside a session.
    std::string script = "(push 1)\n" + q.script + "(check-sat)\n";
    std::string line;
    if (!send(script) || !read_line(line, deadline)) {
        stop();
        return {};
    }
    line = trim(line);
    if (line == "unsat" || line == "unknown") {
        if (!send("(pop 1)\n")) {
            stop();
        }
        return line == "unsat" ? SatResult{SatResult::Kind::Unsat, {}} : SatResult{};
    }
    if (line != "sat") {
        stop();
        return {};
    }
    std::string model_text;
    if (!send("(get-model)\n") || !read_sexpr(model_text, deadline) || !send("(pop 1)\n")) {
        stop();
        return {};
    }
    std::map<std::string, Value> by_name;
    try {
        by_name = parse_model(model_text);
    } catch (const std::exception&) {
        stop();
        return {};
    }
    SatResult r{SatResult::Kind::Sat, {}};
    for (const auto& s : q.symbols) {
        if (auto it = by_name.find(s.name); it != by_name.end()) {
            r.model[s] = it->second;
        }
    }
    return r;
}

bool ProcessSolver::available() {
    Query q{"QF_LIA", {}, "(assert true)\n"};
    return solve(q, *p_true()).sat();
}

BruteForceSolver::BruteForceSolver(Value lo, Value hi, std::size_t budget)
    : lo_(std::move(lo)), hi_(std::move(hi)), budget_(budget) {}

SatResult BruteForceSolver::solve(const Query& q, const SymPath& pi) {
    Value width = hi_ - lo_ + 1;
    Value total = 1;
    for (std::size_t i = 0; i < q.symbols.size(); ++i) {
        total *= width;
        if (total > Value(std::to_string(budget_))) {
            return {};
        }
    }
    Valuation nu;
    for (const auto& s : q.symbols) {
        nu[s] = lo_;
    }
    for (;;) {
        if (eval_path(pi, nu)) {
            return {SatResult::Kind::Sat, nu};
        }
        bool carried = true;
        for (const auto& s : q.symbols) {
            Value& v = nu[s];
            if (v < hi_) {
                ++v;
                carried = false;
                break;
            }
            v = lo_;
        }
        if (carried) {
            return {};
        }
    }
}

std::string find_default_solver() {
    if (const char* env = std::getenv("SOUNDNI_SOLVER"); env && *env) {
        return env;
    }
    const char* path = std::getenv("PATH");
    if (!path) {
        return {};
    }
    std::istringstream in(path);
    std::string dir;
    while (std::getline(in, dir, ':')) {
        std::filesystem::path candidate = std::filesystem::path(dir.empty() ? "." : dir) / "z3";
        if (access(candidate.c_str(), X_OK) == 0) {
            return candidate.string();
        }
    }
    return {};
}

std::unique_ptr<Solver> make_solver(const SolverConfig& cfg) {
    if (!cfg.brute_force) {
        std::string cmd = cfg.command.empty() ? find_default_solver() : cfg.command;
        if (!cmd.empty()) {
            auto ps = std::make_unique<ProcessSolver>(cmd, cfg.timeout_ms);
            if (ps->available()) {
                return ps;
            }
        }
    }
    return std::make_unique<BruteForceSolver>();
}

} // namespace soundni
