#include "soundni/lang.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace soundni {

const char* to_string(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    }
    return "?";
}

const char* to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

CmpOp negate(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    }
    return op;
}

CmpOp flip(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
    }
}

Value apply(ArithOp op, const Value& a, const Value& b) {
    switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    }
    return 0;
}

bool apply(CmpOp op, const Value& a, const Value& b) {
    switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    }
    return false;
}

ExprPtr e_const(Value v) { return std::make_shared<Expr>(Expr{Expr::Const{std::move(v)}}); }
ExprPtr e_var(std::string name) { return std::make_shared<Expr>(Expr{Expr::Var{std::move(name)}}); }
ExprPtr e_bin(ArithOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(Expr{Expr::Bin{op, std::move(lhs), std::move(rhs)}});
}

BExpr negate(const BExpr& b) { return BExpr{negate(b.op), b.lhs, b.rhs}; }

CmdPtr c_skip() {
    static const CmdPtr skip = std::make_shared<Command>(Command{Command::Skip{}});
    return skip;
}
CmdPtr c_assign(std::string var, ExprPtr rhs) {
    return std::make_shared<Command>(Command{Command::Assign{std::move(var), std::move(rhs)}});
}
CmdPtr c_if(BExpr cond, CmdPtr then_branch, CmdPtr else_branch) {
    return std::make_shared<Command>(
        Command{Command::If{std::move(cond), std::move(then_branch), std::move(else_branch)}});
}
CmdPtr c_while(BExpr cond, CmdPtr body, bool iterating) {
    return std::make_shared<Command>(Command{Command::While{std::move(cond), std::move(body), iterating}});
}
CmdPtr c_seq(CmdPtr first, CmdPtr second) {
    return std::make_shared<Command>(Command{Command::Seq{std::move(first), std::move(second)}});
}
CmdPtr c_block(const std::vector<CmdPtr>& stmts) {
    if (stmts.empty()) {
        return c_skip();
    }
    CmdPtr acc = stmts.back();
    for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it) {
        acc = c_seq(*it, acc);
    }
    return acc;
}

ParseError::ParseError(const std::string& msg, std::size_t line_, std::size_t column_)
    : std::runtime_error(std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
      line(line_), column(column_) {}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char ch = src[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            advance(1);
            continue;
        }
        if (ch == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        std::size_t tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::Ident, src.substr(i, j - i), tl, tc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                ++j;
            }
            out.push_back({Tok::Number, src.substr(i, j - i), tl, tc});
            advance(j - i);
            continue;
        }
        static const char* two[] = {":=", "<=", ">=", "==", "!="};
        bool matched = false;
        for (const char* p : two) {
            if (src.compare(i, 2, p) == 0) {
                out.push_back({Tok::Punct, p, tl, tc});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched) {
            continue;
        }
        static const std::string one = "(){};,+-*<>=";
        if (one.find(ch) != std::string::npos) {
            out.push_back({Tok::Punct, std::string(1, ch), tl, tc});
            advance(1);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", tl, tc);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program parse() {
        Program p;
        while (peek_ident("low") || peek_ident("high")) {
            bool low = next().text == "low";
            do {
                const Token& t = expect_ident();
                if (is_keyword(t.text)) {
                    throw error("keyword used as variable name", t);
                }
                if (p.all_vars.count(t.text)) {
                    throw error("variable '" + t.text + "' declared twice", t);
                }
                p.all_vars.insert(t.text);
                if (low) {
                    p.low_vars.insert(t.text);
                }
            } while (accept(","));
            expect(";");
        }
        declared_ = &p.all_vars;
        p.body = stmts();
        if (peek().kind != Tok::End) {
            throw error("unexpected '" + peek().text + "'", peek());
        }
        return p;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const VarSet* declared_ = nullptr;

    static bool is_keyword(const std::string& s) {
        return s == "low" || s == "high" || s == "if" || s == "else" || s == "while" || s == "skip";
    }

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool peek_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool peek_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

    bool accept(const char* p) {
        if (peek_punct(p)) {
            ++pos_;
            return true;
        }
        return false;
    }

    static ParseError error(const std::string& msg, const Token& t) { return ParseError(msg, t.line, t.column); }

    void expect(const char* p) {
        if (!accept(p)) {
            const Token& t = peek();
            throw error(std::string("expected '") + p + "' but found '" + (t.kind == Tok::End ? "end of input" : t.text) + "'", t);
        }
    }

    const Token& expect_ident() {
        if (peek().kind != Tok::Ident) {
            throw error("expected identifier", peek());
        }
        return next();
    }

    CmdPtr stmts() {
        std::vector<CmdPtr> out;
        while (peek().kind != Tok::End && !peek_punct("}")) {
            if (accept(";")) {
                continue;
            }
            bool compound = peek_ident("if") || peek_ident("while");
            out.push_back(stmt());
            if (!compound && !accept(";") && peek().kind != Tok::End && !peek_punct("}")) {
                throw error("expected ';' after statement", peek());
            }
        }
        return c_block(out);
    }

    CmdPtr block() {
        expect("{");
        CmdPtr c = stmts();
        expect("}");
        return c;
    }

    CmdPtr stmt() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) {
            throw error("expected statement", t);
        }
        if (t.text == "skip") {
            ++pos_;
            return c_skip();
        }
        if (t.text == "if") {
            ++pos_;
            expect("(");
            BExpr b = bexpr();
            expect(")");
            CmdPtr c0 = block();
            CmdPtr c1 = c_skip();
            if (peek_ident("else")) {
                ++pos_;
                c1 = block();
            }
            return c_if(std::move(b), c0, c1);
        }
        if (t.text == "while") {
            ++pos_;
            expect("(");
            BExpr b = bexpr();
            expect(")");
            return c_while(std::move(b), block());
        }
        if (is_keyword(t.text)) {
            throw error("unexpected keyword '" + t.text + "'", t);
        }
        ++pos_;
        check_declared(t);
        expect(":=");
        return c_assign(t.text, expr());
    }

    void check_declared(const Token& t) const {
        if (!declared_->count(t.text)) {
            throw error("undeclared variable '" + t.text + "'", t);
        }
    }

    BExpr bexpr() {
        ExprPtr lhs = expr();
        const Token& t = peek();
        static const std::pair<const char*, CmpOp> ops[] = {{"<", CmpOp::Lt}, {"<=", CmpOp::Le}, {"==", CmpOp::Eq},
                                                            {"=", CmpOp::Eq}, {"!=", CmpOp::Ne}, {">", CmpOp::Gt},
                                                            {">=", CmpOp::Ge}};
        for (const auto& [text, op] : ops) {
            if (t.kind == Tok::Punct && t.text == text) {
                ++pos_;
                return BExpr{op, lhs, expr()};
            }
        }
        throw error("expected comparison operator", t);
    }

    ExprPtr expr() {
        ExprPtr acc = term();
        while (peek_punct("+") || peek_punct("-")) {
            ArithOp op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
            acc = e_bin(op, acc, term());
        }
        return acc;
    }

    ExprPtr term() {
        ExprPtr acc = factor();
        while (accept("*")) {
            acc = e_bin(ArithOp::Mul, acc, factor());
        }
        return acc;
    }

    ExprPtr factor() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return e_const(parse_value(t.text));
        }
        if (t.kind == Tok::Ident) {
            if (is_keyword(t.text)) {
                throw error("unexpected keyword '" + t.text + "'", t);
            }
            ++pos_;
            check_declared(t);
            return e_var(t.text);
        }
        if (accept("(")) {
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (accept("-")) {
            if (peek().kind == Tok::Number) {
                return e_const(-parse_value(next().text));
            }
            return e_bin(ArithOp::Sub, e_const(0), factor());
        }
        throw error("expected expression", t);
    }
};

} // namespace

Program parse_program(const std::string& text) { return Parser(lex(text)).parse(); }

Program load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str());
}

Value eval_expr(const Expr& e, const Store& mu) {
    return std::visit(
        [&](const auto& n) -> Value {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                auto it = mu.find(n.name);
                if (it == mu.end()) {
                    throw EvalError("variable '" + n.name + "' missing from store");
                }
                return it->second;
            } else {
                return apply(n.op, eval_expr(*n.lhs, mu), eval_expr(*n.rhs, mu));
            }
        },
        e.node);
}

bool eval_bool(const BExpr& b, const Store& mu) { return apply(b.op, eval_expr(*b.lhs, mu), eval_expr(*b.rhs, mu)); }

Redex decompose(const CmdPtr& c) {
    Redex r{c, {}};
    while (const auto* s = std::get_if<Command::Seq>(&r.redex->node)) {
        if (s->first->is_skip()) {
            break;
        }
        r.context.push_back(s->second);
        r.redex = s->first;
    }
    return r;
}

CmdPtr plug(const std::vector<CmdPtr>& context, CmdPtr hole) {
    for (auto it = context.rbegin(); it != context.rend(); ++it) {
        hole = c_seq(std::move(hole), *it);
    }
    return hole;
}

CmdPtr continuation(const std::vector<CmdPtr>& context) {
    if (context.empty()) {
        return c_skip();
    }
    std::vector<CmdPtr> outer(context.begin(), context.end() - 1);
    return plug(outer, context.back());
}

const char* to_string(Rule r) {
    switch (r) {
    case Rule::SeqExit: return "seq-exit";
    case Rule::Assign: return "assign";
    case Rule::IfTrue: return "if-true";
    case Rule::IfFalse: return "if-false";
    case Rule::LoopTrue: return "loop-true";
    case Rule::LoopFalse: return "loop-false";
    case Rule::ApproxMany: return "approx-many";
    }
    return "?";
}

ConcreteState concrete_step(const ConcreteState& s) {
    Redex r = decompose(s.cmd);
    const Command& c = *r.redex;
    ConcreteState out{nullptr, s.store};
    if (const auto* seq = std::get_if<Command::Seq>(&c.node)) {
        out.cmd = seq->second;
    } else if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
        out.store[a->var] = eval_expr(*a->rhs, s.store);
        out.cmd = c_skip();
    } else if (const auto* i = std::get_if<Command::If>(&c.node)) {
        out.cmd = eval_bool(i->cond, s.store) ? i->then_branch : i->else_branch;
    } else if (const auto* w = std::get_if<Command::While>(&c.node)) {
        out.cmd = eval_bool(w->cond, s.store) ? c_seq(w->body, c_while(w->cond, w->body, true)) : c_skip();
    } else {
        throw std::logic_error("concrete_step on skip");
    }
    out.cmd = plug(r.context, out.cmd);
    return out;
}

Outcome run(const CmdPtr& c, const Store& mu, std::size_t fuel) {
    ConcreteState s{c, mu};
    Outcome out;
    while (!s.cmd->is_skip()) {
        if (out.steps == fuel) {
            return out;
        }
        s = concrete_step(s);
        ++out.steps;
    }
    out.final_store = std::move(s.store);
    return out;
}

Outcome run(const Program& p, const Store& mu, std::size_t fuel) { return run(p.body, mu, fuel); }

bool low_equal(const Store& mu0, const Store& mu1, const VarSet& low) {
    for (const auto& x : low) {
        auto a = mu0.find(x);
        auto b = mu1.find(x);
        if (a == mu0.end() || b == mu1.end() || a->second != b->second) {
            return false;
        }
    }
    return true;
}

namespace {

void collect_assigned(const Command& c, VarSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Command::Assign>) {
                out.insert(n.var);
            } else if constexpr (std::is_same_v<T, Command::If>) {
                collect_assigned(*n.then_branch, out);
                collect_assigned(*n.else_branch, out);
            } else if constexpr (std::is_same_v<T, Command::While>) {
                collect_assigned(*n.body, out);
            } else if constexpr (std::is_same_v<T, Command::Seq>) {
                collect_assigned(*n.first, out);
                collect_assigned(*n.second, out);
            }
        },
        c.node);
}

void collect_vars(const Expr& e, VarSet& out) {
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        out.insert(v->name);
    } else if (const auto* b = std::get_if<Expr::Bin>(&e.node)) {
        collect_vars(*b->lhs, out);
        collect_vars(*b->rhs, out);
    }
}

} // namespace

VarSet assigned_vars(const Command& c) {
    VarSet out;
    collect_assigned(c, out);
    return out;
}

VarSet vars_of(const Expr& e) {
    VarSet out;
    collect_vars(e, out);
    return out;
}

VarSet vars_of(const BExpr& b) {
    VarSet out;
    collect_vars(*b.lhs, out);
    collect_vars(*b.rhs, out);
    return out;
}

bool equal(const Expr& a, const Expr& b) {
    if (&a == &b) {
        return true;
    }
    if (a.node.index() != b.node.index()) {
        return false;
    }
    if (const auto* x = std::get_if<Expr::Const>(&a.node)) {
        return x->value == std::get<Expr::Const>(b.node).value;
    }
    if (const auto* x = std::get_if<Expr::Var>(&a.node)) {
        return x->name == std::get<Expr::Var>(b.node).name;
    }
    const auto& x = std::get<Expr::Bin>(a.node);
    const auto& y = std::get<Expr::Bin>(b.node);
    return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
}

bool equal(const BExpr& a, const BExpr& b) { return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs); }

bool equal(const Command& a, const Command& b) {
    if (&a == &b) {
        return true;
    }
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Command::Skip>) {
                return true;
            } else if constexpr (std::is_same_v<T, Command::Assign>) {
                return x.var == y.var && equal(*x.rhs, *y.rhs);
            } else if constexpr (std::is_same_v<T, Command::If>) {
                return equal(x.cond, y.cond) && equal(*x.then_branch, *y.then_branch) &&
                       equal(*x.else_branch, *y.else_branch);
            } else if constexpr (std::is_same_v<T, Command::While>) {
                return x.iterating == y.iterating && equal(x.cond, y.cond) && equal(*x.body, *y.body);
            } else {
                return equal(*x.first, *y.first) && equal(*x.second, *y.second);
            }
        },
        a.node);
}

namespace {

int precedence(const Expr& e) {
    if (const auto* b = std::get_if<Expr::Bin>(&e.node)) {
        return b->op == ArithOp::Mul ? 2 : 1;
    }
    return 3;
}

void print(const Expr& e, std::ostream& os) {
    if (const auto* c = std::get_if<Expr::Const>(&e.node)) {
        os << to_string(c->value);
    } else if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        os << v->name;
    } else {
        const auto& b = std::get<Expr::Bin>(e.node);
        int p = precedence(e);
        bool lp = precedence(*b.lhs) < p;
        bool rp = precedence(*b.rhs) <= p;
        if (lp) os << '(';
        print(*b.lhs, os);
        if (lp) os << ')';
        os << ' ' << to_string(b.op) << ' ';
        if (rp) os << '(';
        print(*b.rhs, os);
        if (rp) os << ')';
    }
}

void print(const Command& c, std::ostream& os) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Command::Skip>) {
                os << "skip;";
            } else if constexpr (std::is_same_v<T, Command::Assign>) {
                os << n.var << " := ";
                print(*n.rhs, os);
                os << ';';
            } else if constexpr (std::is_same_v<T, Command::If>) {
                os << "if (" << to_string(n.cond) << ") { ";
                print(*n.then_branch, os);
                os << " } else { ";
                print(*n.else_branch, os);
                os << " }";
            } else if constexpr (std::is_same_v<T, Command::While>) {
                os << "while (" << to_string(n.cond) << ") { ";
                print(*n.body, os);
                os << " }";
            } else {
                print(*n.first, os);
                os << ' ';
                print(*n.second, os);
            }
        },
        c.node);
}

} // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(e, os);
    return os.str();
}

std::string to_string(const BExpr& b) { return to_string(*b.lhs) + " " + to_string(b.op) + " " + to_string(*b.rhs); }

std::string to_string(const Command& c) {
    std::ostringstream os;
    print(c, os);
    return os.str();
}

std::string to_string(const Store& mu) {
    std::string out = "[";
    bool first = true;
    for (const auto& [x, v] : mu) {
        if (!first) {
            out += ", ";
        }
        first = false;
        out += x + "=" + to_string(v);
    }
    return out + "]";
}

} // namespace soundni
