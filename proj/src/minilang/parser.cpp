#include "arena/minilang/parser.hpp"

#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace arena::minilang {

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : Error("SyntaxError", std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column), detail_(message)
{}

int count_lines(std::string_view source) noexcept
{
    int lines = 1;
    for (std::size_t i = 0; i < source.size(); ++i)
        if (source[i] == '\n' && i + 1 < source.size())
            ++lines;
    return lines;
}

namespace {

enum class Tok
{
    End,
    Ident,
    IntLit,
    KwFun,
    KwVar,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwTrue,
    KwFalse,
    KwInt,
    KwBool,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Arrow,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
};

struct Token
{
    Tok kind = Tok::End;
    std::string_view text;
    SourcePos pos;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::uint64_t magnitude = 0;  // IntLit, may be 2^63 (only valid under unary minus)
};

std::string describe(const Token& t)
{
    if (t.kind == Tok::End)
        return "end of input";
    return "'" + std::string(t.text) + "'";
}

class Lexer
{
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            Token t;
            t.pos = {line_, column_};
            t.begin = pos_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                t.end = pos_;
                out.push_back(t);
                return out;
            }
            lex_one(t);
            t.end = pos_;
            t.text = src_.substr(t.begin, t.end - t.begin);
            out.push_back(t);
        }
    }

private:
    char peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance()
    {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++column_;  // columns count code points, not bytes
        }
    }

    void skip_trivia()
    {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n')
                    advance();
            } else {
                return;
            }
        }
    }

    static bool ident_start(char c)
    {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

    void lex_one(Token& t)
    {
        const char c = peek();
        if (ident_start(c)) {
            while (ident_char(peek()))
                advance();
            const auto word = src_.substr(t.begin, pos_ - t.begin);
            t.kind = keyword(word);
            return;
        }
        if (c >= '0' && c <= '9') {
            while (peek() >= '0' && peek() <= '9')
                advance();
            if (ident_start(peek()))
                throw SyntaxError(t.pos.line, t.pos.column, "malformed integer literal");
            const auto digits = src_.substr(t.begin, pos_ - t.begin);
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            constexpr std::uint64_t kMaxMagnitude = std::uint64_t{1} << 63;
            if (ec != std::errc{} || v > kMaxMagnitude)
                throw SyntaxError(t.pos.line, t.pos.column, "integer literal out of range");
            t.kind = Tok::IntLit;
            t.magnitude = v;
            return;
        }
        advance();
        switch (c) {
        case '(': t.kind = Tok::LParen; return;
        case ')': t.kind = Tok::RParen; return;
        case '{': t.kind = Tok::LBrace; return;
        case '}': t.kind = Tok::RBrace; return;
        case '[': t.kind = Tok::LBracket; return;
        case ']': t.kind = Tok::RBracket; return;
        case ',': t.kind = Tok::Comma; return;
        case ':': t.kind = Tok::Colon; return;
        case ';': t.kind = Tok::Semi; return;
        case '+': t.kind = Tok::Plus; return;
        case '*': t.kind = Tok::Star; return;
        case '/': t.kind = Tok::Slash; return;
        case '%': t.kind = Tok::Percent; return;
        case '-':
            if (peek() == '>') {
                advance();
                t.kind = Tok::Arrow;
            } else {
                t.kind = Tok::Minus;
            }
            return;
        case '<':
            t.kind = Tok::Lt;
            if (peek() == '=') {
                advance();
                t.kind = Tok::Le;
            }
            return;
        case '>':
            t.kind = Tok::Gt;
            if (peek() == '=') {
                advance();
                t.kind = Tok::Ge;
            }
            return;
        case '=':
            t.kind = Tok::Assign;
            if (peek() == '=') {
                advance();
                t.kind = Tok::EqEq;
            }
            return;
        case '!':
            t.kind = Tok::Bang;
            if (peek() == '=') {
                advance();
                t.kind = Tok::NotEq;
            }
            return;
        case '&':
            if (peek() == '&') {
                advance();
                t.kind = Tok::AndAnd;
                return;
            }
            break;
        case '|':
            if (peek() == '|') {
                advance();
                t.kind = Tok::OrOr;
                return;
            }
            break;
        default:
            break;
        }
        throw SyntaxError(t.pos.line, t.pos.column, "unexpected character");
    }

    static Tok keyword(std::string_view w)
    {
        if (w == "fun") return Tok::KwFun;
        if (w == "var") return Tok::KwVar;
        if (w == "if") return Tok::KwIf;
        if (w == "else") return Tok::KwElse;
        if (w == "while") return Tok::KwWhile;
        if (w == "return") return Tok::KwReturn;
        if (w == "true") return Tok::KwTrue;
        if (w == "false") return Tok::KwFalse;
        if (w == "int") return Tok::KwInt;
        if (w == "bool") return Tok::KwBool;
        return Tok::Ident;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser
{
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    std::vector<FunctionDecl> unit()
    {
        std::vector<FunctionDecl> fns;
        while (cur().kind != Tok::End)
            fns.push_back(function());
        return fns;
    }

private:
    struct DepthGuard
    {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser)
        {
            if (++p.depth_ > kMaxNestingDepth)
                p.fail("nesting too deep");
        }
        ~DepthGuard() { --p.depth_; }
    };

    const Token& cur() const { return toks_[i_]; }
    const Token& ahead(std::size_t n) const
    {
        return toks_[std::min(i_ + n, toks_.size() - 1)];
    }
    const Token& prev() const { return toks_[i_ - 1]; }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw SyntaxError(cur().pos.line, cur().pos.column, msg);
    }

    bool accept(Tok k)
    {
        if (cur().kind != k)
            return false;
        ++i_;
        return true;
    }

    const Token& expect(Tok k, const char* what)
    {
        if (cur().kind != k)
            fail(std::string("expected ") + what + ", found " + describe(cur()));
        return toks_[i_++];
    }

    FunctionDecl function()
    {
        FunctionDecl fn;
        const Token& kw = expect(Tok::KwFun, "'fun'");
        fn.pos = kw.pos;
        fn.name = std::string(expect(Tok::Ident, "function name").text);
        expect(Tok::LParen, "'('");
        if (cur().kind != Tok::RParen) {
            do {
                Param p;
                const Token& id = expect(Tok::Ident, "parameter name");
                p.name = std::string(id.text);
                p.pos = id.pos;
                expect(Tok::Colon, "':'");
                p.type = type();
                fn.params.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Arrow, "'->'");
        fn.return_type = type();
        fn.body = block();
        fn.span = {kw.begin, prev().end};
        return fn;
    }

    Type type()
    {
        if (accept(Tok::KwBool))
            return Type::Bool;
        expect(Tok::KwInt, "type");
        if (accept(Tok::LBracket)) {
            expect(Tok::RBracket, "']'");
            return Type::IntArray;
        }
        return Type::Int;
    }

    std::vector<Stmt> block()
    {
        DepthGuard guard(*this);
        expect(Tok::LBrace, "'{'");
        std::vector<Stmt> stmts;
        while (cur().kind != Tok::RBrace) {
            if (cur().kind == Tok::End)
                fail("expected '}', found end of input");
            stmts.push_back(statement());
        }
        ++i_;
        return stmts;
    }

    Stmt statement()
    {
        Stmt s;
        const Token& first = cur();
        s.pos = first.pos;
        switch (first.kind) {
        case Tok::KwVar: {
            ++i_;
            s.kind = StmtKind::VarDecl;
            s.name = std::string(expect(Tok::Ident, "variable name").text);
            expect(Tok::Colon, "':'");
            s.declared_type = type();
            expect(Tok::Assign, "'='");
            s.exprs.push_back(expression());
            expect(Tok::Semi, "';'");
            break;
        }
        case Tok::KwIf: {
            ++i_;
            s.kind = StmtKind::If;
            expect(Tok::LParen, "'('");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "')'");
            s.body = block();
            if (accept(Tok::KwElse)) {
                s.has_else = true;
                if (cur().kind == Tok::KwIf) {
                    DepthGuard guard(*this);
                    s.else_if = true;
                    s.else_body.push_back(statement());
                } else {
                    s.else_body = block();
                }
            }
            break;
        }
        case Tok::KwWhile: {
            ++i_;
            s.kind = StmtKind::While;
            expect(Tok::LParen, "'('");
            s.exprs.push_back(expression());
            expect(Tok::RParen, "')'");
            s.body = block();
            break;
        }
        case Tok::KwReturn: {
            ++i_;
            s.kind = StmtKind::Return;
            s.exprs.push_back(expression());
            expect(Tok::Semi, "';'");
            break;
        }
        case Tok::Ident: {
            ++i_;
            s.name = std::string(first.text);
            if (accept(Tok::LBracket)) {
                s.kind = StmtKind::ArrayAssign;
                s.exprs.push_back(expression());
                expect(Tok::RBracket, "']'");
            } else {
                s.kind = StmtKind::Assign;
            }
            expect(Tok::Assign, "'='");
            s.exprs.push_back(expression());
            expect(Tok::Semi, "';'");
            break;
        }
        default:
            fail("expected statement, found " + describe(first));
        }
        s.span = {first.begin, prev().end};
        return s;
    }

    Expr expression()
    {
        DepthGuard guard(*this);
        return binary(0);
    }

    static int precedence(Tok k)
    {
        switch (k) {
        case Tok::OrOr: return 1;
        case Tok::AndAnd: return 2;
        case Tok::EqEq:
        case Tok::NotEq: return 3;
        case Tok::Lt:
        case Tok::Le:
        case Tok::Gt:
        case Tok::Ge: return 4;
        case Tok::Plus:
        case Tok::Minus: return 5;
        case Tok::Star:
        case Tok::Slash:
        case Tok::Percent: return 6;
        default: return 0;
        }
    }

    static BinaryOp binary_op(Tok k)
    {
        switch (k) {
        case Tok::OrOr: return BinaryOp::Or;
        case Tok::AndAnd: return BinaryOp::And;
        case Tok::EqEq: return BinaryOp::Eq;
        case Tok::NotEq: return BinaryOp::Ne;
        case Tok::Lt: return BinaryOp::Lt;
        case Tok::Le: return BinaryOp::Le;
        case Tok::Gt: return BinaryOp::Gt;
        case Tok::Ge: return BinaryOp::Ge;
        case Tok::Plus: return BinaryOp::Add;
        case Tok::Minus: return BinaryOp::Sub;
        case Tok::Star: return BinaryOp::Mul;
        case Tok::Slash: return BinaryOp::Div;
        default: return BinaryOp::Mod;
        }
    }

    // Precedence climbing; every binary level is left-associative.
    // Each operator in a chain deepens the (left-leaning) tree, so the depth
    // budget is held until the whole chain is parsed.
    Expr binary(int min_prec)
    {
        Expr lhs = unary();
        const int entry_depth = depth_;
        struct Restore
        {
            int& depth;
            int saved;
            ~Restore() { depth = saved; }
        } restore{depth_, entry_depth};
        for (;;) {
            const int prec = precedence(cur().kind);
            if (prec == 0 || prec <= min_prec)
                return lhs;
            const Token& op = toks_[i_++];
            if (++depth_ > kMaxNestingDepth)
                fail("nesting too deep");
            Expr rhs = binary(prec);
            Expr e;
            e.kind = ExprKind::Binary;
            e.binary_op = binary_op(op.kind);
            e.pos = op.pos;
            e.span = {lhs.span.begin, rhs.span.end};
            e.operands.push_back(std::move(lhs));
            e.operands.push_back(std::move(rhs));
            lhs = std::move(e);
        }
    }

    Expr unary()
    {
        const Token& t = cur();
        if (t.kind == Tok::Minus && ahead(1).kind == Tok::IntLit &&
            ahead(2).kind != Tok::LBracket) {
            // `-<literal>` denotes a negative literal, so every int64 value
            // (including the minimum) has a literal spelling.
            const Token& lit = ahead(1);
            i_ += 2;
            Expr e;
            e.kind = ExprKind::IntLit;
            e.pos = t.pos;
            e.span = {t.begin, lit.end};
            e.int_value = static_cast<std::int64_t>(std::uint64_t{0} - lit.magnitude);
            return e;
        }
        if (t.kind == Tok::Minus || t.kind == Tok::Bang) {
            ++i_;
            DepthGuard guard(*this);
            Expr operand = unary();
            Expr e;
            e.kind = ExprKind::Unary;
            e.unary_op = t.kind == Tok::Minus ? UnaryOp::Neg : UnaryOp::Not;
            e.pos = t.pos;
            e.span = {t.begin, operand.span.end};
            e.operands.push_back(std::move(operand));
            return e;
        }
        return postfix();
    }

    Expr postfix()
    {
        Expr e = primary();
        int extra = 0;
        while (cur().kind == Tok::LBracket) {
            const Token& open = toks_[i_++];
            if (depth_ + ++extra > kMaxNestingDepth)
                fail("nesting too deep");
            Expr index = expression();
            expect(Tok::RBracket, "']'");
            Expr ix;
            ix.kind = ExprKind::Index;
            ix.pos = open.pos;
            ix.span = {e.span.begin, prev().end};
            ix.operands.push_back(std::move(e));
            ix.operands.push_back(std::move(index));
            e = std::move(ix);
        }
        return e;
    }

    Expr primary()
    {
        const Token& t = cur();
        Expr e;
        e.pos = t.pos;
        switch (t.kind) {
        case Tok::IntLit:
            ++i_;
            if (t.magnitude > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
                throw SyntaxError(t.pos.line, t.pos.column, "integer literal out of range");
            e.kind = ExprKind::IntLit;
            e.int_value = static_cast<std::int64_t>(t.magnitude);
            e.span = {t.begin, t.end};
            return e;
        case Tok::KwTrue:
        case Tok::KwFalse:
            ++i_;
            e.kind = ExprKind::BoolLit;
            e.bool_value = t.kind == Tok::KwTrue;
            e.span = {t.begin, t.end};
            return e;
        case Tok::Ident:
            ++i_;
            e.name = std::string(t.text);
            if (accept(Tok::LParen)) {
                e.kind = ExprKind::Call;
                if (cur().kind != Tok::RParen) {
                    do {
                        e.operands.push_back(expression());
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RParen, "')'");
            } else {
                e.kind = ExprKind::Var;
            }
            e.span = {t.begin, prev().end};
            return e;
        case Tok::LBracket:
            ++i_;
            e.kind = ExprKind::ArrayLit;
            if (cur().kind != Tok::RBracket) {
                do {
                    e.operands.push_back(expression());
                } while (accept(Tok::Comma));
            }
            expect(Tok::RBracket, "']'");
            e.span = {t.begin, prev().end};
            return e;
        case Tok::LParen: {
            ++i_;
            Expr inner = expression();
            expect(Tok::RParen, "')'");
            // The span keeps the parentheses so that splicing text over it
            // cannot unbalance them.
            inner.span = {t.begin, prev().end};
            return inner;
        }
        default:
            fail("expected expression, found " + describe(t));
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    int depth_ = 0;
};

}  // namespace

SourceUnit parse_unit(std::string_view source, std::string name)
{
    if (source.size() > kMaxSourceBytes)
        throw Error("SourceTooLarge", "source exceeds " + std::to_string(kMaxSourceBytes) + " bytes");
    SourceUnit unit;
    unit.name = std::move(name);
    unit.source = std::string(source);
    unit.line_count = count_lines(source);
    Parser parser(Lexer(unit.source).run());
    unit.functions = parser.unit();
    return unit;
}

}  // namespace arena::minilang
