#include "smc/model_text.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace smc {

std::string format_real(double value)
{
    char buf[512];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Model text
// ---------------------------------------------------------------------------

namespace {

struct Word {
    std::string_view text;
    int column = 1;
};

std::vector<Word> split_line(std::string_view line)
{
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        words.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return words;
}

bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!head(s.front())) return false;
    for (char c : s) {
        if (!head(c) && !(c >= '0' && c <= '9')) return false;
    }
    return true;
}

class ModelParser {
  public:
    explicit ModelParser(std::string_view text) : text_(text) {}

    ValidatedModel run()
    {
        if (text_.starts_with("\xEF\xBB\xBF")) text_.remove_prefix(3);
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text_.size()) {
            auto nl = text_.find('\n', pos);
            if (nl == std::string_view::npos) nl = text_.size();
            ++line_no;
            line(line_no, split_line(text_.substr(pos, nl - pos)));
            pos = nl + 1;
        }
        const SourceSpan end{line_no, 1};
        if (!kind_) throw Error(ErrorCode::SyntaxError, "empty model: expected 'dtmc' or 'ctmc'", end);
        if (!n_states_) throw Error(ErrorCode::SyntaxError, "missing 'states' line", end);
        if (!init_) throw Error(ErrorCode::SyntaxError, "missing 'init' line", end);

        std::vector<SourceSpan> spans(*n_states_, states_span_);
        for (std::uint32_t s = 0; s < *n_states_; ++s) {
            if (auto it = row_span_.find(s); it != row_span_.end()) spans[s] = it->second;
        }
        auto rows = std::move(rows_);

        if (*kind_ == ModelKind::Dtmc) {
            return validate(Dtmc{*n_states_, *init_, std::move(rows), std::move(labels_)}, spans);
        }
        return validate(Ctmc{*n_states_, *init_, std::move(rows), std::move(labels_)}, spans);
    }

  private:
    [[noreturn]] static void fail(int line, const Word& w, const std::string& msg)
    {
        throw Error(ErrorCode::SyntaxError, msg, SourceSpan{line, w.column});
    }

    std::uint32_t integer(int line, const Word& w)
    {
        std::uint32_t value = 0;
        const auto* first = w.text.data();
        const auto* last = first + w.text.size();
        const auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc{} || res.ptr != last) {
            fail(line, w, "expected a non-negative integer, got '" + std::string(w.text) + "'");
        }
        return value;
    }

    StateId state(int line, const Word& w)
    {
        const auto v = integer(line, w);
        if (v >= *n_states_) {
            throw Error(ErrorCode::DanglingTarget,
                        "state " + std::to_string(v) + " is out of range (states " +
                            std::to_string(*n_states_) + ")",
                        SourceSpan{line, w.column});
        }
        return StateId{v};
    }

    void require_states(int line, const Word& w)
    {
        if (!n_states_) fail(line, w, "'" + std::string(w.text) + "' before 'states'");
    }

    void expect_args(int line, const std::vector<Word>& words, std::size_t n)
    {
        if (words.size() != n + 1) {
            fail(line, words.front(),
                 "'" + std::string(words.front().text) + "' takes " + std::to_string(n) +
                     " argument(s)");
        }
    }

    void line(int line_no, const std::vector<Word>& words)
    {
        if (words.empty()) return;
        const auto& head = words.front();
        if (!kind_) {
            if (words.size() == 1 && head.text == "dtmc") {
                kind_ = ModelKind::Dtmc;
            } else if (words.size() == 1 && head.text == "ctmc") {
                kind_ = ModelKind::Ctmc;
            } else {
                fail(line_no, head, "expected 'dtmc' or 'ctmc'");
            }
            return;
        }

        if (head.text == "states") {
            if (n_states_) fail(line_no, head, "duplicate 'states' line");
            expect_args(line_no, words, 1);
            const auto n = integer(line_no, words[1]);
            if (n == 0) fail(line_no, words[1], "a model needs at least one state");
            n_states_ = n;
            rows_.resize(n);
            states_span_ = {line_no, head.column};
        } else if (head.text == "init") {
            require_states(line_no, head);
            if (init_) fail(line_no, head, "duplicate 'init' line");
            expect_args(line_no, words, 1);
            init_ = state(line_no, words[1]);
        } else if (head.text == "label") {
            require_states(line_no, head);
            if (words.size() < 2) fail(line_no, head, "'label' needs a name");
            if (!is_identifier(words[1].text)) {
                fail(line_no, words[1], "invalid label name '" + std::string(words[1].text) + "'");
            }
            auto& set = labels_[std::string(words[1].text)];
            for (std::size_t i = 2; i < words.size(); ++i) set.insert(state(line_no, words[i]));
        } else if (head.text == "trans") {
            require_states(line_no, head);
            expect_args(line_no, words, 3);
            const auto from = state(line_no, words[1]);
            const auto to = state(line_no, words[2]);
            double weight = 0.0;
            const auto& w = words[3];
            const auto res = std::from_chars(w.text.data(), w.text.data() + w.text.size(), weight);
            if (res.ec != std::errc{} || res.ptr != w.text.data() + w.text.size()) {
                fail(line_no, w, "expected a real weight, got '" + std::string(w.text) + "'");
            }
            if (!edges_.insert({from.index, to.index}).second) {
                fail(line_no, head,
                     "duplicate transition " + std::to_string(from.index) + " -> " +
                         std::to_string(to.index));
            }
            rows_[from.index].push_back({to, weight});
            row_span_.try_emplace(from.index, SourceSpan{line_no, head.column});
        } else {
            fail(line_no, head, "unknown directive '" + std::string(head.text) + "'");
        }
    }

    std::string_view text_;
    std::optional<ModelKind> kind_;
    std::optional<std::uint32_t> n_states_;
    std::optional<StateId> init_;
    SourceSpan states_span_;
    Labels labels_;
    std::vector<std::vector<Transition>> rows_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges_;
    std::map<std::uint32_t, SourceSpan> row_span_;
};

}  // namespace

ValidatedModel parse_model(std::string_view text)
{
    return ModelParser(text).run();
}

ValidatedModel load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string render_model(const Model& model)
{
    std::ostringstream out;
    std::visit(
        [&](const auto& m) {
            out << (std::holds_alternative<Dtmc>(model) ? "dtmc" : "ctmc") << '\n';
            out << "states " << m.n_states << '\n';
            out << "init " << m.initial.index << '\n';
            for (const auto& [name, states] : m.labels) {
                out << "label " << name;
                for (StateId s : states) out << ' ' << s.index;
                out << '\n';
            }
            for (std::size_t s = 0; s < m.rows.size(); ++s) {
                for (const auto& t : m.rows[s]) {
                    char buf[64];
                    const auto res = std::to_chars(buf, buf + sizeof buf, t.weight);
                    out << "trans " << s << ' ' << t.target.index << ' '
                        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
                }
            }
        },
        model);
    return out.str();
}

// ---------------------------------------------------------------------------
// Formula text
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Ident, Number, Not, And, Or, LParen, RParen, LBracket, RBracket, Ge, Gt, Le, Lt, End };

struct Token {
    Tok kind;
    std::string_view text;
    SourceSpan span;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip_space();
            const SourceSpan span{line_, col_};
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, {}, span});
                return out;
            }
            const char c = text_[pos_];
            const std::size_t start = pos_;
            auto single = [&](Tok t) {
                advance();
                out.push_back({t, text_.substr(start, 1), span});
            };
            if (is_alpha(c)) {
                while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]))) advance();
                out.push_back({Tok::Ident, text_.substr(start, pos_ - start), span});
            } else if (is_digit(c) || c == '.') {
                while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '.')) advance();
                if (pos_ < text_.size() && text_[pos_] == 't') advance();
                if (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]))) {
                    throw Error(ErrorCode::SyntaxError, "malformed number", span);
                }
                out.push_back({Tok::Number, text_.substr(start, pos_ - start), span});
            } else if (c == '>' || c == '<') {
                advance();
                const bool eq = pos_ < text_.size() && text_[pos_] == '=';
                if (eq) advance();
                const Tok t = c == '>' ? (eq ? Tok::Ge : Tok::Gt) : (eq ? Tok::Le : Tok::Lt);
                out.push_back({t, text_.substr(start, pos_ - start), span});
            } else if (c == '!') {
                single(Tok::Not);
            } else if (c == '&') {
                single(Tok::And);
            } else if (c == '|') {
                single(Tok::Or);
            } else if (c == '(') {
                single(Tok::LParen);
            } else if (c == ')') {
                single(Tok::RParen);
            } else if (c == '[') {
                single(Tok::LBracket);
            } else if (c == ']') {
                single(Tok::RBracket);
            } else {
                throw Error(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", span);
            }
        }
    }

  private:
    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space()
    {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
            advance();
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_keyword(std::string_view s)
{
    return s == "X" || s == "F" || s == "G" || s == "U" || s == "P" || s == "true" || s == "false";
}

class FormulaParser {
  public:
    explicit FormulaParser(std::string_view text) : tokens_(Lexer(text).run()) {}

    FormulaPtr formula()
    {
        auto f = state();
        expect(Tok::End, "end of formula");
        return f;
    }

    PathFormula bare_path()
    {
        auto p = path();
        expect(Tok::End, "end of formula");
        return p;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const
    {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const
    {
        const std::string got = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
        throw Error(ErrorCode::SyntaxError, msg + ", got " + got, t.span);
    }

    const Token& expect(Tok kind, const char* what)
    {
        if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
        return take();
    }

    bool at_ident(std::string_view word, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == word;
    }

    FormulaPtr state()
    {
        auto lhs = conjunction();
        while (peek().kind == Tok::Or) {
            take();
            lhs = fml::disj(std::move(lhs), conjunction());
        }
        return lhs;
    }

    FormulaPtr conjunction()
    {
        auto lhs = unary();
        while (peek().kind == Tok::And) {
            take();
            lhs = fml::conj(std::move(lhs), unary());
        }
        return lhs;
    }

    FormulaPtr unary()
    {
        if (peek().kind == Tok::Not) {
            take();
            return fml::negation(unary());
        }
        return primary();
    }

    FormulaPtr primary()
    {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            take();
            auto f = state();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident) fail(t, "expected a state formula");
        if (t.text == "true") {
            take();
            return fml::truth();
        }
        if (t.text == "false") {
            take();
            return fml::falsity();
        }
        if (t.text == "P") return probabilistic();
        if (is_keyword(t.text)) fail(t, "keyword cannot be used as an atom");
        take();
        return fml::atom(std::string(t.text));
    }

    FormulaPtr probabilistic()
    {
        take();  // P
        const Token& cmp = take();
        if (cmp.kind != Tok::Ge && cmp.kind != Tok::Gt && cmp.kind != Tok::Le && cmp.kind != Tok::Lt) {
            fail(cmp, "expected a comparison after 'P'");
        }
        const Token& num = expect(Tok::Number, "a probability threshold");
        const double theta = real(num);
        if (theta < 0.0 || theta > 1.0) {
            throw Error(ErrorCode::SyntaxError, "threshold must lie in [0, 1]", num.span);
        }
        const int id = next_id_++;
        expect(Tok::LBracket, "'['");
        auto p = path();
        expect(Tok::RBracket, "']'");
        auto f = fml::prob(theta, std::move(p), id);
        if (cmp.kind == Tok::Lt || cmp.kind == Tok::Le) return fml::negation(std::move(f));
        return f;
    }

    PathFormula path()
    {
        if (at_ident("X")) {
            take();
            return fml::next(state());
        }
        if ((at_ident("F") || at_ident("G")) && peek(1).kind == Tok::Le) {
            const bool globally = peek().text == "G";
            take();
            take();
            const Bound b = bound();
            auto f = state();
            return globally ? fml::globally(std::move(f), b) : fml::eventually(std::move(f), b);
        }
        auto lhs = state();
        if (!at_ident("U")) fail(peek(), "expected 'U<=' in path formula");
        take();
        expect(Tok::Le, "'<=' after 'U'");
        const Bound b = bound();
        return fml::until(std::move(lhs), state(), b);
    }

    Bound bound()
    {
        const Token& t = expect(Tok::Number, "a bound");
        std::string_view text = t.text;
        if (text.ends_with('t')) {
            text.remove_suffix(1);
            return Time{real(t, text)};
        }
        std::uint64_t k = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), k);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw Error(ErrorCode::SyntaxError,
                        "step bound must be a non-negative integer (use a 't' suffix for time)", t.span);
        }
        return Steps{k};
    }

    static double real(const Token& t, std::string_view text)
    {
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::fixed);
        if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw Error(ErrorCode::SyntaxError, "malformed number '" + std::string(t.text) + "'", t.span);
        }
        return v;
    }

    static double real(const Token& t) { return real(t, t.text); }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int next_id_ = 0;
};

// Binding strength for parenthesization: 0 = or, 1 = and, 2 = unary/primary.
int precedence(const Formula& f)
{
    if (std::holds_alternative<OrNode>(f.node)) return 0;
    if (std::holds_alternative<AndNode>(f.node)) return 1;
    return 2;
}

std::string render_at(const Formula& f, int min_prec)
{
    std::string body = std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TrueNode>) {
                return "true";
            } else if constexpr (std::is_same_v<T, FalseNode>) {
                return "false";
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, NotNode>) {
                return "!" + render_at(*n.operand, 2);
            } else if constexpr (std::is_same_v<T, AndNode>) {
                return render_at(*n.lhs, 1) + " & " + render_at(*n.rhs, 2);
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return render_at(*n.lhs, 0) + " | " + render_at(*n.rhs, 1);
            } else {
                return "P>=" + format_real(n.theta) + " [ " + render_path(n.path) + " ]";
            }
        },
        f.node);
    if (precedence(f) < min_prec) return "(" + body + ")";
    return body;
}

std::string render_bound(const Bound& b)
{
    if (const auto* s = std::get_if<Steps>(&b)) return std::to_string(s->k);
    return format_real(std::get<Time>(b).t) + "t";
}

}  // namespace

FormulaPtr parse_formula(std::string_view text)
{
    return FormulaParser(text).formula();
}

PathFormula parse_path_formula(std::string_view text)
{
    return FormulaParser(text).bare_path();
}

std::string render_formula(const Formula& f)
{
    return render_at(f, 0);
}

std::string render_path(const PathFormula& p)
{
    if (p.kind == PathFormula::Kind::Next) return "X " + render_at(*p.rhs, 2);
    if (p.negated) {
        // only G<=k produces negated paths: !(true U<=k !phi)
        const auto* inner = std::get_if<NotNode>(&p.rhs->node);
        if (!inner || !std::holds_alternative<TrueNode>(p.lhs->node)) {
            throw Error(ErrorCode::InvalidParams, "negated path formula is not of the G<=k form");
        }
        return "G<=" + render_bound(p.bound) + " " + render_at(*inner->operand, 2);
    }
    return render_at(*p.lhs, 2) + " U<=" + render_bound(p.bound) + " " + render_at(*p.rhs, 2);
}

}  // namespace smc
