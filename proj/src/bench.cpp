#include "sanscrypt/bench.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace sanscrypt {

namespace {

struct Token {
    enum class Type { Ident, LParen, RParen, Comma, Equals };
    Type type;
    std::string text;
    std::size_t column;
};

bool is_delimiter(char ch) {
    return ch == '(' || ch == ')' || ch == ',' || ch == '=' || ch == ' ' || ch == '\t' || ch == '\r' ||
           ch == '\f' || ch == '\v';
}

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const char ch = line[pos];
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v') {
            ++pos;
            continue;
        }
        const std::size_t column = pos + 1;
        switch (ch) {
            case '(': tokens.push_back({Token::Type::LParen, "(", column}); ++pos; continue;
            case ')': tokens.push_back({Token::Type::RParen, ")", column}); ++pos; continue;
            case ',': tokens.push_back({Token::Type::Comma, ",", column}); ++pos; continue;
            case '=': tokens.push_back({Token::Type::Equals, "=", column}); ++pos; continue;
            default: break;
        }
        const std::size_t start = pos;
        while (pos < line.size() && !is_delimiter(line[pos])) ++pos;
        tokens.push_back({Token::Type::Ident, std::string(line.substr(start, pos - start)), column});
    }
    return tokens;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

class LineParser {
public:
    LineParser(std::vector<Token> tokens, std::size_t line_no, std::size_t line_len)
        : tokens_(std::move(tokens)), line_no_(line_no), line_len_(line_len) {}

    const Token& expect(Token::Type type, const char* what) {
        if (pos_ >= tokens_.size()) fail(line_len_ + 1, std::string("expected ") + what + " before end of line");
        const Token& tok = tokens_[pos_];
        if (tok.type != type) fail(tok.column, std::string("expected ") + what + ", found '" + tok.text + "'");
        ++pos_;
        return tok;
    }

    [[nodiscard]] bool at(Token::Type type) const { return pos_ < tokens_.size() && tokens_[pos_].type == type; }

    void expect_end() {
        if (pos_ < tokens_.size()) fail(tokens_[pos_].column, "unexpected '" + tokens_[pos_].text + "'");
    }

    [[noreturn]] void fail(std::size_t column, const std::string& message) const {
        throw BenchSyntaxError(line_no_, column, message);
    }

    /// '(' ident {',' ident} ')'
    std::vector<std::string> argument_list() {
        expect(Token::Type::LParen, "'('");
        std::vector<std::string> args;
        args.push_back(expect(Token::Type::Ident, "net name").text);
        while (at(Token::Type::Comma)) {
            ++pos_;
            args.push_back(expect(Token::Type::Ident, "net name").text);
        }
        expect(Token::Type::RParen, "')'");
        return args;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_no_;
    std::size_t line_len_;
};

}  // namespace

Netlist parse_bench(std::string_view text, std::string name) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    NetlistData data;
    data.name = std::move(name);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;

        LineParser p(std::move(tokens), line_no, line.size());
        const Token head = p.expect(Token::Type::Ident, "declaration or net name");
        if (p.at(Token::Type::LParen)) {
            const std::string keyword = upper(head.text);
            if (keyword != "INPUT" && keyword != "OUTPUT") p.fail(head.column, "unknown declaration '" + head.text + "'");
            auto args = p.argument_list();
            p.expect_end();
            if (args.size() != 1) p.fail(head.column, keyword + " takes exactly one net");
            (keyword == "INPUT" ? data.inputs : data.outputs).push_back(std::move(args.front()));
            continue;
        }

        p.expect(Token::Type::Equals, "'=' or '('");
        const Token kind_tok = p.expect(Token::Type::Ident, "gate kind");
        auto args = p.argument_list();
        p.expect_end();
        if (upper(kind_tok.text) == "DFF") {
            if (args.size() != 1) {
                throw NetlistError(NetlistError::Kind::BadArity, head.text,
                                   "line " + std::to_string(line_no) + ": DFF '" + head.text + "' takes one input");
            }
            data.dffs.push_back({head.text, std::move(args.front())});
            continue;
        }
        auto kind = gate_kind_from_string(kind_tok.text);
        if (!kind) p.fail(kind_tok.column, "unknown gate kind '" + kind_tok.text + "'");
        data.gates.push_back({head.text, *kind, std::move(args)});
    }
    return Netlist(std::move(data));
}

Netlist read_bench_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_bench(buf.str(), path.stem().string());
}

std::string emit_bench(const Netlist& nl) {
    std::ostringstream out;
    const auto stats = nl.stats();
    out << "# " << nl.name() << "\n";
    out << "# " << stats.n_inputs << " inputs\n";
    out << "# " << stats.n_outputs << " outputs\n";
    out << "# " << stats.n_dffs << " D-type flipflops\n";
    out << "# " << stats.n_gates << " gates\n\n";
    for (const auto& in : nl.inputs()) out << "INPUT(" << in << ")\n";
    out << "\n";
    for (const auto& o : nl.outputs()) out << "OUTPUT(" << o << ")\n";
    out << "\n";
    for (const auto& ff : nl.dffs()) out << ff.q << " = DFF(" << ff.d << ")\n";
    out << "\n";
    for (const auto& g : nl.gates()) {
        out << g.out << " = " << to_string(g.kind) << "(";
        for (std::size_t k = 0; k < g.ins.size(); ++k) out << (k ? ", " : "") << g.ins[k];
        out << ")\n";
    }
    return out.str();
}

}  // namespace sanscrypt
