#include "denat/syntax.hpp"

#include <array>
#include <cctype>

namespace denat {

namespace {

constexpr std::array<std::string_view, 13> kKeywords = {
    "int", "bool", "str", "void", "if", "else", "for", "while",
    "return", "break", "continue", "true", "false",
};

// Two-character operators first so maximal munch wins over the single-char forms.
constexpr std::array<std::string_view, 13> kTwoCharOps = {
    "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
};

constexpr std::string_view kOneCharOps = "+-*/%<>=!?:";
constexpr std::string_view kPunct = "(){}[];,";

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identCont(char c) { return identStart(c) || std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

bool isKeyword(std::string_view s) {
    for (auto k : kKeywords)
        if (k == s) return true;
    return false;
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    uint32_t i = 0;
    const uint32_t n = static_cast<uint32_t>(text.size());

    auto push = [&](TokenKind kind, uint32_t begin, uint32_t end) {
        out.push_back(Token{kind, std::string(text.substr(begin, end - begin)), Span{begin, end}});
    };

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            uint32_t start = i;
            i += 2;
            while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) ++i;
            if (i + 1 >= n) throw LexError("unterminated block comment", start);
            i += 2;
            continue;
        }
        if (identStart(c)) {
            uint32_t begin = i;
            while (i < n && identCont(text[i])) ++i;
            std::string_view word = text.substr(begin, i - begin);
            push(isKeyword(word) ? TokenKind::Keyword : TokenKind::Identifier, begin, i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            uint32_t begin = i;
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            // "0x" and friends are not MiniLang literals
            if (i < n && identStart(text[i]))
                throw LexError("malformed integer literal", begin);
            push(TokenKind::IntLiteral, begin, i);
            continue;
        }
        if (c == '"') {
            uint32_t begin = i;
            ++i;
            while (i < n && text[i] != '"') {
                if (text[i] == '\n') throw LexError("unterminated string literal", begin);
                if (text[i] == '\\') {
                    if (i + 1 >= n) throw LexError("unterminated string literal", begin);
                    char e = text[i + 1];
                    if (e != '\\' && e != '"' && e != 'n' && e != 't')
                        throw LexError("unknown escape in string literal", i);
                    i += 2;
                    continue;
                }
                ++i;
            }
            if (i >= n) throw LexError("unterminated string literal", begin);
            ++i;
            push(TokenKind::StringLiteral, begin, i);
            continue;
        }
        if (kPunct.find(c) != std::string_view::npos) {
            push(TokenKind::Punctuation, i, i + 1);
            ++i;
            continue;
        }
        bool matched = false;
        if (i + 1 < n) {
            std::string_view two = text.substr(i, 2);
            for (auto op : kTwoCharOps) {
                if (op == two) {
                    push(TokenKind::Operator, i, i + 2);
                    i += 2;
                    matched = true;
                    break;
                }
            }
        }
        if (matched) continue;
        if (kOneCharOps.find(c) != std::string_view::npos) {
            push(TokenKind::Operator, i, i + 1);
            ++i;
            continue;
        }
        throw LexError("character outside the MiniLang alphabet", i);
    }
    return out;
}

}  // namespace denat
