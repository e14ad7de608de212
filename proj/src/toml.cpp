#include "affine/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace affine::toml {

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    Value parse_document() {
        Value root;
        Value* current = &root;
        for (;;) {
            skip_ws_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                bool array_of_tables = false;
                expect('[');
                if (peek() == '[') {
                    expect('[');
                    array_of_tables = true;
                }
                std::vector<std::string> path = parse_key_path();
                expect(']');
                if (array_of_tables) expect(']');
                current = descend(root, path, array_of_tables);
                skip_to_eol();
            } else {
                std::vector<std::string> path = parse_key_path();
                skip_spaces();
                expect('=');
                skip_spaces();
                ValuePtr v = parse_value();
                insert(*current, path, std::move(v));
                skip_to_eol();
            }
        }
        return root;
    }

private:
    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[i_]; }
    char take() {
        char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        take();
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) take();
    }

    void skip_ws_and_comments() {
        for (;;) {
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) take();
            if (!eof() && peek() == '#') {
                while (!eof() && peek() != '\n') take();
                continue;
            }
            break;
        }
    }

    void skip_to_eol() {
        skip_spaces();
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') take();
        if (!eof()) {
            if (peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
            while (!eof() && (peek() == '\n' || peek() == '\r')) take();
        }
    }

    std::string parse_bare_or_quoted_key() {
        skip_spaces();
        if (peek() == '"') return parse_basic_string();
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            k += take();
        if (k.empty()) fail("expected key");
        return k;
    }

    std::vector<std::string> parse_key_path() {
        std::vector<std::string> path{parse_bare_or_quoted_key()};
        skip_spaces();
        while (!eof() && peek() == '.') {
            take();
            path.push_back(parse_bare_or_quoted_key());
            skip_spaces();
        }
        return path;
    }

    std::string parse_basic_string() {
        expect('"');
        std::string out;
        for (;;) {
            if (eof()) fail("unterminated string");
            char c = take();
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = take();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    ValuePtr parse_value() {
        skip_spaces();
        if (eof()) fail("expected value");
        char c = peek();
        if (c == '"') return std::make_shared<Value>(Value::Data{parse_basic_string()});
        if (c == '[') {
            take();
            Value::Array arr;
            skip_ws_and_comments();
            if (peek() == ']') {
                take();
                return std::make_shared<Value>(Value::Data{arr});
            }
            for (;;) {
                skip_ws_and_comments();
                arr.push_back(parse_value());
                skip_ws_and_comments();
                if (peek() == ',') {
                    take();
                    skip_ws_and_comments();
                    if (peek() == ']') { take(); break; }
                    continue;
                }
                if (peek() == ']') { take(); break; }
                fail("expected ',' or ']' in array");
            }
            return std::make_shared<Value>(Value::Data{arr});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string word;
            while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) word += take();
            if (word == "true") return std::make_shared<Value>(Value::Data{true});
            if (word == "false") return std::make_shared<Value>(Value::Data{false});
            fail("unknown literal '" + word + "'");
        }
        // number
        std::string num;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == 'e' || peek() == 'E' || peek() == '_'))
            num += take();
        if (num.empty()) fail("expected value");
        std::string clean;
        for (char ch : num)
            if (ch != '_') clean += ch;
        bool is_float = clean.find('.') != std::string::npos || clean.find('e') != std::string::npos ||
                        clean.find('E') != std::string::npos;
        char* endp = nullptr;
        if (is_float) {
            double d = std::strtod(clean.c_str(), &endp);
            if (!endp || *endp != '\0') fail("malformed number '" + num + "'");
            return std::make_shared<Value>(Value::Data{d});
        }
        long long v = std::strtoll(clean.c_str(), &endp, 10);
        if (!endp || *endp != '\0') fail("malformed number '" + num + "'");
        return std::make_shared<Value>(Value::Data{static_cast<int64_t>(v)});
    }

    Value* descend(Value& root, const std::vector<std::string>& path, bool array_of_tables) {
        Value* cur = &root;
        for (size_t k = 0; k < path.size(); ++k) {
            bool last = (k + 1 == path.size());
            auto& tbl = cur->table();
            auto it = tbl.find(path[k]);
            bool fresh = false;
            if (it == tbl.end()) {
                it = tbl.emplace(path[k], std::make_shared<Value>()).first;
                fresh = true;
            }
            Value* next = it->second.get();
            if (last && array_of_tables) {
                if (fresh) {
                    it->second = std::make_shared<Value>(Value::Data{Value::Array{}});
                    next = it->second.get();
                }
                if (!next->is_array()) fail("cannot extend non-array '" + path[k] + "'");
                auto& arr = const_cast<Value::Array&>(next->array());
                arr.push_back(std::make_shared<Value>());
                return arr.back().get();
            }
            if (next->is_array()) {
                // navigating through an array of tables targets its last entry
                if (next->array().empty()) fail("empty table array '" + path[k] + "'");
                next = next->array().back().get();
            }
            if (!next->is_table()) fail("key '" + path[k] + "' is not a table");
            cur = next;
        }
        return cur;
    }

    void insert(Value& tbl, const std::vector<std::string>& path, ValuePtr v) {
        Value* cur = &tbl;
        for (size_t k = 0; k + 1 < path.size(); ++k) {
            auto& t = cur->table();
            auto it = t.find(path[k]);
            if (it == t.end()) it = t.emplace(path[k], std::make_shared<Value>()).first;
            if (!it->second->is_table()) fail("key '" + path[k] + "' is not a table");
            cur = it->second.get();
        }
        auto& t = cur->table();
        if (t.count(path.back())) fail("duplicate key '" + path.back() + "'");
        t.emplace(path.back(), std::move(v));
    }

    const std::string& s_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
};

}  // namespace

Value parse(const std::string& text) { return Parser(text).parse_document(); }

Value parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace affine::toml
