#ifndef AFFINE_TOML_HPP
#define AFFINE_TOML_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace affine::toml {

// Minimal TOML reader covering the subset scenario files use: tables,
// arrays of tables, key = value with strings, numbers, booleans, and
// (nested) arrays. Parse errors carry line and column.
class Value;
using ValuePtr = std::shared_ptr<Value>;

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line, col;
};

class Value {
public:
    using Array = std::vector<ValuePtr>;
    using Table = std::map<std::string, ValuePtr>;
    using Data = std::variant<std::string, double, int64_t, bool, Array, Table>;

    Value() : data_(Table{}) {}
    explicit Value(Data d) : data_(std::move(d)) {}

    bool is_table() const { return std::holds_alternative<Table>(data_); }
    bool is_array() const { return std::holds_alternative<Array>(data_); }
    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_bool() const { return std::holds_alternative<bool>(data_); }
    bool is_number() const {
        return std::holds_alternative<double>(data_) || std::holds_alternative<int64_t>(data_);
    }

    const Table& table() const { return std::get<Table>(data_); }
    Table& table() { return std::get<Table>(data_); }
    const Array& array() const { return std::get<Array>(data_); }
    const std::string& str() const { return std::get<std::string>(data_); }
    bool boolean() const { return std::get<bool>(data_); }
    double number() const {
        if (auto* i = std::get_if<int64_t>(&data_)) return static_cast<double>(*i);
        return std::get<double>(data_);
    }
    int64_t integer() const {
        if (auto* d = std::get_if<double>(&data_)) return static_cast<int64_t>(*d);
        return std::get<int64_t>(data_);
    }

    // lookup helpers (nullptr when missing)
    const Value* find(const std::string& key) const {
        if (!is_table()) return nullptr;
        auto it = table().find(key);
        return it == table().end() ? nullptr : it->second.get();
    }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        const Value* v = find(key);
        return v && v->is_string() ? v->str() : fallback;
    }
    double get_number(const std::string& key, double fallback) const {
        const Value* v = find(key);
        return v && v->is_number() ? v->number() : fallback;
    }
    int64_t get_integer(const std::string& key, int64_t fallback) const {
        const Value* v = find(key);
        return v && v->is_number() ? v->integer() : fallback;
    }
    bool get_bool(const std::string& key, bool fallback) const {
        const Value* v = find(key);
        return v && v->is_bool() ? v->boolean() : fallback;
    }

private:
    Data data_;
};

Value parse(const std::string& text);
Value parse_file(const std::string& path);

}  // namespace affine::toml

#endif
