// Copyright 2026 The HiSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * OpenQASM 2.0 subset reader.
 *
 * Accepted statements: the `OPENQASM` header, `include`, a single `qreg`,
 * `barrier` (discarded) and applications of the gates in GateKind. Parameter
 * expressions may use `pi`, numeric literals, + - * / ^, parentheses and the
 * functions sin, cos, tan, exp, ln, sqrt. Anything else that names a
 * statement (measure, reset, creg, gate, opaque, if, ...) is rejected with
 * UnsupportedGate.
 */

#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hisim/circuit.hpp"
#include "hisim/error.hpp"

namespace hisim {

namespace detail {

enum class TokKind { Ident, Number, Str, Punct, End };

struct Token {
    TokKind kind{TokKind::End};
    std::string text;
    std::size_t line{1};
    std::size_t col{1};
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space_and_comments();
        Token tok;
        tok.line = line_;
        tok.col = col_;
        if (pos_ >= src_.size()) {
            return tok;
        }
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok.kind = TokKind::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_')) {
                tok.text += advance();
            }
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            tok.kind = TokKind::Number;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '.')) {
                tok.text += advance();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                tok.text += advance();
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                    tok.text += advance();
                }
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    tok.text += advance();
                }
            }
            return tok;
        }
        if (c == '"') {
            tok.kind = TokKind::Str;
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                tok.text += advance();
            }
            if (pos_ >= src_.size()) {
                throw SyntaxError(tok.line, tok.col, "unterminated string");
            }
            advance();
            return tok;
        }
        tok.kind = TokKind::Punct;
        tok.text = std::string(1, advance());
        if (tok.text == "-" && pos_ < src_.size() && src_[pos_] == '>') {
            tok.text += advance();
        }
        return tok;
    }

  private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                advance();
                advance();
                while (pos_ + 1 < src_.size() &&
                       !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
                    advance();
                }
                if (pos_ + 1 >= src_.size()) {
                    throw SyntaxError(line_, col_, "unterminated comment");
                }
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_{0};
    std::size_t line_{1};
    std::size_t col_{1};
};

class QasmParser {
  public:
    explicit QasmParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

    Circuit parse() {
        while (tok_.kind != TokKind::End) {
            statement();
        }
        if (!reg_size_) {
            throw SyntaxError(tok_.line, tok_.col, "missing qreg declaration");
        }
        Circuit circuit;
        circuit.num_qubits = *reg_size_;
        circuit.ops = std::move(ops_);
        validate(circuit);
        return circuit;
    }

  private:
    [[noreturn]] void fail(const Token &at, const std::string &msg) const {
        throw SyntaxError(at.line, at.col, msg);
    }

    void bump() { tok_ = lex_.next(); }

    bool is_punct(std::string_view p) const {
        return tok_.kind == TokKind::Punct && tok_.text == p;
    }

    void expect_punct(std::string_view p) {
        if (!is_punct(p)) {
            fail(tok_, "expected '" + std::string(p) + "'" +
                           (tok_.kind == TokKind::End ? " before end of input"
                                                      : ", found '" + tok_.text + "'"));
        }
        bump();
    }

    std::string expect_ident() {
        if (tok_.kind != TokKind::Ident) {
            fail(tok_, "expected identifier");
        }
        std::string s = tok_.text;
        bump();
        return s;
    }

    std::size_t expect_uint() {
        if (tok_.kind != TokKind::Number ||
            tok_.text.find_first_not_of("0123456789") != std::string::npos) {
            fail(tok_, "expected non-negative integer");
        }
        const Token at = tok_;
        std::size_t value = 0;
        try {
            value = std::stoull(tok_.text);
        } catch (const std::exception &) {
            fail(at, "integer out of range");
        }
        bump();
        return value;
    }

    void statement() {
        const Token head = tok_;
        if (head.kind != TokKind::Ident) {
            fail(head, "expected statement");
        }
        const std::string &word = head.text;
        if (word == "OPENQASM") {
            bump();
            if (tok_.kind != TokKind::Number) {
                fail(tok_, "expected version number");
            }
            bump();
            expect_punct(";");
        } else if (word == "include") {
            bump();
            if (tok_.kind != TokKind::Str) {
                fail(tok_, "expected file name string");
            }
            bump();
            expect_punct(";");
        } else if (word == "qreg") {
            bump();
            if (reg_size_) {
                fail(head, "only one qreg declaration is supported");
            }
            reg_name_ = expect_ident();
            expect_punct("[");
            const std::size_t size = expect_uint();
            expect_punct("]");
            expect_punct(";");
            if (size == 0) {
                throw Error(ErrorKind::InvalidQubitCount, "qreg of size 0");
            }
            reg_size_ = size;
        } else if (word == "barrier") {
            bump();
            require_register(head);
            arguments();
            expect_punct(";");
        } else if (auto kind = gate_kind_from_name(word)) {
            bump();
            require_register(head);
            gate_application(*kind);
        } else {
            throw Error(ErrorKind::UnsupportedGate, word);
        }
    }

    void require_register(const Token &at) const {
        if (!reg_size_) {
            fail(at, "gate applied before qreg declaration");
        }
    }

    /// One argument: either `reg[i]` or the whole register `reg`
    /// (returned as nullopt).
    std::optional<Qubit> argument() {
        const Token at = tok_;
        const std::string name = expect_ident();
        if (name != reg_name_) {
            fail(at, "unknown register '" + name + "'");
        }
        if (!is_punct("[")) {
            return std::nullopt;
        }
        bump();
        const std::size_t idx = expect_uint();
        expect_punct("]");
        return idx;
    }

    std::vector<std::optional<Qubit>> arguments() {
        std::vector<std::optional<Qubit>> args;
        args.push_back(argument());
        while (is_punct(",")) {
            bump();
            args.push_back(argument());
        }
        return args;
    }

    void gate_application(GateKind kind) {
        std::vector<double> params;
        if (is_punct("(")) {
            bump();
            if (!is_punct(")")) {
                params.push_back(expression());
                while (is_punct(",")) {
                    bump();
                    params.push_back(expression());
                }
            }
            expect_punct(")");
        }
        const auto args = arguments();
        expect_punct(";");

        const bool broadcast =
            args.size() == 1 && !args[0].has_value() && arity(kind) == 1;
        if (broadcast) {
            for (Qubit q = 0; q < *reg_size_; ++q) {
                push_op(GateOp{kind, {q}, params});
            }
            return;
        }
        GateOp op{kind, {}, std::move(params)};
        for (const auto &a : args) {
            if (!a) {
                fail(tok_, "register broadcast is only supported for "
                           "single-qubit gates");
            }
            op.qubits.push_back(*a);
        }
        push_op(std::move(op));
    }

    void push_op(GateOp op) {
        validate_op(op, *reg_size_);
        ops_.push_back(std::move(op));
    }

    // expression := term (('+'|'-') term)*
    double expression() {
        double value = term();
        while (is_punct("+") || is_punct("-")) {
            const bool plus = tok_.text == "+";
            bump();
            const double rhs = term();
            value = plus ? value + rhs : value - rhs;
        }
        return value;
    }

    double term() {
        double value = unary();
        while (is_punct("*") || is_punct("/")) {
            const bool mul = tok_.text == "*";
            bump();
            const double rhs = unary();
            value = mul ? value * rhs : value / rhs;
        }
        return value;
    }

    double unary() {
        if (is_punct("-")) {
            bump();
            return -unary();
        }
        if (is_punct("+")) {
            bump();
            return unary();
        }
        return power();
    }

    double power() {
        const double base = primary();
        if (is_punct("^")) {
            bump();
            return std::pow(base, unary());
        }
        return base;
    }

    double primary() {
        const Token at = tok_;
        if (tok_.kind == TokKind::Number) {
            double value = 0.0;
            try {
                std::size_t used = 0;
                value = std::stod(tok_.text, &used);
                if (used != tok_.text.size()) {
                    fail(at, "malformed number '" + tok_.text + "'");
                }
            } catch (const std::invalid_argument &) {
                fail(at, "malformed number '" + tok_.text + "'");
            } catch (const std::out_of_range &) {
                fail(at, "number out of range '" + tok_.text + "'");
            }
            bump();
            return value;
        }
        if (is_punct("(")) {
            bump();
            const double value = expression();
            expect_punct(")");
            return value;
        }
        if (tok_.kind == TokKind::Ident) {
            const std::string name = tok_.text;
            bump();
            if (name == "pi") {
                return std::numbers::pi;
            }
            expect_punct("(");
            const double arg = expression();
            expect_punct(")");
            if (name == "sin") return std::sin(arg);
            if (name == "cos") return std::cos(arg);
            if (name == "tan") return std::tan(arg);
            if (name == "exp") return std::exp(arg);
            if (name == "ln") return std::log(arg);
            if (name == "sqrt") return std::sqrt(arg);
            fail(at, "unknown function '" + name + "'");
        }
        fail(at, "expected expression");
    }

    Lexer lex_;
    Token tok_;
    std::string reg_name_;
    std::optional<std::size_t> reg_size_;
    std::vector<GateOp> ops_;
};

} // namespace detail

inline Circuit parse_qasm(std::string_view text) {
    return detail::QasmParser(text).parse();
}

inline Circuit load_qasm_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_qasm(buf.str());
}

} // namespace hisim
