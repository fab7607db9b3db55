#include "matmart/kernel_io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace matmart {

namespace {

std::string format_position(std::string_view file, int line, int column, std::string_view message) {
    std::ostringstream out;
    out << file << ":" << line << ":" << column << ": " << message;
    return out.str();
}

/// Whitespace tokenizer for one line, tracking 1-based column offsets.
/// A '#' starts a comment running to the end of the line.
struct LineTokens {
    struct Token {
        std::string text;
        int column;
    };
    std::vector<Token> tokens;

    explicit LineTokens(const std::string& line) {
        size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i >= line.size() || line[i] == '#') break;
            const size_t start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            tokens.push_back({line.substr(start, i - start), static_cast<int>(start + 1)});
        }
    }
};

class Parser {
public:
    Parser(std::istream& in, std::string_view filename) : in_(in), file_(filename) {}

    KernelSpec run() {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            const LineTokens line(raw);
            if (line.tokens.empty()) continue;
            parse_line(line);
        }
        if (spec_.dim < 1) fail(1, "missing 'dim' declaration");
        if (declared_states_ < 0) fail(1, "missing 'states' declaration");
        return std::move(spec_);
    }

private:
    void parse_line(const LineTokens& line) {
        const auto& head = line.tokens.front();
        if (head.text == "kernel") {
            spec_.name = token_at(line, 1, "a name").text;
        } else if (head.text == "dim") {
            spec_.dim = expect_int(line, 1, "dimension");
            if (spec_.dim < 1) fail(line.tokens[1].column, "dimension must be positive");
        } else if (head.text == "horizon") {
            spec_.horizon = expect_int(line, 1, "horizon");
        } else if (head.text == "states") {
            declared_states_ = expect_int(line, 1, "state count");
            if (declared_states_ < 1) fail(line.tokens[1].column, "state count must be positive");
            spec_.states.assign(declared_states_, {});
            seen_state_.assign(declared_states_, 0);
        } else if (head.text == "centered") {
            spec_.centered = expect_bool(line, 1);
        } else if (head.text == "initial") {
            spec_.initial_state = expect_int(line, 1, "initial state");
        } else if (head.text == "state") {
            if (declared_states_ < 0) fail(head.column, "'state' before 'states' declaration");
            current_state_ = expect_int(line, 1, "state index");
            if (current_state_ < 0 || current_state_ >= declared_states_)
                fail(line.tokens[1].column, "state index out of range");
            if (seen_state_[current_state_]) fail(line.tokens[1].column, "duplicate state block");
            seen_state_[current_state_] = 1;
        } else if (head.text == "outcome") {
            if (current_state_ < 0) fail(head.column, "'outcome' outside a state block");
            if (spec_.dim < 1) fail(head.column, "'outcome' before 'dim' declaration");
            spec_.states[current_state_].push_back(parse_outcome(line));
        } else {
            fail(head.column, "unknown directive '" + head.text + "'");
        }
    }

    KernelOutcome parse_outcome(const LineTokens& line) {
        // outcome <prob> -> <next> : <d*d entries row-major>
        const double prob = expect_double(line, 1, "probability");
        const auto& arrow = token_at(line, 2, "'->'");
        if (arrow.text != "->") fail(arrow.column, "expected '->' after the probability");
        const int next = expect_int(line, 3, "next state");
        if (next < 0 || next >= declared_states_) fail(line.tokens[3].column, "next state out of range");
        const auto& colon = token_at(line, 4, "':'");
        if (colon.text != ":") fail(colon.column, "expected ':' before the matrix entries");

        const size_t needed = static_cast<size_t>(spec_.dim) * spec_.dim;
        std::vector<double> entries;
        entries.reserve(needed);
        for (size_t i = 5; i < line.tokens.size(); ++i)
            entries.push_back(expect_double(line, i, "matrix entry"));
        if (entries.size() != needed) {
            const auto& last = line.tokens.back();
            fail(last.column, "expected " + std::to_string(needed) + " matrix entries, got " +
                                  std::to_string(entries.size()));
        }
        try {
            return KernelOutcome{prob, SymMatrix(spec_.dim, entries), next};
        } catch (const std::invalid_argument& e) {
            fail(line.tokens[5].column, e.what());
        }
    }

    [[noreturn]] void fail(int column, std::string_view message) {
        throw KernelParseError(file_, line_, column, message);
    }

    const LineTokens::Token& token_at(const LineTokens& line, size_t index, const char* what) {
        if (index >= line.tokens.size()) {
            const auto& last = line.tokens.back();
            fail(last.column + static_cast<int>(last.text.size()), std::string("expected ") + what);
        }
        return line.tokens[index];
    }

    int expect_int(const LineTokens& line, size_t index, const char* what) {
        const auto& tok = token_at(line, index, what);
        char* end = nullptr;
        const long v = std::strtol(tok.text.c_str(), &end, 10);
        if (end == tok.text.c_str() || *end != '\0')
            fail(tok.column, std::string("invalid integer for ") + what + ": '" + tok.text + "'");
        return static_cast<int>(v);
    }

    double expect_double(const LineTokens& line, size_t index, const char* what) {
        const auto& tok = token_at(line, index, what);
        char* end = nullptr;
        const double v = std::strtod(tok.text.c_str(), &end);
        if (end == tok.text.c_str() || *end != '\0')
            fail(tok.column, std::string("invalid number for ") + what + ": '" + tok.text + "'");
        return v;
    }

    bool expect_bool(const LineTokens& line, size_t index) {
        const auto& tok = token_at(line, index, "true or false");
        if (tok.text == "true") return true;
        if (tok.text == "false") return false;
        fail(tok.column, "expected 'true' or 'false', got '" + tok.text + "'");
    }

    std::istream& in_;
    std::string file_;
    int line_ = 0;
    KernelSpec spec_;
    int declared_states_ = -1;
    int current_state_ = -1;
    std::vector<char> seen_state_;
};

}  // namespace

KernelParseError::KernelParseError(std::string_view file, int line, int column, std::string_view message)
    : std::runtime_error(format_position(file, line, column, message)), line_(line), column_(column) {}

KernelSpec parse_kernel_spec(std::istream& in, std::string_view filename) {
    Parser parser(in, filename);
    return parser.run();
}

KernelSpec load_kernel_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw KernelParseError(path, 0, 0, "cannot open kernel file");
    return parse_kernel_spec(in, path);
}

}  // namespace matmart
