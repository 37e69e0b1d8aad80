#include "test_utils.hpp"

#include <cctype>
#include <vector>

namespace testutil {

namespace {

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' ||
           c == '?';
}

}  // namespace

bool xml_well_formed(const std::string& text, std::string* why) {
    const auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    std::vector<std::string> stack;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '>') return fail("stray '>' at offset " + std::to_string(i));
        if (c != '<') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        const bool closing = j < n && text[j] == '/';
        if (closing) ++j;
        std::size_t name_start = j;
        while (j < n && name_char(text[j])) ++j;
        if (j == name_start) return fail("empty tag name at offset " + std::to_string(i));
        const std::string name = text.substr(name_start, j - name_start);
        bool self_closing = false;
        bool in_quote = false;
        char quote = 0;
        while (j < n) {
            const char d = text[j];
            if (in_quote) {
                if (d == quote) in_quote = false;
            } else if (d == '"' || d == '\'') {
                in_quote = true;
                quote = d;
            } else if (d == '>') {
                break;
            } else if (d == '/' && j + 1 < n && text[j + 1] == '>') {
                self_closing = true;
            } else if (d == '<') {
                return fail("nested '<' inside tag near offset " + std::to_string(j));
            }
            ++j;
        }
        if (j >= n) return fail("unterminated tag '" + name + "'");
        if (in_quote) return fail("unterminated attribute quote in '" + name + "'");
        if (name.front() == '?') {
            // declaration
        } else if (closing) {
            if (stack.empty() || stack.back() != name)
                return fail("mismatched closing tag '" + name + "'");
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
        i = j + 1;
    }
    if (!stack.empty()) return fail("unclosed tag '" + stack.back() + "'");
    return true;
}

}  // namespace testutil
