#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace srr {

/// Minimal CSV emitter: header row, ',' separators, '\n' line endings, and
/// locale-independent shortest round-trip formatting for floating point.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((emit(fields, first)), ...);
        out_ << '\n';
    }

private:
    template <class T>
    void emit(const T& value, bool& first) {
        if (!first) out_ << ',';
        first = false;
        if constexpr (std::is_floating_point_v<T>) {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<double>(value));
            out_.write(buf, res.ptr - buf);
        } else {
            out_ << value;
        }
    }

    std::ostream& out_;
};

}  // namespace srr
