// Copyright 2026 The DMFI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmfi/csv.hpp"

#include "dmfi/errors.hpp"

namespace dmfi::csv {

bool Reader::next(Record& out) {
    int first = in_.peek();
    if (first == std::char_traits<char>::eof()) return false;

    out.fields.clear();
    out.line = line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    for (;;) {
        int ci = in_.get();
        if (ci == std::char_traits<char>::eof()) {
            if (quoted)
                throw DataError("unterminated quoted field starting at line " +
                                std::to_string(out.line));
            out.fields.push_back(std::move(field));
            return true;
        }
        char c = char(ci);
        if (c == '\n') line_++;

        if (quoted) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }

        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw DataError("stray quote at line " + std::to_string(line_));
                quoted = true;
                field_started = true;
                break;
            case ',':
                out.fields.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r':
                if (in_.peek() == '\n') {
                    in_.get();
                    line_++;
                }
                out.fields.push_back(std::move(field));
                return true;
            case '\n':
                out.fields.push_back(std::move(field));
                return true;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
}

std::string escape_field(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void Writer::write_record(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_.put(',');
        out_ << escape_field(fields[i]);
    }
    out_.put('\n');
}

}  // namespace dmfi::csv
