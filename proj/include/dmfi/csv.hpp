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

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace dmfi::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;  // physical line the record starts on (1-based)
};

/// RFC 4180 reader. Quoted fields may contain commas, doubled quotes and
/// newlines; both LF and CRLF records are accepted. Throws DataError with
/// the line number on structural errors (stray quote, unterminated quote).
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record. Returns false at end of input.
    bool next(Record& out);

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

/// Canonical writer: LF line endings, a field is quoted iff it contains a
/// comma, quote, CR or LF. Output is byte-deterministic for equal input.
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void write_record(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

std::string escape_field(const std::string& field);

}  // namespace dmfi::csv
