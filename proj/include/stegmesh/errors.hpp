// Copyright 2026 The stegmesh Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stegmesh {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define STEGMESH_ERROR(Name)                                                                       \
    class Name : public Error {                                                                    \
    public:                                                                                        \
        using Error::Error;                                                                        \
    }

STEGMESH_ERROR(OverflowError);
STEGMESH_ERROR(CarrierTooSmall);
STEGMESH_ERROR(UnknownMethod);
STEGMESH_ERROR(CarrierMismatch);
STEGMESH_ERROR(EmptyProfile);
STEGMESH_ERROR(AlreadyMember);
STEGMESH_ERROR(NotMember);
STEGMESH_ERROR(IntegrityFailure);
STEGMESH_ERROR(TimerNotDue);
STEGMESH_ERROR(EmptyQueue);
STEGMESH_ERROR(EmptyPathList);
STEGMESH_ERROR(UnknownTarget);
STEGMESH_ERROR(InvalidConfig);

#undef STEGMESH_ERROR

/// Semantic scenario error, tagged with the offending field path
/// (e.g. `nodes[3].profile[1]`).
class ValidationError : public Error {
public:
    ValidationError(std::string field_path, const std::string& reason)
        : Error(field_path + ": " + reason), field_path_(std::move(field_path))
    {
    }
    const std::string& field_path() const { return field_path_; }

private:
    std::string field_path_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& reason)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + reason),
          line_(line), column_(column)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace stegmesh
