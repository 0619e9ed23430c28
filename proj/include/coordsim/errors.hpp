/*
 Copyright 2026 The coordsim Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef COORDSIM_ERRORS_HPP
#define COORDSIM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coordsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Jacobian smallest singular value fell below the singularity tolerance.
class SingularConfiguration : public Error {
public:
    using Error::Error;
};

/// A potential was evaluated beyond the communication radius.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

class DisconnectedInitialGraph : public Error {
public:
    using Error::Error;
};

class RegionContainsSingularity : public Error {
public:
    using Error::Error;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Gain synthesis exhausted its search budget. Does not prove infeasibility.
class SynthesisNotFound : public Error {
public:
    using Error::Error;
};

/// Scenario file could not be parsed; carries the offending line and field.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string field, const std::string& message)
        : Error(format(line, field, message)), line_(line), field_(std::move(field)) {}

    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    static std::string format(std::size_t line, const std::string& field, const std::string& message) {
        std::string out = "parse error";
        if (line > 0) out += " at line " + std::to_string(line);
        if (!field.empty()) out += " field '" + field + "'";
        return out + ": " + message;
    }

    std::size_t line_;
    std::string field_;
};

}  // namespace coordsim

#endif  // COORDSIM_ERRORS_HPP
