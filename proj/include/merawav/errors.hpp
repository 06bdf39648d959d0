// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace merawav {

// Error taxonomy mirrors the CLI exit codes: configuration problems (2),
// bad input data (3), numerical failures (4).

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse failures carry the 1-based row that triggered them.
class ParseError : public DataError {
public:
    ParseError(const std::string& msg, std::size_t row)
        : DataError(msg + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

}  // namespace merawav
