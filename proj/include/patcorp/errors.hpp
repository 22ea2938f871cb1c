#pragma once

#include <stdexcept>
#include <string>

namespace patcorp {

// Exit-code mapping lives in tools/patcorp.cpp: config 2, data 3, digest 4.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

struct DigestMismatchError : std::runtime_error {
    explicit DigestMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace patcorp
