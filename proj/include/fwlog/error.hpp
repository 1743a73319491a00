#pragma once

#include <stdexcept>
#include <string>

namespace fwlog {

// Each category maps to a distinct process exit code in the CLI.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class ArtifactError : public Error {
public:
    using Error::Error;
};

class CorruptionError : public ArtifactError {
public:
    using ArtifactError::ArtifactError;
};

class VersionError : public ArtifactError {
public:
    using ArtifactError::ArtifactError;
};

class CompatibilityError : public ArtifactError {
public:
    using ArtifactError::ArtifactError;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int usage = 2;
inline constexpr int data = 3;
inline constexpr int numeric = 4;
inline constexpr int artifact = 5;
}  // namespace exit_code

}  // namespace fwlog
