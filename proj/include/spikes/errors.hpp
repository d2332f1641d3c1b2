#pragma once

#include <stdexcept>
#include <string>

namespace spikes {

// Base of every failure raised by the library. The CLI maps subclasses
// onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoDecayBracket : public Error { public: using Error::Error; };
class ToleranceNotMet : public Error { public: using Error::Error; };
class IterationDiverged : public Error { public: using Error::Error; };
class MeshTooCoarse : public Error { public: using Error::Error; };
class InvalidMesh : public Error { public: using Error::Error; };
class PointOutsideDomain : public Error { public: using Error::Error; };
class LinearSolveFailed : public Error { public: using Error::Error; };
class SaddleSingular : public Error { public: using Error::Error; };
class ContractionFailed : public Error { public: using Error::Error; };
class InfeasibleConfiguration : public Error { public: using Error::Error; };
class PackingBudgetExceeded : public Error { public: using Error::Error; };
class NoClearance : public Error { public: using Error::Error; };
class NewtonDiverged : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

/// Exit code used by the command-line front end for a given failure.
int exit_code_for(const Error& e);

}  // namespace spikes
