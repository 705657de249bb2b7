#pragma once

/// @file errors.hpp
/// @brief Exception hierarchy for the lvig library.
///
/// Every throwing code path uses a named subclass of lvig::Error so callers
/// (and tests) can discriminate failure modes without parsing messages.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lvig {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A community argument was empty, out of range, or not admissible where
/// admissibility is required.
class InvalidCommunity : public Error {
public:
    using Error::Error;
};

/// Numeric input outside the representable domain (NaN/Inf entries, etc.).
class NumericalDomainError : public Error {
public:
    using Error::Error;
};

/// A function precondition was violated by the caller.
class PreconditionFailed : public Error {
public:
    using Error::Error;
};

/// The complementarity problem has no complementary feasible support.
class NoSolution : public Error {
public:
    using Error::Error;
};

/// The complementarity problem produced two distinct solutions; carries both
/// so diagnostics can show the witnesses.
class MultipleSolutions : public Error {
public:
    MultipleSolutions(const std::string& what,
                      std::vector<double> first,
                      std::vector<double> second)
        : Error(what), first_(std::move(first)), second_(std::move(second)) {}

    const std::vector<double>& first() const noexcept { return first_; }
    const std::vector<double>& second() const noexcept { return second_; }

private:
    std::vector<double> first_;
    std::vector<double> second_;
};

/// A computation that is guaranteed to succeed under a valid stability
/// certificate failed, indicating the certificate's assumption is false.
/// When the failure arose inside a subsystem, the offending community is
/// attached as a bitmask.
class VLAssumptionViolated : public Error {
public:
    using Error::Error;

    VLAssumptionViolated(const std::string& what, std::uint32_t subsystem_bits)
        : Error(what), subsystem_bits_(subsystem_bits), has_subsystem_(true) {}

    bool has_subsystem() const noexcept { return has_subsystem_; }
    std::uint32_t subsystem_bits() const noexcept { return subsystem_bits_; }

private:
    std::uint32_t subsystem_bits_ = 0;
    bool has_subsystem_ = false;
};

/// Two internally redundant computations disagreed beyond tolerance.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

/// A graph expected to be acyclic contains a cycle; carries one witness cycle
/// as community bitmasks.
class NotADAG : public Error {
public:
    NotADAG(const std::string& what, std::vector<std::uint32_t> cycle)
        : Error(what), cycle_(std::move(cycle)) {}

    const std::vector<std::uint32_t>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::uint32_t> cycle_;
};

/// The adaptive integrator could not proceed (step underflow or budget
/// exhaustion); surfaced explicitly instead of switching methods silently.
class StiffnessError : public Error {
public:
    using Error::Error;
};

/// Two catalog equilibria are too close for unambiguous limit classification.
class AmbiguousCatalog : public Error {
public:
    using Error::Error;
};

/// Requested an unstable-manifold seed toward species that cannot invade.
class NotAnUnstableDirection : public Error {
public:
    using Error::Error;
};

/// An operation requiring a symmetric interaction matrix got an asymmetric one.
class NotSymmetric : public Error {
public:
    using Error::Error;
};

/// Heteroclinic-edge verification ran out of time/retries without a verdict;
/// deliberately distinct from a refutation (returning false).
class VerificationInconclusive : public Error {
public:
    using Error::Error;
};

/// Malformed external input (system files, graph JSON, CLI arguments).
class InvalidInput : public Error {
public:
    using Error::Error;
};

}  // namespace lvig
