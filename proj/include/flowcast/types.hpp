#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace flowcast {

using TaskId = std::string;
using SiteId = std::string;
using OfferId = std::string;
using DataId = std::string;

// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownSiteError : public Error {
public:
    explicit UnknownSiteError(const SiteId& site) : Error("unknown site: " + site), site(site) {}
    SiteId site;
};

class CycleDetectedError : public Error {
public:
    using Error::Error;
};

class CycleWithinIterationError : public Error {
public:
    using Error::Error;
};

class InvalidGraphError : public Error {
public:
    using Error::Error;
};

class NoFeasibleOfferError : public Error {
public:
    explicit NoFeasibleOfferError(const std::string& what) : Error("no feasible offer for " + what) {}
};

class InfeasibleOfferError : public Error {
public:
    using Error::Error;
};

class MalformedEventError : public Error {
public:
    using Error::Error;
};

class NonMonotoneTimestampError : public Error {
public:
    using Error::Error;
};

class EmptyGraphError : public Error {
public:
    using Error::Error;
};

class IncompletePlacementError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Objective weights for placement scoring. Scale-free: multiplying all
// weights by a positive constant does not change any argmin decision.
struct Objective {
    double timeWeight = 1.0;
    double costWeight = 1.0;
    double energyWeight = 0.0;

    bool operator==(const Objective&) const = default;
};

// Energy enters objective scores in kilowatt-hours so that typical values
// are commensurate with seconds and dollars.
inline constexpr double kJoulesPerKilowattHour = 3.6e6;

inline double energyScore(double joules) { return joules / kJoulesPerKilowattHour; }

// Throws unless weights are finite, nonnegative and not all zero.
void checkObjective(const Objective& objective);

// Shortest decimal representation that round-trips to the same double.
std::string formatDouble(double value);

}  // namespace flowcast
